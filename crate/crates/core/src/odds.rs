//! Exact odds by enumeration (dice, slots, roulette) and by dynamic
//! programming over an infinite deck (blackjack).
//!
//! Enumeration walks every equiprobable outcome of the random source and
//! asks the rule table what it pays; it never touches the escrow or
//! randomness machinery, so it can check the engine from the outside.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::games::rules::{
    dice_multiplier, roulette_multiplier, slots_multiplier, Rank, RouletteGuess,
    BLACKJACK_LIMIT, DEALER_STANDS_AT, POCKETS,
};

/// Non-negative rational in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Gross payout multipliers over a finite set of equiprobable outcomes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PayoutTable {
    /// `(multiplier, number of outcomes paying it)`, ascending multiplier.
    pub counts: Vec<(u64, u64)>,
    pub outcomes: u64,
}

impl PayoutTable {
    fn from_multipliers(multipliers: impl IntoIterator<Item = u64>) -> Self {
        let mut counts: Vec<(u64, u64)> = Vec::new();
        let mut outcomes = 0;
        for m in multipliers {
            outcomes += 1;
            match counts.iter_mut().find(|(k, _)| *k == m) {
                Some((_, c)) => *c += 1,
                None => counts.push((m, 1)),
            }
        }
        counts.sort_unstable();
        Self { counts, outcomes }
    }

    pub fn probability(&self, multiplier: u64) -> Fraction {
        let n = self
            .counts
            .iter()
            .find(|(m, _)| *m == multiplier)
            .map_or(0, |(_, c)| *c);
        Fraction::new(n, self.outcomes)
    }

    /// Expected gross payout per unit stake.
    pub fn ev(&self) -> Fraction {
        Fraction::new(self.counts.iter().map(|(m, c)| m * c).sum(), self.outcomes)
    }

    /// E[multiplier²].
    pub fn second_moment(&self) -> Fraction {
        Fraction::new(self.counts.iter().map(|(m, c)| m * m * c).sum(), self.outcomes)
    }

    pub fn variance(&self) -> f64 {
        let ev = self.ev().to_f64();
        self.second_moment().to_f64() - ev * ev
    }
}

pub fn dice_table(guess: u8) -> PayoutTable {
    PayoutTable::from_multipliers((1..=6).map(|roll| dice_multiplier(guess, roll)))
}

pub fn slots_table() -> PayoutTable {
    PayoutTable::from_multipliers(
        (0..1000u32).map(|i| slots_multiplier([(i / 100) as u8, (i / 10 % 10) as u8, (i % 10) as u8])),
    )
}

pub fn roulette_table(guess: RouletteGuess) -> PayoutTable {
    PayoutTable::from_multipliers((0..POCKETS).map(|pocket| roulette_multiplier(guess, pocket)))
}

// Totals never exceed 15 + 11 for the dealer or 20 + 11 for the player.
const TOTALS: usize = 32;

fn card_distribution() -> [f64; TOTALS] {
    let mut p = [0.0; TOTALS];
    for rank in Rank::ALL {
        p[rank.points() as usize] += 1.0 / Rank::COUNT as f64;
    }
    p
}

/// Draws from `start` until the total reaches `stop_at` (or busts).
/// Returns the distribution of final totals.
fn draw_until(start: [f64; TOTALS], stop_at: u32) -> [f64; TOTALS] {
    let card = card_distribution();
    let mut done = [0.0; TOTALS];
    let mut live = start;
    // Every draw adds at least 2, so this terminates within stop_at/2 rounds.
    for _ in 0..TOTALS {
        let mut next = [0.0; TOTALS];
        let mut any = false;
        for (total, &p) in live.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            if total as u32 >= stop_at {
                done[total] += p;
                continue;
            }
            any = true;
            for (value, &q) in card.iter().enumerate() {
                if q > 0.0 {
                    next[total + value] += p * q;
                }
            }
        }
        live = next;
        if !any {
            break;
        }
    }
    done
}

/// Dealer's final total, starting from a single random card.
pub fn dealer_final_distribution() -> [f64; TOTALS] {
    draw_until(card_distribution(), DEALER_STANDS_AT)
}

/// Player's final total when hitting below `stand_threshold`, starting
/// from two random cards.
pub fn player_final_distribution(stand_threshold: u32) -> [f64; TOTALS] {
    let card = card_distribution();
    let mut two = [0.0; TOTALS];
    for (a, &p) in card.iter().enumerate() {
        for (b, &q) in card.iter().enumerate() {
            if p > 0.0 && q > 0.0 {
                two[a + b] += p * q;
            }
        }
    }
    draw_until(two, stand_threshold)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackjackOdds {
    pub stand_threshold: u32,
    pub win: f64,
    pub tie: f64,
    pub loss: f64,
}

impl BlackjackOdds {
    /// Expected gross payout per unit stake (a win pays 2).
    pub fn ev(&self) -> f64 {
        2.0 * self.win
    }

    pub fn variance(&self) -> f64 {
        4.0 * self.win - self.ev() * self.ev()
    }
}

/// Exact outcome probabilities for the "stand at `stand_threshold` or
/// more" strategy. Player and dealer totals are independent because every
/// card is an independent draw.
pub fn blackjack_odds(stand_threshold: u32) -> BlackjackOdds {
    let player = player_final_distribution(stand_threshold);
    let dealer = dealer_final_distribution();
    let limit = BLACKJACK_LIMIT as usize;
    let dealer_bust: f64 = dealer[limit + 1..].iter().sum();
    let mut win = 0.0;
    let mut tie = 0.0;
    for (p_total, &p) in player.iter().enumerate().take(limit + 1) {
        if p == 0.0 {
            continue;
        }
        let dealer_below: f64 = dealer[..p_total].iter().sum();
        win += p * (dealer_bust + dealer_below);
        tie += p * dealer[p_total];
    }
    BlackjackOdds {
        stand_threshold,
        win,
        tie,
        loss: 1.0 - win - tie,
    }
}
