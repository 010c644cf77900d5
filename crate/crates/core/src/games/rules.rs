//! Rule tables of the four games. Multipliers are gross: they include the
//! returned stake.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_STAKE: u64 = 1000;
pub const BLACKJACK_LIMIT: u32 = 21;
pub const DEALER_STANDS_AT: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GameKind {
    Dice,
    Slots,
    Roulette,
    Blackjack,
}

impl GameKind {
    pub const ALL: [GameKind; 4] = [
        GameKind::Dice,
        GameKind::Slots,
        GameKind::Roulette,
        GameKind::Blackjack,
    ];

    /// Largest gross payout per unit stake; sizes the escrow pool.
    pub fn max_multiplier(self) -> u64 {
        match self {
            GameKind::Dice => 6,
            GameKind::Slots => 9,
            GameKind::Roulette => 36,
            GameKind::Blackjack => 2,
        }
    }

    /// Every gross multiplier a settled round of this kind can pay.
    pub fn payout_multipliers(self) -> &'static [u64] {
        match self {
            GameKind::Dice => &[0, 6],
            GameKind::Slots => &[0, 3, 9],
            GameKind::Roulette => &[0, 2, 36],
            GameKind::Blackjack => &[0, 2],
        }
    }

    pub fn code(self) -> u8 {
        match self {
            GameKind::Dice => 0,
            GameKind::Slots => 1,
            GameKind::Roulette => 2,
            GameKind::Blackjack => 3,
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GameKind::Dice => "dice",
            GameKind::Slots => "slots",
            GameKind::Roulette => "roulette",
            GameKind::Blackjack => "blackjack",
        };
        f.write_str(name)
    }
}

impl core::str::FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dice" => Ok(GameKind::Dice),
            "slots" => Ok(GameKind::Slots),
            "roulette" => Ok(GameKind::Roulette),
            "blackjack" => Ok(GameKind::Blackjack),
            _ => Err(Error::GuessOutOfRange),
        }
    }
}

pub fn dice_multiplier(guess: u8, roll: u8) -> u64 {
    if guess == roll {
        6
    } else {
        0
    }
}

/// Three of a kind pays 9, exactly two equal pays 3.
pub fn slots_multiplier(digits: [u8; 3]) -> u64 {
    let [a, b, c] = digits;
    if a == b && b == c {
        9
    } else if a == b || b == c || a == c {
        3
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Red,
    Black,
    Green,
}

impl Color {
    pub fn code(self) -> u8 {
        match self {
            Color::Red => 0,
            Color::Black => 1,
            Color::Green => 2,
        }
    }
}

impl core::str::FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "red" => Ok(Color::Red),
            "black" => Ok(Color::Black),
            "green" => Ok(Color::Green),
            _ => Err(Error::InconsistentGuess),
        }
    }
}

pub const POCKETS: u8 = 37;
pub const RED_NUMBERS: [u8; 18] = [
    1, 3, 5, 7, 9, 12, 14, 16, 18, 19, 21, 23, 25, 27, 30, 32, 34, 36,
];

/// Color of a pocket on a single-zero European wheel.
pub fn wheel_color(number: u8) -> Option<Color> {
    match number {
        0 => Some(Color::Green),
        n if n < POCKETS && RED_NUMBERS.contains(&n) => Some(Color::Red),
        n if n < POCKETS => Some(Color::Black),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RouletteGuess {
    pub number: u8,
    pub color: Color,
}

impl RouletteGuess {
    pub fn new(number: u8, color: Color) -> Result<Self> {
        match wheel_color(number) {
            None => Err(Error::GuessOutOfRange),
            Some(c) if c != color => Err(Error::InconsistentGuess),
            Some(_) => Ok(Self { number, color }),
        }
    }
}

/// Number hit pays 36; otherwise a color hit pays 2.
pub fn roulette_multiplier(guess: RouletteGuess, pocket: u8) -> u64 {
    if guess.number == pocket {
        36
    } else if wheel_color(pocket) == Some(guess.color) {
        2
    } else {
        0
    }
}

/// Card ranks in draw-index order: index 0 is a two, index 12 an ace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rank {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "4")]
    Four,
    #[serde(rename = "5")]
    Five,
    #[serde(rename = "6")]
    Six,
    #[serde(rename = "7")]
    Seven,
    #[serde(rename = "8")]
    Eight,
    #[serde(rename = "9")]
    Nine,
    #[serde(rename = "10")]
    Ten,
    #[serde(rename = "J")]
    Jack,
    #[serde(rename = "Q")]
    Queen,
    #[serde(rename = "K")]
    King,
    #[serde(rename = "A")]
    Ace,
}

impl Rank {
    pub const COUNT: u64 = 13;

    pub const ALL: [Rank; 13] = [
        Rank::Two,
        Rank::Three,
        Rank::Four,
        Rank::Five,
        Rank::Six,
        Rank::Seven,
        Rank::Eight,
        Rank::Nine,
        Rank::Ten,
        Rank::Jack,
        Rank::Queen,
        Rank::King,
        Rank::Ace,
    ];

    pub fn from_index(index: u64) -> Option<Rank> {
        Self::ALL.get(index as usize).copied()
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    /// Aces always count 11.
    pub fn points(self) -> u32 {
        match self {
            Rank::Ace => 11,
            Rank::Jack | Rank::Queen | Rank::King => 10,
            r => r as u32 + 2,
        }
    }
}

pub fn hand_points(cards: &[Rank]) -> u32 {
    cards.iter().map(|c| c.points()).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlackjackResult {
    PlayerBust,
    DealerBust,
    PlayerHigher,
    DealerHigher,
    /// Ties go to the house.
    Tie,
}

impl BlackjackResult {
    pub fn player_wins(self) -> bool {
        matches!(self, BlackjackResult::DealerBust | BlackjackResult::PlayerHigher)
    }
}

/// Outcome once the player has stood and the dealer finished drawing.
pub fn blackjack_result(player_points: u32, dealer_points: u32) -> BlackjackResult {
    if player_points > BLACKJACK_LIMIT {
        BlackjackResult::PlayerBust
    } else if dealer_points > BLACKJACK_LIMIT {
        BlackjackResult::DealerBust
    } else if player_points > dealer_points {
        BlackjackResult::PlayerHigher
    } else if player_points == dealer_points {
        BlackjackResult::Tie
    } else {
        BlackjackResult::DealerHigher
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn card_values() {
        let points: alloc::vec::Vec<u32> = Rank::ALL.iter().map(|r| r.points()).collect();
        assert_eq!(points, [2, 3, 4, 5, 6, 7, 8, 9, 10, 10, 10, 10, 11]);
        assert_eq!(hand_points(&[Rank::King, Rank::Five]), 15);
        assert_eq!(hand_points(&[Rank::Ace, Rank::Ace]), 22);
        assert_eq!(Rank::from_index(13), None);
    }

    #[test]
    fn slots_tiers() {
        assert_eq!(slots_multiplier([7, 7, 7]), 9);
        assert_eq!(slots_multiplier([3, 3, 8]), 3);
        assert_eq!(slots_multiplier([8, 3, 3]), 3);
        assert_eq!(slots_multiplier([3, 8, 3]), 3);
        assert_eq!(slots_multiplier([1, 2, 3]), 0);
    }

    #[test]
    fn wheel_layout() {
        assert_eq!(wheel_color(0), Some(Color::Green));
        assert_eq!(wheel_color(7), Some(Color::Red));
        assert_eq!(wheel_color(8), Some(Color::Black));
        assert_eq!(wheel_color(37), None);
        let reds = (0..37).filter(|&n| wheel_color(n) == Some(Color::Red)).count();
        let blacks = (0..37).filter(|&n| wheel_color(n) == Some(Color::Black)).count();
        assert_eq!((reds, blacks), (18, 18));
    }

    #[test]
    fn roulette_guesses() {
        let guess = RouletteGuess::new(7, Color::Red).unwrap();
        assert_eq!(roulette_multiplier(guess, 7), 36);
        assert_eq!(roulette_multiplier(guess, 9), 2);
        assert_eq!(roulette_multiplier(guess, 8), 0);
        assert_eq!(roulette_multiplier(guess, 0), 0);
        assert_eq!(RouletteGuess::new(7, Color::Black), Err(Error::InconsistentGuess));
        assert_eq!(RouletteGuess::new(0, Color::Red), Err(Error::InconsistentGuess));
        assert_eq!(RouletteGuess::new(37, Color::Red), Err(Error::GuessOutOfRange));
    }

    #[test]
    fn blackjack_results() {
        assert_eq!(blackjack_result(20, 18), BlackjackResult::PlayerHigher);
        assert_eq!(blackjack_result(18, 18), BlackjackResult::Tie);
        assert_eq!(blackjack_result(12, 25), BlackjackResult::DealerBust);
        assert_eq!(blackjack_result(22, 25), BlackjackResult::PlayerBust);
        assert_eq!(blackjack_result(17, 19), BlackjackResult::DealerHigher);
        assert!(!BlackjackResult::Tie.player_wins());
    }
}
