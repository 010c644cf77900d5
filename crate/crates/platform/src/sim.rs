//! Monte-Carlo runs of the production engine against the exact odds.
//!
//! Every round goes through [`Platform::apply`]; the simulator only picks
//! bets and tallies results. Server seeds come from
//! `SHA-256("casino-sim" || seed || shard)`, so a report is a pure function
//! of its parameters.

use casino_core::games::rules::{wheel_color, Color};
use casino_core::odds::{self, BlackjackOdds, PayoutTable};
use casino_core::{
    AccountId, Command, Effect, Error, ExchangeRate, GameKind, Phase, Platform, PlatformConfig,
    RoundId, TokenAmount,
};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const DEFAULT_SHARDS: u32 = 16;
pub const DEFAULT_STAND_THRESHOLD: u32 = 17;
pub const DICE_GUESS: u8 = 4;
pub const ROULETTE_NUMBER: u8 = 7;
/// Oracle tolerance in standard errors.
pub const TOLERANCE_SIGMAS: f64 = 3.0;

/// Bank funding for [`simulate`]; large enough that the reserve never binds.
const DEEP_RESERVE: u64 = 1 << 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("rounds must be at least 1")]
    ZeroRounds,
    #[error("stand threshold must be between 12 and 21")]
    BadStrategy,
    #[error("stake must be between 1 and 1000")]
    BadStake,
    #[error("reserve must be positive")]
    ZeroReserve,
    #[error("shards must be at least 1")]
    ZeroShards,
}

#[derive(Clone, Copy, Debug)]
pub struct SimParams {
    pub game: GameKind,
    pub rounds: u64,
    pub stake: u64,
    pub stand_threshold: u32,
    pub seed: u64,
    pub shards: u32,
}

impl SimParams {
    pub fn new(game: GameKind, rounds: u64, stake: u64, seed: u64) -> Self {
        Self {
            game,
            rounds,
            stake,
            stand_threshold: DEFAULT_STAND_THRESHOLD,
            seed,
            shards: DEFAULT_SHARDS,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.rounds == 0 {
            return Err(SimError::ZeroRounds);
        }
        if !(1..=casino_core::games::rules::MAX_STAKE).contains(&self.stake) {
            return Err(SimError::BadStake);
        }
        if !(12..=21).contains(&self.stand_threshold) {
            return Err(SimError::BadStrategy);
        }
        if self.shards == 0 {
            return Err(SimError::ZeroShards);
        }
        Ok(())
    }
}

/// Exact payout distribution per unit stake for the simulator's bets.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub ev: f64,
    pub ev_fraction: Option<String>,
    pub variance: f64,
    pub win_probability: f64,
    /// EV under the reading where the multiplier is paid on top of the
    /// returned stake.
    pub ev_net_reading: f64,
    pub table: Option<PayoutTable>,
}

pub fn oracle(game: GameKind, stand_threshold: u32) -> Oracle {
    let from_table = |t: PayoutTable| {
        let win: u64 = t.counts.iter().filter(|(m, _)| *m > 0).map(|(_, c)| c).sum();
        let bonus: u64 = t.counts.iter().filter(|(m, _)| *m > 0).map(|(m, c)| (m + 1) * c).sum();
        Oracle {
            ev: t.ev().to_f64(),
            ev_fraction: Some(t.ev().to_string()),
            variance: t.variance(),
            win_probability: win as f64 / t.outcomes as f64,
            ev_net_reading: bonus as f64 / t.outcomes as f64,
            table: Some(t),
        }
    };
    match game {
        GameKind::Dice => from_table(odds::dice_table(DICE_GUESS)),
        GameKind::Slots => from_table(odds::slots_table()),
        GameKind::Roulette => from_table(odds::roulette_table(roulette_guess())),
        GameKind::Blackjack => {
            let o: BlackjackOdds = odds::blackjack_odds(stand_threshold);
            Oracle {
                ev: o.ev(),
                ev_fraction: None,
                variance: o.variance(),
                win_probability: o.win,
                ev_net_reading: 3.0 * o.win,
                table: None,
            }
        }
    }
}

fn roulette_guess() -> casino_core::RouletteGuess {
    casino_core::RouletteGuess::new(ROULETTE_NUMBER, wheel_color(ROULETTE_NUMBER).unwrap_or(Color::Green))
        .expect("consistent guess")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PayoutLine {
    pub multiplier: u64,
    pub probability: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub game: GameKind,
    pub rounds: u64,
    pub stake: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stand_threshold: Option<u32>,
    pub seed: u64,
    pub shards: u32,
    pub rounds_played: u64,
    pub total_staked: u64,
    pub total_paid: u64,
    pub empirical_ev_per_stake: f64,
    pub exact_ev_per_stake: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_ev_fraction: Option<String>,
    pub exact_ev_per_stake_net_reading: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub exact_payouts: Vec<PayoutLine>,
    pub stddev: f64,
    pub exact_stddev: f64,
    pub ev_z_score: f64,
    pub wins: u64,
    pub empirical_win_rate: f64,
    pub exact_win_rate: f64,
    pub win_rate_z_score: f64,
    pub within_tolerance: bool,
    pub bank_pnl: i64,
    pub reserve_start: u64,
    pub reserve_end: u64,
    pub reserve_min: u64,
    pub refusals: u64,
    pub ruin_events: u64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    played: u64,
    paid: u64,
    paid_sq: u128,
    wins: u64,
    refusals: u64,
    ruin_events: u64,
    reserve_start: u64,
    reserve_end: u64,
    reserve_min: u64,
    pnl: i64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            played: self.played + o.played,
            paid: self.paid + o.paid,
            paid_sq: self.paid_sq + o.paid_sq,
            wins: self.wins + o.wins,
            refusals: self.refusals + o.refusals,
            ruin_events: self.ruin_events + o.ruin_events,
            reserve_start: self.reserve_start + o.reserve_start,
            reserve_end: self.reserve_end + o.reserve_end,
            reserve_min: self.reserve_min + o.reserve_min,
            pnl: self.pnl + o.pnl,
        }
    }
}

fn shard_seed(seed: u64, shard: u32) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"casino-sim");
    h.update(seed.to_be_bytes());
    h.update(shard.to_be_bytes());
    h.finalize().into()
}

fn owner() -> AccountId {
    AccountId::new("sim-bank").expect("valid id")
}

fn player() -> AccountId {
    AccountId::new("sim-player").expect("valid id")
}

struct Table {
    platform: Platform,
    player: AccountId,
}

impl Table {
    fn new(reserve: u64, server_seed: [u8; 32]) -> Self {
        let mut platform = Platform::new(PlatformConfig {
            keep_history: false,
            ..Default::default()
        });
        platform
            .apply(Command::InitializeBank {
                owner: owner(),
                investment: TokenAmount(reserve),
                rate: ExchangeRate::default(),
            })
            .expect("fresh bank");
        platform.open_commitment(server_seed).expect("initialized");
        Self {
            platform,
            player: player(),
        }
    }

    fn reserve(&self) -> u64 {
        self.platform.bank().reserve.get()
    }

    fn fund(&mut self, stake: u64) {
        while self.platform.balance_of(&self.player).0.get() < stake {
            self.platform
                .apply(Command::BuyTokens {
                    buyer: self.player.clone(),
                    base_amount: casino_core::ledger::MAX_PURCHASE,
                })
                .expect("purchase within bounds");
        }
    }

    fn finish_blackjack(&mut self, mut effect: Effect, threshold: u32) -> Result<TokenAmount, Error> {
        loop {
            let session = match effect {
                Effect::Session(s) => s,
                Effect::Round(r) => return Ok(r.gross_payout),
                _ => unreachable!("blackjack yields sessions and rounds"),
            };
            if session.phase == Phase::Settled {
                return Ok(session.gross_payout.unwrap_or_default());
            }
            let id: RoundId = session.session_id;
            effect = if session.player_points < threshold {
                self.platform.apply(Command::BlackjackHit {
                    player: self.player.clone(),
                    session_id: id,
                })?
            } else {
                self.platform.apply(Command::BlackjackStand {
                    player: self.player.clone(),
                    session_id: id,
                })?
            };
        }
    }

    /// Plays one round; `Ok(None)` if the bank refused it for lack of reserve.
    fn play(&mut self, p: &SimParams) -> Result<Option<u64>, Error> {
        self.fund(p.stake);
        let stake = TokenAmount(p.stake);
        let player = self.player.clone();
        let command = match p.game {
            GameKind::Dice => Command::PlayDice {
                player,
                guess: DICE_GUESS,
                stake,
                client_seed: Default::default(),
            },
            GameKind::Slots => Command::PlaySlots {
                player,
                stake,
                client_seed: Default::default(),
            },
            GameKind::Roulette => {
                let g = roulette_guess();
                Command::PlayRoulette {
                    player,
                    number: g.number,
                    color: g.color,
                    stake,
                    client_seed: Default::default(),
                }
            }
            GameKind::Blackjack => Command::BlackjackStart {
                player,
                stake,
                client_seed: Default::default(),
            },
        };
        let effect = match self.platform.apply(command) {
            Ok(e) => e,
            Err(Error::InsufficientReserve) => return Ok(None),
            Err(e) => return Err(e),
        };
        let payout = match effect {
            Effect::Round(r) => r.gross_payout,
            e => self.finish_blackjack(e, p.stand_threshold)?,
        };
        Ok(Some(payout.get()))
    }
}

fn run_shard(p: &SimParams, shard: u32, rounds: u64, reserve: u64) -> Tally {
    let mut table = Table::new(reserve, shard_seed(p.seed, shard));
    let mut t = Tally {
        reserve_start: table.reserve(),
        reserve_min: table.reserve(),
        ..Default::default()
    };
    let mut refusing = false;
    for _ in 0..rounds {
        match table.play(p).expect("simulated commands are valid") {
            Some(paid) => {
                refusing = false;
                t.played += 1;
                t.paid += paid;
                t.paid_sq += u128::from(paid) * u128::from(paid);
                t.wins += u64::from(paid > 0);
            }
            None => {
                if !refusing {
                    t.ruin_events += 1;
                }
                refusing = true;
                t.refusals += 1;
            }
        }
        t.reserve_min = t.reserve_min.min(table.reserve());
    }
    debug_assert!(table.platform.conservation_check());
    t.reserve_end = table.reserve();
    t.pnl = t.reserve_end as i64 - t.reserve_start as i64;
    t
}

fn report(p: &SimParams, t: Tally) -> SimReport {
    let o = oracle(p.game, p.stand_threshold);
    let stake = p.stake as f64;
    let n = t.played.max(1) as f64;
    let mean = t.paid as f64 / stake / n;
    let second = t.paid_sq as f64 / (stake * stake) / n;
    let stddev = (second - mean * mean).max(0.0).sqrt();
    let exact_stddev = o.variance.sqrt();
    let ev_sigma = exact_stddev / n.sqrt();
    let ev_z = if ev_sigma > 0.0 { (mean - o.ev) / ev_sigma } else { 0.0 };
    let win_rate = t.wins as f64 / n;
    let win_sigma = (o.win_probability * (1.0 - o.win_probability) / n).sqrt();
    let win_z = if win_sigma > 0.0 {
        (win_rate - o.win_probability) / win_sigma
    } else {
        0.0
    };
    let exact_payouts = o
        .table
        .as_ref()
        .map(|table| {
            table
                .counts
                .iter()
                .map(|&(m, _)| PayoutLine {
                    multiplier: m,
                    probability: table.probability(m).to_string(),
                })
                .collect()
        })
        .unwrap_or_default();
    SimReport {
        game: p.game,
        rounds: p.rounds,
        stake: p.stake,
        stand_threshold: (p.game == GameKind::Blackjack).then_some(p.stand_threshold),
        seed: p.seed,
        shards: p.shards,
        rounds_played: t.played,
        total_staked: t.played * p.stake,
        total_paid: t.paid,
        empirical_ev_per_stake: mean,
        exact_ev_per_stake: o.ev,
        exact_ev_fraction: o.ev_fraction,
        exact_ev_per_stake_net_reading: o.ev_net_reading,
        exact_payouts,
        stddev,
        exact_stddev,
        ev_z_score: ev_z,
        wins: t.wins,
        empirical_win_rate: win_rate,
        exact_win_rate: o.win_probability,
        win_rate_z_score: win_z,
        within_tolerance: t.played > 0
            && ev_z.abs() <= TOLERANCE_SIGMAS
            && win_z.abs() <= TOLERANCE_SIGMAS,
        bank_pnl: t.pnl,
        reserve_start: t.reserve_start,
        reserve_end: t.reserve_end,
        reserve_min: t.reserve_min,
        refusals: t.refusals,
        ruin_events: t.ruin_events,
    }
}

/// Plays `rounds` rounds across `shards` independent tables with a bank
/// that never runs dry, and compares the results with the exact odds.
/// Reserve figures are summed over shards.
pub fn simulate(p: &SimParams) -> Result<SimReport, SimError> {
    p.validate()?;
    let per = p.rounds / u64::from(p.shards);
    let extra = p.rounds % u64::from(p.shards);
    let reserve = DEEP_RESERVE / u64::from(p.shards);
    let tally = (0..p.shards)
        .into_par_iter()
        .map(|i| run_shard(p, i, per + u64::from(u64::from(i) < extra), reserve))
        .reduce(Tally::default, Tally::merge);
    Ok(report(p, tally))
}

/// Plays `rounds` rounds sequentially against a bank holding `reserve`
/// tokens, counting rounds the bank refuses for lack of reserve.
/// `ruin_events` counts the times the bank went from playable to refusing.
pub fn solvency(p: &SimParams, reserve: u64) -> Result<SimReport, SimError> {
    p.validate()?;
    if reserve == 0 {
        return Err(SimError::ZeroReserve);
    }
    let tally = run_shard(p, 0, p.rounds, reserve);
    let mut r = report(&SimParams { shards: 1, ..*p }, tally);
    r.shards = 1;
    Ok(r)
}

impl SimReport {
    pub fn to_text(&self) -> String {
        let value = serde_json::to_value(self).expect("serializes");
        let mut out = String::new();
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                let v = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Array(items) => items
                        .iter()
                        .map(|i| format!("{}x@{}", i["multiplier"], i["probability"].as_str().unwrap_or("")))
                        .collect::<Vec<_>>()
                        .join(" "),
                    other => other.to_string(),
                };
                out.push_str(&format!("{k}: {v}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let p = SimParams::new(GameKind::Dice, 0, 10, 1);
        assert_eq!(simulate(&p), Err(SimError::ZeroRounds));
        let p = SimParams {
            stand_threshold: 22,
            ..SimParams::new(GameKind::Blackjack, 10, 10, 1)
        };
        assert_eq!(simulate(&p).unwrap_err(), SimError::BadStrategy);
        let p = SimParams::new(GameKind::Dice, 10, 0, 1);
        assert_eq!(simulate(&p).unwrap_err(), SimError::BadStake);
        let p = SimParams::new(GameKind::Dice, 10, 10, 1);
        assert_eq!(solvency(&p, 0).unwrap_err(), SimError::ZeroReserve);
    }

    #[test]
    fn oracle_values() {
        assert_eq!(oracle(GameKind::Dice, 17).ev, 1.0);
        assert_eq!(oracle(GameKind::Slots, 17).ev_fraction.as_deref(), Some("9/10"));
        assert_eq!(oracle(GameKind::Roulette, 17).ev_fraction.as_deref(), Some("70/37"));
        assert!((oracle(GameKind::Dice, 17).ev_net_reading - 7.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn reports_cover_every_game() {
        for game in GameKind::ALL {
            let r = simulate(&SimParams::new(game, 2000, 10, 3)).unwrap();
            assert_eq!(r.rounds_played, 2000);
            assert_eq!(r.refusals, 0);
            assert!(r.total_paid % 10 == 0);
        }
    }
}
