#![allow(dead_code)]

use std::path::Path;

use casino_platform::{ApiError, Config, Request, Service};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

pub const OWNER: &str = "owner-secret";

pub fn config(dir: &Path) -> Config {
    Config::new(dir.join("journal.jsonl"), OWNER)
}

pub fn open(config: &Config) -> Service {
    let s = Service::open(config).unwrap();
    s
}

/// Service with an initialized bank holding `reserve` tokens.
pub fn funded(config: &Config, reserve: u64) -> Service {
    let s = open(config);
    s.execute(
        Some(OWNER),
        Request::InitBank {
            investment: reserve,
            rate: None,
        },
    )
    .unwrap();
    s
}

pub struct Player {
    pub credential: String,
    pub id: String,
}

/// Drives a service with a random mix of valid and invalid requests.
pub struct Driver {
    pub players: Vec<Player>,
    rng: StdRng,
}

impl Driver {
    pub fn new(seed: u64) -> Self {
        Self {
            players: Vec::new(),
            rng: StdRng::seed_from_u64(seed),
        }
    }

    fn seed(&mut self) -> Option<String> {
        match self.rng.random_range(0..3) {
            0 => None,
            _ => Some(format!("cs-{}", self.rng.random_range(0..1000))),
        }
    }

    /// Stands every open blackjack session so a reveal can go through.
    pub fn close_sessions(&self, s: &Service) {
        for p in &self.players {
            let id = casino_core::AccountId::new(p.id.clone()).unwrap();
            if let Some(open) = s.snapshot().state.platform.games().open_session_of(&id) {
                s.execute(
                    Some(&p.credential),
                    Request::BlackjackStand {
                        session_id: open.session_id.0,
                    },
                )
                .unwrap();
            }
        }
    }

    pub fn step(&mut self, s: &Service) -> Result<Value, ApiError> {
        if self.players.is_empty() || (self.players.len() < 6 && self.rng.random_range(0..20) == 0) {
            let r = s.execute(
                None,
                Request::Buy {
                    base_amount: self.rng.random_range(5..1100),
                },
            );
            if let Ok(v) = &r {
                self.players.push(Player {
                    credential: v["credential"].as_str().unwrap().to_string(),
                    id: v["account"].as_str().unwrap().to_string(),
                });
            }
            return r;
        }
        let who = self.rng.random_range(0..self.players.len());
        let cred = self.players[who].credential.clone();
        let id = self.players[who].id.clone();
        let rng = &mut self.rng;
        let stake = rng.random_range(0..60);
        let (bearer, req): (String, Request) = match rng.random_range(0..100) {
            0..=11 => (cred, Request::Buy { base_amount: rng.random_range(5..1100) }),
            12..=19 => (cred, Request::Withdraw { amount: rng.random_range(0..300) }),
            20..=22 => (
                if rng.random_bool(0.8) { OWNER.into() } else { cred },
                Request::TopUp { amount: rng.random_range(0..500) },
            ),
            23..=28 => (
                cred,
                Request::RequestLoan {
                    principal: rng.random_range(50..11_000),
                    rate_percent: rng.random_range(0..25),
                },
            ),
            29..=34 => (
                if rng.random_bool(0.9) { OWNER.into() } else { cred },
                Request::DecideLoan {
                    loan_id: rng.random_range(1..12),
                    accept: rng.random_bool(0.7),
                },
            ),
            35..=40 => (
                cred,
                Request::RepayLoan {
                    loan_id: rng.random_range(1..12),
                    amount: rng.random_range(0..700),
                },
            ),
            41..=52 => {
                let guess = rng.random_range(0..8);
                let seed = self.seed();
                (cred, Request::Dice { guess, stake, client_seed: seed })
            }
            53..=62 => {
                let seed = self.seed();
                (cred, Request::Slots { stake, client_seed: seed })
            }
            63..=72 => {
                let number = self.rng.random_range(0..38);
                let color = ["red", "black", "green"][self.rng.random_range(0..3)].to_string();
                let color = casino_core::games::rules::wheel_color(number as u8)
                    .filter(|_| self.rng.random_bool(0.9))
                    .map_or(color, |c| format!("{c:?}"));
                let seed = self.seed();
                (cred, Request::Roulette { number, color, stake, client_seed: seed })
            }
            73..=80 => {
                let seed = self.seed();
                (cred, Request::BlackjackStart { stake, client_seed: seed })
            }
            81..=95 => {
                let session = s
                    .snapshot()
                    .state
                    .platform
                    .games()
                    .open_session_of(&casino_core::AccountId::new(id).unwrap())
                    .map_or(self.rng.random_range(1..50), |x| x.session_id.0);
                if self.rng.random_bool(0.6) {
                    (cred, Request::BlackjackHit { session_id: session })
                } else {
                    (cred, Request::BlackjackStand { session_id: session })
                }
            }
            96..=97 => {
                if self.rng.random_bool(0.7) {
                    self.close_sessions(s);
                }
                let active = s.snapshot().state.platform.fairness().active().map_or(1, |c| c.0);
                (cred, Request::Reveal { commitment_id: active })
            }
            _ => ("forged".into(), Request::Withdraw { amount: 1 }),
        };
        s.execute(Some(&bearer), req)
    }
}
