#![allow(dead_code)]

use casino_core::fairness::draw_uniform_from_seed;
use casino_core::{
    AccountId, ClientSeed, Command, ExchangeRate, Platform, PlatformConfig, ServerSeed,
    TokenAmount,
};

pub const SEED: ServerSeed = [0x5a; 32];

pub fn id(s: &str) -> AccountId {
    AccountId::new(s).unwrap()
}

pub fn owner() -> AccountId {
    id("own-1")
}

pub fn alice() -> AccountId {
    id("alice")
}

/// Bank with 100 000 tokens, an open commitment and alice holding `tokens`.
pub fn platform_with(tokens: u64) -> Platform {
    let mut p = Platform::new(PlatformConfig::default());
    p.apply(Command::InitializeBank {
        owner: owner(),
        investment: TokenAmount(100_000),
        rate: ExchangeRate::default(),
    })
    .unwrap();
    p.open_commitment(SEED).unwrap();
    let mut left = tokens;
    while left > 0 {
        let chunk = left.min(1000).max(10);
        p.apply(Command::BuyTokens {
            buyer: alice(),
            base_amount: chunk,
        })
        .unwrap();
        left = left.saturating_sub(chunk);
    }
    p
}

pub fn next_nonce(p: &Platform) -> u64 {
    let id = p.fairness().active().expect("active commitment");
    p.fairness().get(id).unwrap().next_nonce
}

/// Finds a client seed whose next draws (ranges `ranges`) come out as `want`.
pub fn client_seed_for(p: &Platform, ranges: &[u64], want: &[u64]) -> ClientSeed {
    let start = next_nonce(p);
    for i in 0u64.. {
        let candidate = format!("search-{i}");
        let hit = ranges.iter().zip(want).enumerate().all(|(k, (&n, &w))| {
            draw_uniform_from_seed(&SEED, candidate.as_bytes(), start + k as u64, n).unwrap() == w
        });
        if hit {
            return ClientSeed::new(candidate).unwrap();
        }
    }
    unreachable!()
}
