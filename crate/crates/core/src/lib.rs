//! Engine of an escrowed token casino with lending.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO: journaling,
//! networking and seed generation live in the companion platform crate.
//! All state transitions go through [`Platform`], a deterministic state
//! machine whose canonical form hashes to a [`Platform::state_hash`].

#![no_std]

extern crate alloc;

pub mod canonical;
pub mod error;
pub mod fairness;
pub mod games;
pub mod hexbytes;
pub mod ledger;
pub mod lending;
pub mod odds;
pub mod platform;

pub use error::{Error, Result};
pub use fairness::{ClientSeed, CommitmentId, CommitmentInfo, Digest32, ServerSeed};
pub use games::{
    BlackjackResult, BlackjackSession, Color, GameKind, GameRound, Outcome, Phase, Rank,
    RoundId, RouletteGuess,
};
pub use ledger::{Account, AccountId, BankState, ExchangeRate, TokenAmount};
pub use lending::{InterestRatePercent, LendingPolicy, Loan, LoanId, LoanStatus};
pub use platform::{Command, Effect, Platform, PlatformConfig};
