use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every way a command against the platform can be refused.
///
/// A refused command never changes state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bank is not initialized")]
    NotInitialized,
    #[error("bank is already initialized")]
    AlreadyInitialized,
    #[error("initial investment must be positive")]
    ZeroInvestment,
    #[error("exchange rate must be positive")]
    InvalidExchangeRate,
    #[error("caller is not the platform owner")]
    NotOwner,
    #[error("amount must be positive")]
    ZeroAmount,
    #[error("account id must be 1 to 64 characters")]
    InvalidAccountId,
    #[error("unknown account")]
    UnknownAccount,
    #[error("purchase is below the 10 token minimum")]
    BelowMinimumPurchase,
    #[error("purchase is above the 1000 token maximum")]
    AboveMaximumPurchase,
    #[error("insufficient free balance")]
    InsufficientBalance,
    #[error("amount is not a whole number of base units")]
    NotRateMultiple,
    #[error("withdrawal would dip into tokens owed on an outstanding loan")]
    DebtOutstanding,
    #[error("insufficient bank reserve")]
    InsufficientReserve,
    #[error("arithmetic overflow")]
    Overflow,

    #[error("loan principal must be between 100 and 10000 tokens")]
    PrincipalOutOfBounds,
    #[error("interest rate is outside the accepted interval")]
    RateOutOfBounds,
    #[error("borrower already has a live loan")]
    ExistingLiveLoan,
    #[error("unknown loan")]
    UnknownLoan,
    #[error("loan is not awaiting a decision")]
    NotRequested,
    #[error("loan is not approved")]
    NotApproved,
    #[error("loan belongs to another borrower")]
    NotYourLoan,
    #[error("repayment exceeds the amount owed")]
    Overpayment,

    #[error("unknown commitment")]
    UnknownCommitment,
    #[error("commitment is already revealed")]
    AlreadyRevealed,
    #[error("draw range must be at least 1")]
    ZeroRange,
    #[error("rounds using this commitment are still open")]
    OpenRoundsRemain,
    #[error("no commitment is open for play")]
    NoActiveCommitment,
    #[error("server seed for this commitment is not loaded")]
    SeedUnavailable,
    #[error("server seed does not match the published commitment")]
    CommitmentMismatch,
    #[error("client seed exceeds 64 bytes")]
    ClientSeedTooLong,

    #[error("stake must be at least 1 token")]
    ZeroStake,
    #[error("stake exceeds the 1000 token maximum")]
    StakeAboveMaximum,
    #[error("guess is out of range")]
    GuessOutOfRange,
    #[error("roulette number and color do not match the wheel")]
    InconsistentGuess,
    #[error("player already has an open blackjack session")]
    OpenSessionExists,
    #[error("unknown blackjack session")]
    UnknownSession,
    #[error("session belongs to another player")]
    NotYourSession,
    #[error("session is not waiting for a player decision")]
    NotPlayerTurn,
    #[error("unknown round")]
    UnknownRound,
}

impl Error {
    /// Stable machine-readable code, used on the wire and in the journal.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            NotInitialized => "NotInitialized",
            AlreadyInitialized => "AlreadyInitialized",
            ZeroInvestment => "ZeroInvestment",
            InvalidExchangeRate => "InvalidExchangeRate",
            NotOwner => "NotOwner",
            ZeroAmount => "ZeroAmount",
            InvalidAccountId => "InvalidAccountId",
            UnknownAccount => "UnknownAccount",
            BelowMinimumPurchase => "BelowMinimumPurchase",
            AboveMaximumPurchase => "AboveMaximumPurchase",
            InsufficientBalance => "InsufficientBalance",
            NotRateMultiple => "NotRateMultiple",
            DebtOutstanding => "DebtOutstanding",
            InsufficientReserve => "InsufficientReserve",
            Overflow => "Overflow",
            PrincipalOutOfBounds => "PrincipalOutOfBounds",
            RateOutOfBounds => "RateOutOfBounds",
            ExistingLiveLoan => "ExistingLiveLoan",
            UnknownLoan => "UnknownLoan",
            NotRequested => "NotRequested",
            NotApproved => "NotApproved",
            NotYourLoan => "NotYourLoan",
            Overpayment => "Overpayment",
            UnknownCommitment => "UnknownCommitment",
            AlreadyRevealed => "AlreadyRevealed",
            ZeroRange => "ZeroRange",
            OpenRoundsRemain => "OpenRoundsRemain",
            NoActiveCommitment => "NoActiveCommitment",
            SeedUnavailable => "SeedUnavailable",
            CommitmentMismatch => "CommitmentMismatch",
            ClientSeedTooLong => "ClientSeedTooLong",
            ZeroStake => "ZeroStake",
            StakeAboveMaximum => "StakeAboveMaximum",
            GuessOutOfRange => "GuessOutOfRange",
            InconsistentGuess => "InconsistentGuess",
            OpenSessionExists => "OpenSessionExists",
            UnknownSession => "UnknownSession",
            NotYourSession => "NotYourSession",
            NotPlayerTurn => "NotPlayerTurn",
            UnknownRound => "UnknownRound",
        }
    }
}
