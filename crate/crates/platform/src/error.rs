use std::borrow::Cow;
use std::fmt;

use casino_core::Error as CoreError;
use serde::Serialize;

/// An error as returned to API clients: `{"error": code, "message": ...}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(rename = "error")]
    pub code: Cow<'static, str>,
    pub message: String,
}

impl ApiError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code: Cow::Borrowed(code),
            message: message.into(),
        }
    }

    pub fn auth(message: impl Into<String>) -> Self {
        Self::new("AuthFailed", message)
    }

    pub fn forbidden(message: impl Into<String>) -> Self {
        Self::new("Forbidden", message)
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new("InvalidRequest", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new("NotFound", message)
    }

    pub fn journal(err: &std::io::Error) -> Self {
        Self::new("JournalWrite", format!("journal append failed: {err}"))
    }

    /// HTTP status for this error code.
    pub fn status(&self) -> u16 {
        use CoreError::*;
        match self.code.as_ref() {
            "AuthFailed" => return 401,
            "Forbidden" => return 403,
            "NotFound" => return 404,
            "InvalidRequest" => return 400,
            "JournalWrite" => return 500,
            _ => {}
        }
        let Some(core) = core_error_by_code(&self.code) else {
            return 500;
        };
        match core {
            NotOwner | NotYourLoan | NotYourSession => 403,
            UnknownAccount | UnknownLoan | UnknownCommitment | UnknownSession | UnknownRound => 404,
            NotInitialized | AlreadyInitialized | InsufficientBalance | DebtOutstanding
            | InsufficientReserve | ExistingLiveLoan | NotRequested | NotApproved
            | AlreadyRevealed | OpenRoundsRemain | NoActiveCommitment | SeedUnavailable
            | CommitmentMismatch | OpenSessionExists | NotPlayerTurn => 409,
            ZeroInvestment | InvalidExchangeRate | ZeroAmount | InvalidAccountId
            | BelowMinimumPurchase | AboveMaximumPurchase | NotRateMultiple | Overflow
            | PrincipalOutOfBounds | RateOutOfBounds | Overpayment | ZeroRange
            | ClientSeedTooLong | ZeroStake | StakeAboveMaximum | GuessOutOfRange
            | InconsistentGuess => 400,
        }
    }
}

fn core_error_by_code(code: &str) -> Option<CoreError> {
    use CoreError::*;
    const ALL: [CoreError; 40] = [
        NotInitialized, AlreadyInitialized, ZeroInvestment, InvalidExchangeRate, NotOwner,
        ZeroAmount, InvalidAccountId, UnknownAccount, BelowMinimumPurchase, AboveMaximumPurchase,
        InsufficientBalance, NotRateMultiple, DebtOutstanding, InsufficientReserve, Overflow,
        PrincipalOutOfBounds, RateOutOfBounds, ExistingLiveLoan, UnknownLoan, NotRequested,
        NotApproved, NotYourLoan, Overpayment, UnknownCommitment, AlreadyRevealed, ZeroRange,
        OpenRoundsRemain, NoActiveCommitment, SeedUnavailable, CommitmentMismatch,
        ClientSeedTooLong, ZeroStake, StakeAboveMaximum, GuessOutOfRange, InconsistentGuess,
        OpenSessionExists, UnknownSession, NotYourSession, NotPlayerTurn, UnknownRound,
    ];
    ALL.into_iter().find(|e| e.code() == code)
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        Self::new(e.code(), e.to_string())
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

/// Reasons the service cannot start.
#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("journal corrupt at seq {seq}: {reason}")]
    JournalCorrupt { seq: u64, reason: String },
    #[error("journal io: {0}")]
    Io(#[from] std::io::Error),
}

impl StartupError {
    pub fn corrupt(seq: u64, reason: impl Into<String>) -> Self {
        Self::JournalCorrupt {
            seq,
            reason: reason.into(),
        }
    }
}
