//! The platform state machine. Every mutation enters through
//! [`Platform::apply`] (or [`Platform::open_commitment`], whose input is a
//! secret) and is either committed whole or refused with state untouched.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fairness::{
    ClientSeed, CommitmentId, CommitmentInfo, CommitmentTable, Digest32, ServerSeed,
};
use crate::games::{BlackjackSession, Color, GameRound, GameTable, RoundId, RouletteGuess};
use crate::hexbytes;
use crate::ledger::{AccountId, BankState, ExchangeRate, Ledger, Redemption, TokenAmount};
use crate::lending::{InterestRatePercent, LendingPolicy, Loan, LoanBook, LoanId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatformConfig {
    pub lending: LendingPolicy,
    /// Keep settled rounds queryable through [`Platform::round_info`].
    pub keep_history: bool,
}

impl Default for PlatformConfig {
    fn default() -> Self {
        Self {
            lending: LendingPolicy::default(),
            keep_history: true,
        }
    }
}

/// A journaled mutation. The acting account is always explicit; callers
/// authenticate it before building the command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Command {
    InitializeBank {
        owner: AccountId,
        investment: TokenAmount,
        rate: ExchangeRate,
    },
    TopUpBank {
        caller: AccountId,
        amount: TokenAmount,
    },
    BuyTokens {
        buyer: AccountId,
        base_amount: u64,
    },
    WithdrawTokens {
        caller: AccountId,
        amount: TokenAmount,
    },
    RequestLoan {
        borrower: AccountId,
        principal: TokenAmount,
        rate_percent: InterestRatePercent,
    },
    DecideLoan {
        caller: AccountId,
        loan_id: LoanId,
        accept: bool,
    },
    RepayLoan {
        borrower: AccountId,
        loan_id: LoanId,
        amount: TokenAmount,
    },
    RevealCommitment {
        commitment_id: CommitmentId,
    },
    PlayDice {
        player: AccountId,
        guess: u8,
        stake: TokenAmount,
        #[serde(default)]
        client_seed: ClientSeed,
    },
    PlaySlots {
        player: AccountId,
        stake: TokenAmount,
        #[serde(default)]
        client_seed: ClientSeed,
    },
    PlayRoulette {
        player: AccountId,
        number: u8,
        color: Color,
        stake: TokenAmount,
        #[serde(default)]
        client_seed: ClientSeed,
    },
    BlackjackStart {
        player: AccountId,
        stake: TokenAmount,
        #[serde(default)]
        client_seed: ClientSeed,
    },
    BlackjackHit {
        player: AccountId,
        session_id: RoundId,
    },
    BlackjackStand {
        player: AccountId,
        session_id: RoundId,
    },
}

impl Command {
    pub fn kind(&self) -> &'static str {
        match self {
            Command::InitializeBank { .. } => "initialize_bank",
            Command::TopUpBank { .. } => "top_up_bank",
            Command::BuyTokens { .. } => "buy_tokens",
            Command::WithdrawTokens { .. } => "withdraw_tokens",
            Command::RequestLoan { .. } => "request_loan",
            Command::DecideLoan { .. } => "decide_loan",
            Command::RepayLoan { .. } => "repay_loan",
            Command::RevealCommitment { .. } => "reveal_commitment",
            Command::PlayDice { .. } => "play_dice",
            Command::PlaySlots { .. } => "play_slots",
            Command::PlayRoulette { .. } => "play_roulette",
            Command::BlackjackStart { .. } => "blackjack_start",
            Command::BlackjackHit { .. } => "blackjack_hit",
            Command::BlackjackStand { .. } => "blackjack_stand",
        }
    }
}

/// What a committed command produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Effect {
    Bank(BankState),
    Purchased {
        account: AccountId,
        tokens: TokenAmount,
    },
    Withdrawn {
        account: AccountId,
        #[serde(flatten)]
        redemption: Redemption,
    },
    Loan(Loan),
    Round(GameRound),
    Session(BlackjackSession),
    Revealed {
        commitment_id: CommitmentId,
        #[serde(with = "hexbytes")]
        server_seed: ServerSeed,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Platform {
    config: PlatformConfig,
    ledger: Ledger,
    loans: LoanBook,
    fairness: CommitmentTable,
    games: GameTable,
}

impl Platform {
    pub fn new(config: PlatformConfig) -> Self {
        Self {
            config,
            ledger: Ledger::new(),
            loans: LoanBook::new(),
            fairness: CommitmentTable::new(),
            games: GameTable::new(config.keep_history),
        }
    }

    pub fn config(&self) -> &PlatformConfig {
        &self.config
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn loans(&self) -> &LoanBook {
        &self.loans
    }

    pub fn fairness(&self) -> &CommitmentTable {
        &self.fairness
    }

    pub fn games(&self) -> &GameTable {
        &self.games
    }

    pub fn bank(&self) -> &BankState {
        self.ledger.bank()
    }

    pub fn balance_of(&self, id: &AccountId) -> (TokenAmount, TokenAmount) {
        self.ledger.balance_of(id)
    }

    pub fn loans_of(&self, borrower: &AccountId) -> Vec<Loan> {
        self.loans.loans_of(borrower)
    }

    pub fn round_info(&self, id: RoundId) -> Result<&GameRound> {
        self.games.round(id)
    }

    pub fn commitment_info(&self, id: CommitmentId) -> Result<CommitmentInfo> {
        self.fairness
            .get(id)
            .map(CommitmentInfo::from)
            .ok_or(Error::UnknownCommitment)
    }

    pub fn conservation_check(&self) -> bool {
        self.ledger.conservation_check()
    }

    pub fn state_hash(&self) -> Digest32 {
        crate::canonical::state_hash(self)
    }

    /// Publishes a commitment to `server_seed` and makes it the one new
    /// rounds draw from. The seed must come from a strong source.
    pub fn open_commitment(&mut self, server_seed: ServerSeed) -> Result<(CommitmentId, Digest32)> {
        self.ledger.ensure_initialized()?;
        Ok(self.fairness.open(server_seed))
    }

    pub fn apply(&mut self, command: Command) -> Result<Effect> {
        if !matches!(command, Command::InitializeBank { .. }) {
            self.ledger.ensure_initialized()?;
        }
        let Platform {
            config,
            ledger,
            loans,
            fairness,
            games,
        } = self;
        match command {
            Command::InitializeBank {
                owner,
                investment,
                rate,
            } => ledger.initialize_bank(owner, investment, rate).map(Effect::Bank),
            Command::TopUpBank { caller, amount } => {
                ledger.top_up_bank(&caller, amount).map(Effect::Bank)
            }
            Command::BuyTokens { buyer, base_amount } => ledger
                .buy_tokens(&buyer, base_amount)
                .map(|tokens| Effect::Purchased {
                    account: buyer,
                    tokens,
                }),
            Command::WithdrawTokens { caller, amount } => {
                let locked = if config.lending.strict {
                    loans.outstanding(&caller)
                } else {
                    TokenAmount::ZERO
                };
                ledger
                    .withdraw_tokens(&caller, amount, locked)
                    .map(|redemption| Effect::Withdrawn {
                        account: caller,
                        redemption,
                    })
            }
            Command::RequestLoan {
                borrower,
                principal,
                rate_percent,
            } => loans
                .request(ledger, &config.lending, &borrower, principal, rate_percent)
                .map(Effect::Loan),
            Command::DecideLoan {
                caller,
                loan_id,
                accept,
            } => loans.decide(ledger, &caller, loan_id, accept).map(Effect::Loan),
            Command::RepayLoan {
                borrower,
                loan_id,
                amount,
            } => loans.repay(ledger, &borrower, loan_id, amount).map(Effect::Loan),
            Command::RevealCommitment { commitment_id } => {
                fairness
                    .reveal(commitment_id)
                    .map(|server_seed| Effect::Revealed {
                        commitment_id,
                        server_seed,
                    })
            }
            Command::PlayDice {
                player,
                guess,
                stake,
                client_seed,
            } => games
                .play_dice(ledger, fairness, &player, guess, stake, client_seed)
                .map(Effect::Round),
            Command::PlaySlots {
                player,
                stake,
                client_seed,
            } => games
                .play_slots(ledger, fairness, &player, stake, client_seed)
                .map(Effect::Round),
            Command::PlayRoulette {
                player,
                number,
                color,
                stake,
                client_seed,
            } => {
                let guess = RouletteGuess::new(number, color)?;
                games
                    .play_roulette(ledger, fairness, &player, guess, stake, client_seed)
                    .map(Effect::Round)
            }
            Command::BlackjackStart {
                player,
                stake,
                client_seed,
            } => games
                .blackjack_start(ledger, fairness, &player, stake, client_seed)
                .map(Effect::Session),
            Command::BlackjackHit { player, session_id } => games
                .blackjack_hit(ledger, fairness, &player, session_id)
                .map(Effect::Session),
            Command::BlackjackStand { player, session_id } => games
                .blackjack_stand(ledger, fairness, &player, session_id)
                .map(Effect::Round),
        }
    }

    /// Unrevealed server seeds, for sealing into an encrypted snapshot.
    pub fn sealed_seeds(&self) -> Vec<(CommitmentId, ServerSeed)> {
        self.fairness.sealed_seeds()
    }

    /// Reattaches seeds after deserializing a snapshot. Revealed seeds are
    /// restored from the public record; sealed ones must be supplied.
    pub fn restore_seeds(
        &mut self,
        seeds: impl IntoIterator<Item = (CommitmentId, ServerSeed)>,
    ) -> Result<()> {
        self.fairness.restore_revealed_seeds();
        for (id, seed) in seeds {
            self.fairness.restore_seed(id, seed)?;
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn ledger_mut_for_test(&mut self) -> &mut Ledger {
        &mut self.ledger
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    #[test]
    fn conservation_detects_forced_mutation() {
        let mut p = Platform::default();
        assert!(p.conservation_check());
        p.apply(Command::InitializeBank {
            owner: id("own-1"),
            investment: TokenAmount(1000),
            rate: ExchangeRate::default(),
        })
        .unwrap();
        p.apply(Command::BuyTokens {
            buyer: id("p"),
            base_amount: 50,
        })
        .unwrap();
        assert!(p.conservation_check());
        let before = p.state_hash();
        p.ledger_mut_for_test().corrupt_balance_for_test(&id("p"), 1);
        assert!(!p.conservation_check());
        assert_ne!(p.state_hash(), before);
    }

    #[test]
    fn state_hash_is_stable_without_mutation() {
        let p = Platform::default();
        assert_eq!(p.state_hash(), p.state_hash());
    }
}
