//! Loan lifecycle: Requested → Approved → Repaid, or Requested → Rejected.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::{AccountId, Ledger, TokenAmount};

pub const MIN_PRINCIPAL: u64 = 100;
pub const MAX_PRINCIPAL: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LoanId(pub u64);

impl fmt::Display for LoanId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InterestRatePercent(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoanStatus {
    Requested,
    Approved,
    Rejected,
    Repaid,
}

impl LoanStatus {
    pub fn is_live(self) -> bool {
        matches!(self, LoanStatus::Requested | LoanStatus::Approved)
    }

    /// Whether `self -> next` is an edge of the lifecycle.
    pub fn can_become(self, next: LoanStatus) -> bool {
        use LoanStatus::*;
        matches!(
            (self, next),
            (Requested, Approved) | (Requested, Rejected) | (Approved, Repaid)
        )
    }
}

/// Lending knobs. The accepted interest interval and the strict flag that
/// stops borrowers from withdrawing tokens they still owe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LendingPolicy {
    pub min_rate_percent: u32,
    pub max_rate_percent: u32,
    pub strict: bool,
}

impl Default for LendingPolicy {
    fn default() -> Self {
        Self {
            min_rate_percent: 1,
            max_rate_percent: 20,
            strict: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Loan {
    pub loan_id: LoanId,
    pub borrower: AccountId,
    pub principal: TokenAmount,
    pub rate: InterestRatePercent,
    pub owed: TokenAmount,
    pub status: LoanStatus,
}

/// Simple interest recorded once at approval: principal + ⌊principal·rate/100⌋.
pub fn amount_owed(principal: TokenAmount, rate: InterestRatePercent) -> Result<TokenAmount> {
    let interest = (principal.0 as u128 * rate.0 as u128) / 100;
    let interest = u64::try_from(interest).map_err(|_| Error::Overflow)?;
    principal.checked_add(TokenAmount(interest))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoanBook {
    loans: BTreeMap<LoanId, Loan>,
    next_id: u64,
}

impl Default for LoanBook {
    fn default() -> Self {
        Self {
            loans: BTreeMap::new(),
            next_id: 1,
        }
    }
}

impl LoanBook {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: LoanId) -> Option<&Loan> {
        self.loans.get(&id)
    }

    pub fn all(&self) -> impl DoubleEndedIterator<Item = &Loan> {
        self.loans.values()
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    /// Newest first.
    pub fn loans_of(&self, borrower: &AccountId) -> Vec<Loan> {
        self.loans
            .values()
            .rev()
            .filter(|l| &l.borrower == borrower)
            .cloned()
            .collect()
    }

    /// Tokens still owed across the borrower's approved loans.
    pub fn outstanding(&self, borrower: &AccountId) -> TokenAmount {
        TokenAmount(
            self.loans
                .values()
                .filter(|l| &l.borrower == borrower && l.status == LoanStatus::Approved)
                .map(|l| l.owed.0)
                .fold(0u64, u64::saturating_add),
        )
    }

    pub fn request(
        &mut self,
        ledger: &Ledger,
        policy: &LendingPolicy,
        borrower: &AccountId,
        principal: TokenAmount,
        rate: InterestRatePercent,
    ) -> Result<Loan> {
        if ledger.account(borrower).is_none() {
            return Err(Error::UnknownAccount);
        }
        if !(MIN_PRINCIPAL..=MAX_PRINCIPAL).contains(&principal.0) {
            return Err(Error::PrincipalOutOfBounds);
        }
        if !(policy.min_rate_percent..=policy.max_rate_percent).contains(&rate.0) {
            return Err(Error::RateOutOfBounds);
        }
        if self
            .loans
            .values()
            .any(|l| &l.borrower == borrower && l.status.is_live())
        {
            return Err(Error::ExistingLiveLoan);
        }
        let loan = Loan {
            loan_id: LoanId(self.next_id),
            borrower: borrower.clone(),
            principal,
            rate,
            owed: TokenAmount::ZERO,
            status: LoanStatus::Requested,
        };
        self.next_id += 1;
        self.loans.insert(loan.loan_id, loan.clone());
        Ok(loan)
    }

    pub fn decide(
        &mut self,
        ledger: &mut Ledger,
        caller: &AccountId,
        id: LoanId,
        accept: bool,
    ) -> Result<Loan> {
        ledger.ensure_owner(caller)?;
        let loan = self.loans.get(&id).ok_or(Error::UnknownLoan)?;
        if loan.status != LoanStatus::Requested {
            return Err(Error::NotRequested);
        }
        let (status, owed) = if accept {
            if ledger.bank().reserve < loan.principal {
                return Err(Error::InsufficientReserve);
            }
            let owed = amount_owed(loan.principal, loan.rate)?;
            ledger.pay_from_reserve(&loan.borrower, loan.principal)?;
            (LoanStatus::Approved, owed)
        } else {
            (LoanStatus::Rejected, TokenAmount::ZERO)
        };
        let loan = self.loans.get_mut(&id).ok_or(Error::UnknownLoan)?;
        loan.status = status;
        loan.owed = owed;
        Ok(loan.clone())
    }

    pub fn repay(
        &mut self,
        ledger: &mut Ledger,
        borrower: &AccountId,
        id: LoanId,
        amount: TokenAmount,
    ) -> Result<Loan> {
        let loan = self.loans.get(&id).ok_or(Error::UnknownLoan)?;
        if &loan.borrower != borrower {
            return Err(Error::NotYourLoan);
        }
        if loan.status != LoanStatus::Approved {
            return Err(Error::NotApproved);
        }
        if amount.is_zero() {
            return Err(Error::ZeroAmount);
        }
        let owed = loan.owed.checked_sub(amount).ok_or(Error::Overpayment)?;
        ledger.pay_to_reserve(borrower, amount)?;
        let loan = self.loans.get_mut(&id).ok_or(Error::UnknownLoan)?;
        loan.owed = owed;
        if owed.is_zero() {
            loan.status = LoanStatus::Repaid;
        }
        Ok(loan.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::ExchangeRate;

    fn id(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    fn setup() -> (Ledger, LoanBook) {
        let mut ledger = Ledger::new();
        ledger
            .initialize_bank(id("owner"), TokenAmount(100_000), ExchangeRate::default())
            .unwrap();
        ledger.buy_tokens(&id("p"), 100).unwrap();
        (ledger, LoanBook::new())
    }

    #[test]
    fn owed_formula() {
        assert_eq!(
            amount_owed(TokenAmount(500), InterestRatePercent(10)).unwrap(),
            TokenAmount(550)
        );
        assert_eq!(
            amount_owed(TokenAmount(101), InterestRatePercent(7)).unwrap(),
            TokenAmount(108)
        );
    }

    #[test]
    fn request_bounds() {
        let (ledger, mut book) = setup();
        let policy = LendingPolicy::default();
        let p = id("p");
        let r = |book: &mut LoanBook, principal, rate| {
            book.request(&ledger, &policy, &p, TokenAmount(principal), InterestRatePercent(rate))
        };
        assert_eq!(r(&mut book, 50, 10), Err(Error::PrincipalOutOfBounds));
        assert_eq!(r(&mut book, 10_001, 10), Err(Error::PrincipalOutOfBounds));
        assert_eq!(r(&mut book, 500, 0), Err(Error::RateOutOfBounds));
        assert_eq!(r(&mut book, 500, 21), Err(Error::RateOutOfBounds));
        let loan = r(&mut book, 500, 10).unwrap();
        assert_eq!(loan.status, LoanStatus::Requested);
        assert_eq!(loan.owed, TokenAmount::ZERO);
        assert_eq!(r(&mut book, 500, 10), Err(Error::ExistingLiveLoan));
        assert_eq!(
            book.request(&ledger, &policy, &id("ghost"), TokenAmount(500), InterestRatePercent(5)),
            Err(Error::UnknownAccount)
        );
    }

    #[test]
    fn accept_and_repay() {
        let (mut ledger, mut book) = setup();
        let p = id("p");
        let loan = book
            .request(&ledger, &LendingPolicy::default(), &p, TokenAmount(500), InterestRatePercent(10))
            .unwrap();
        assert_eq!(
            book.decide(&mut ledger, &p, loan.loan_id, true),
            Err(Error::NotOwner)
        );
        let loan = book.decide(&mut ledger, &id("owner"), loan.loan_id, true).unwrap();
        assert_eq!(loan.owed, TokenAmount(550));
        assert_eq!(ledger.balance_of(&p).0, TokenAmount(600));
        assert_eq!(ledger.bank().reserve, TokenAmount(99_500));
        assert_eq!(book.outstanding(&p), TokenAmount(550));

        assert_eq!(
            book.repay(&mut ledger, &p, loan.loan_id, TokenAmount(600)),
            Err(Error::Overpayment)
        );
        let loan = book.repay(&mut ledger, &p, loan.loan_id, TokenAmount(200)).unwrap();
        assert_eq!((loan.owed, loan.status), (TokenAmount(350), LoanStatus::Approved));
        let loan = book.repay(&mut ledger, &p, loan.loan_id, TokenAmount(350)).unwrap();
        assert_eq!((loan.owed, loan.status), (TokenAmount(0), LoanStatus::Repaid));
        assert_eq!(ledger.bank().reserve, TokenAmount(100_050));
        assert!(ledger.conservation_check());
        assert_eq!(
            book.repay(&mut ledger, &p, loan.loan_id, TokenAmount(1)),
            Err(Error::NotApproved)
        );
    }

    #[test]
    fn reject_moves_nothing() {
        let (mut ledger, mut book) = setup();
        let p = id("p");
        let loan = book
            .request(&ledger, &LendingPolicy::default(), &p, TokenAmount(500), InterestRatePercent(10))
            .unwrap();
        let before = ledger.clone();
        let loan = book.decide(&mut ledger, &id("owner"), loan.loan_id, false).unwrap();
        assert_eq!(loan.status, LoanStatus::Rejected);
        assert_eq!(ledger, before);
        assert_eq!(
            book.decide(&mut ledger, &id("owner"), loan.loan_id, true),
            Err(Error::NotRequested)
        );
        // a rejected loan is no longer live
        assert!(book
            .request(&ledger, &LendingPolicy::default(), &p, TokenAmount(100), InterestRatePercent(1))
            .is_ok());
        assert_eq!(book.loans_of(&p)[0].loan_id, LoanId(2));
    }

    #[test]
    fn accept_needs_reserve() {
        let mut ledger = Ledger::new();
        ledger
            .initialize_bank(id("owner"), TokenAmount(150), ExchangeRate::default())
            .unwrap();
        ledger.buy_tokens(&id("p"), 10).unwrap();
        let mut book = LoanBook::new();
        let loan = book
            .request(&ledger, &LendingPolicy::default(), &id("p"), TokenAmount(200), InterestRatePercent(5))
            .unwrap();
        assert_eq!(
            book.decide(&mut ledger, &id("owner"), loan.loan_id, true),
            Err(Error::InsufficientReserve)
        );
        assert_eq!(book.get(loan.loan_id).unwrap().status, LoanStatus::Requested);
    }

    #[test]
    fn repay_by_stranger_refused() {
        let (mut ledger, mut book) = setup();
        ledger.buy_tokens(&id("q"), 100).unwrap();
        let loan = book
            .request(&ledger, &LendingPolicy::default(), &id("p"), TokenAmount(100), InterestRatePercent(1))
            .unwrap();
        book.decide(&mut ledger, &id("owner"), loan.loan_id, true).unwrap();
        assert_eq!(
            book.repay(&mut ledger, &id("q"), loan.loan_id, TokenAmount(10)),
            Err(Error::NotYourLoan)
        );
    }

    #[test]
    fn lifecycle_edges() {
        use LoanStatus::*;
        let all = [Requested, Approved, Rejected, Repaid];
        let allowed: Vec<_> = all
            .iter()
            .flat_map(|a| all.iter().map(move |b| (*a, *b)))
            .filter(|(a, b)| a.can_become(*b))
            .collect();
        assert_eq!(
            allowed,
            [(Requested, Approved), (Requested, Rejected), (Approved, Repaid)]
        );
    }
}
