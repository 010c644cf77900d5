//! Token accounting: player accounts, the bank reserve, purchase and
//! redemption against the base currency, and escrow holds for open rounds.
//!
//! Every token in existence sits in exactly one of four places: a player's
//! free balance, a player's escrow, the bank reserve, or the bank's escrow.
//! [`Ledger::conservation_check`] verifies that these add up to everything
//! ever issued minus everything redeemed.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ACCOUNT_ID_LEN: usize = 64;
pub const MIN_PURCHASE: u64 = 10;
pub const MAX_PURCHASE: u64 = 1000;

/// Opaque account identifier, 1 to 64 characters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AccountId(String);

impl AccountId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().count() > MAX_ACCOUNT_ID_LEN {
            return Err(Error::InvalidAccountId);
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for AccountId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Self::new(value)
    }
}

impl TryFrom<&str> for AccountId {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        Self::new(value)
    }
}

impl From<AccountId> for String {
    fn from(id: AccountId) -> Self {
        id.0
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A whole number of platform tokens. Arithmetic is checked.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TokenAmount(pub u64);

impl TokenAmount {
    pub const ZERO: TokenAmount = TokenAmount(0);

    pub const fn new(value: u64) -> Self {
        Self(value)
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn checked_add(self, other: TokenAmount) -> Result<TokenAmount> {
        self.0.checked_add(other.0).map(TokenAmount).ok_or(Error::Overflow)
    }

    pub fn checked_sub(self, other: TokenAmount) -> Option<TokenAmount> {
        self.0.checked_sub(other.0).map(TokenAmount)
    }

    pub fn checked_mul(self, factor: u64) -> Result<TokenAmount> {
        self.0.checked_mul(factor).map(TokenAmount).ok_or(Error::Overflow)
    }
}

impl fmt::Display for TokenAmount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Tokens minted per unit of base currency. Fixed once the bank exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct ExchangeRate(u64);

impl ExchangeRate {
    pub fn new(tokens_per_base_unit: u64) -> Result<Self> {
        if tokens_per_base_unit == 0 {
            return Err(Error::InvalidExchangeRate);
        }
        Ok(Self(tokens_per_base_unit))
    }

    pub fn tokens_per_base_unit(self) -> u64 {
        self.0
    }
}

impl Default for ExchangeRate {
    fn default() -> Self {
        Self(1)
    }
}

impl TryFrom<u64> for ExchangeRate {
    type Error = Error;

    fn try_from(value: u64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<ExchangeRate> for u64 {
    fn from(rate: ExchangeRate) -> Self {
        rate.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    pub id: AccountId,
    pub balance: TokenAmount,
    pub escrowed: TokenAmount,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankState {
    pub owner: Option<AccountId>,
    pub reserve: TokenAmount,
    pub bank_escrowed: TokenAmount,
    pub initialized: bool,
}

/// Result of a redemption: tokens burned and base units paid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Redemption {
    pub tokens: TokenAmount,
    pub base_units: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    bank: BankState,
    rate: ExchangeRate,
    accounts: BTreeMap<AccountId, Account>,
    /// Investment plus top-ups plus tokens bought.
    issued: TokenAmount,
    /// Tokens withdrawn back into base currency.
    redeemed: TokenAmount,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bank(&self) -> &BankState {
        &self.bank
    }

    pub fn rate(&self) -> ExchangeRate {
        self.rate
    }

    pub fn issued(&self) -> TokenAmount {
        self.issued
    }

    pub fn redeemed(&self) -> TokenAmount {
        self.redeemed
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    pub fn account(&self, id: &AccountId) -> Option<&Account> {
        self.accounts.get(id)
    }

    pub fn is_owner(&self, id: &AccountId) -> bool {
        self.bank.owner.as_ref() == Some(id)
    }

    pub fn ensure_initialized(&self) -> Result<()> {
        if self.bank.initialized {
            Ok(())
        } else {
            Err(Error::NotInitialized)
        }
    }

    pub fn ensure_owner(&self, caller: &AccountId) -> Result<()> {
        if self.is_owner(caller) {
            Ok(())
        } else {
            Err(Error::NotOwner)
        }
    }

    fn existing(&self, id: &AccountId) -> Result<&Account> {
        self.accounts.get(id).ok_or(Error::UnknownAccount)
    }

    pub fn initialize_bank(
        &mut self,
        owner: AccountId,
        investment: TokenAmount,
        rate: ExchangeRate,
    ) -> Result<BankState> {
        if self.bank.initialized {
            return Err(Error::AlreadyInitialized);
        }
        if investment.is_zero() {
            return Err(Error::ZeroInvestment);
        }
        self.bank = BankState {
            owner: Some(owner),
            reserve: investment,
            bank_escrowed: TokenAmount::ZERO,
            initialized: true,
        };
        self.rate = rate;
        self.issued = investment;
        Ok(self.bank.clone())
    }

    pub fn top_up_bank(&mut self, caller: &AccountId, amount: TokenAmount) -> Result<BankState> {
        self.ensure_initialized()?;
        self.ensure_owner(caller)?;
        if amount.is_zero() {
            return Err(Error::ZeroAmount);
        }
        let reserve = self.bank.reserve.checked_add(amount)?;
        let issued = self.issued.checked_add(amount)?;
        self.bank.reserve = reserve;
        self.issued = issued;
        Ok(self.bank.clone())
    }

    /// Converts `base_amount` base units into tokens for `buyer`, opening the
    /// account on first purchase. Returns the tokens credited.
    pub fn buy_tokens(&mut self, buyer: &AccountId, base_amount: u64) -> Result<TokenAmount> {
        self.ensure_initialized()?;
        let tokens = base_amount
            .checked_mul(self.rate.tokens_per_base_unit())
            .ok_or(Error::AboveMaximumPurchase)?;
        if tokens < MIN_PURCHASE {
            return Err(Error::BelowMinimumPurchase);
        }
        if tokens > MAX_PURCHASE {
            return Err(Error::AboveMaximumPurchase);
        }
        let tokens = TokenAmount(tokens);
        let current = self.accounts.get(buyer).map_or(TokenAmount::ZERO, |a| a.balance);
        let balance = current.checked_add(tokens)?;
        let issued = self.issued.checked_add(tokens)?;

        self.issued = issued;
        self.accounts
            .entry(buyer.clone())
            .or_insert_with(|| Account {
                id: buyer.clone(),
                balance: TokenAmount::ZERO,
                escrowed: TokenAmount::ZERO,
            })
            .balance = balance;
        Ok(tokens)
    }

    /// Burns `amount` of the caller's free balance. `locked` tokens of the
    /// balance are not withdrawable (strict lending mode).
    pub fn withdraw_tokens(
        &mut self,
        caller: &AccountId,
        amount: TokenAmount,
        locked: TokenAmount,
    ) -> Result<Redemption> {
        self.ensure_initialized()?;
        let account = self.existing(caller)?;
        if amount.is_zero() {
            return Err(Error::ZeroAmount);
        }
        let remaining = account.balance.checked_sub(amount).ok_or(Error::InsufficientBalance)?;
        if remaining < locked {
            return Err(Error::DebtOutstanding);
        }
        let rate = self.rate.tokens_per_base_unit();
        if amount.0 % rate != 0 {
            return Err(Error::NotRateMultiple);
        }
        let redeemed = self.redeemed.checked_add(amount)?;

        self.redeemed = redeemed;
        if let Some(account) = self.accounts.get_mut(caller) {
            account.balance = remaining;
        }
        Ok(Redemption {
            tokens: amount,
            base_units: amount.0 / rate,
        })
    }

    /// `(balance, escrowed)`; zeros for unknown accounts.
    pub fn balance_of(&self, id: &AccountId) -> (TokenAmount, TokenAmount) {
        self.accounts
            .get(id)
            .map_or((TokenAmount::ZERO, TokenAmount::ZERO), |a| (a.balance, a.escrowed))
    }

    /// Checks that `player` can stake `stake` and the bank can match it with
    /// `bank_part`, without moving anything.
    pub fn check_hold(
        &self,
        player: &AccountId,
        stake: TokenAmount,
        bank_part: TokenAmount,
    ) -> Result<()> {
        let account = self.existing(player)?;
        if account.balance < stake {
            return Err(Error::InsufficientBalance);
        }
        if self.bank.reserve < bank_part {
            return Err(Error::InsufficientReserve);
        }
        account.escrowed.checked_add(stake)?;
        self.bank.bank_escrowed.checked_add(bank_part)?;
        Ok(())
    }

    /// Moves the stake and the bank's matching contribution into escrow.
    pub fn hold(
        &mut self,
        player: &AccountId,
        stake: TokenAmount,
        bank_part: TokenAmount,
    ) -> Result<()> {
        self.check_hold(player, stake, bank_part)?;
        let account = self.accounts.get_mut(player).ok_or(Error::UnknownAccount)?;
        account.balance.0 -= stake.0;
        account.escrowed.0 += stake.0;
        self.bank.reserve.0 -= bank_part.0;
        self.bank.bank_escrowed.0 += bank_part.0;
        Ok(())
    }

    /// Distributes the whole escrow pool: `gross_payout` to the player and
    /// the remainder to the reserve.
    pub fn settle(
        &mut self,
        player: &AccountId,
        stake: TokenAmount,
        bank_part: TokenAmount,
        gross_payout: TokenAmount,
    ) -> Result<()> {
        let pool = stake.checked_add(bank_part)?;
        let to_reserve = pool.checked_sub(gross_payout).ok_or(Error::Overflow)?;
        let account = self.existing(player)?;
        let escrowed = account.escrowed.checked_sub(stake).ok_or(Error::Overflow)?;
        let balance = account.balance.checked_add(gross_payout)?;
        let bank_escrowed =
            self.bank.bank_escrowed.checked_sub(bank_part).ok_or(Error::Overflow)?;
        let reserve = self.bank.reserve.checked_add(to_reserve)?;

        let account = self.accounts.get_mut(player).ok_or(Error::UnknownAccount)?;
        account.escrowed = escrowed;
        account.balance = balance;
        self.bank.bank_escrowed = bank_escrowed;
        self.bank.reserve = reserve;
        Ok(())
    }

    /// Moves `amount` from the free reserve into `to`'s balance.
    pub fn pay_from_reserve(&mut self, to: &AccountId, amount: TokenAmount) -> Result<()> {
        let account = self.existing(to)?;
        let reserve = self.bank.reserve.checked_sub(amount).ok_or(Error::InsufficientReserve)?;
        let balance = account.balance.checked_add(amount)?;
        self.bank.reserve = reserve;
        if let Some(account) = self.accounts.get_mut(to) {
            account.balance = balance;
        }
        Ok(())
    }

    /// Moves `amount` from `from`'s free balance into the reserve.
    pub fn pay_to_reserve(&mut self, from: &AccountId, amount: TokenAmount) -> Result<()> {
        let account = self.existing(from)?;
        let balance = account.balance.checked_sub(amount).ok_or(Error::InsufficientBalance)?;
        let reserve = self.bank.reserve.checked_add(amount)?;
        self.bank.reserve = reserve;
        if let Some(account) = self.accounts.get_mut(from) {
            account.balance = balance;
        }
        Ok(())
    }

    /// reserve + bank escrow + Σ balances + Σ player escrow
    /// == investment + top-ups + bought − withdrawn
    pub fn conservation_check(&self) -> bool {
        let held: u128 = self
            .accounts
            .values()
            .map(|a| a.balance.0 as u128 + a.escrowed.0 as u128)
            .sum::<u128>()
            + self.bank.reserve.0 as u128
            + self.bank.bank_escrowed.0 as u128;
        let outstanding = self.issued.0 as i128 - self.redeemed.0 as i128;
        outstanding >= 0 && held == outstanding as u128
    }

    #[cfg(test)]
    pub(crate) fn corrupt_balance_for_test(&mut self, id: &AccountId, delta: u64) {
        if let Some(account) = self.accounts.get_mut(id) {
            account.balance.0 += delta;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    fn bank() -> Ledger {
        let mut ledger = Ledger::new();
        ledger
            .initialize_bank(id("own-1"), TokenAmount(100_000), ExchangeRate::default())
            .unwrap();
        ledger
    }

    #[test]
    fn account_id_bounds() {
        assert_eq!(AccountId::new(""), Err(Error::InvalidAccountId));
        assert!(AccountId::new("a".repeat(64)).is_ok());
        assert_eq!(AccountId::new("a".repeat(65)), Err(Error::InvalidAccountId));
    }

    #[test]
    fn initialize_once() {
        let mut ledger = bank();
        assert_eq!(ledger.bank().reserve, TokenAmount(100_000));
        assert!(ledger.is_owner(&id("own-1")));
        assert_eq!(
            ledger.initialize_bank(id("own-1"), TokenAmount(5), ExchangeRate::default()),
            Err(Error::AlreadyInitialized)
        );
        let mut fresh = Ledger::new();
        assert_eq!(
            fresh.initialize_bank(id("o"), TokenAmount::ZERO, ExchangeRate::default()),
            Err(Error::ZeroInvestment)
        );
        assert!(fresh.conservation_check());
    }

    #[test]
    fn nothing_works_before_init() {
        let mut ledger = Ledger::new();
        assert_eq!(ledger.buy_tokens(&id("p"), 10), Err(Error::NotInitialized));
        assert_eq!(ledger.top_up_bank(&id("p"), TokenAmount(1)), Err(Error::NotInitialized));
    }

    #[test]
    fn top_up_rules() {
        let mut ledger = bank();
        ledger.top_up_bank(&id("own-1"), TokenAmount(500)).unwrap();
        assert_eq!(ledger.bank().reserve, TokenAmount(100_500));
        assert_eq!(ledger.top_up_bank(&id("p"), TokenAmount(5)), Err(Error::NotOwner));
        assert_eq!(ledger.top_up_bank(&id("own-1"), TokenAmount(0)), Err(Error::ZeroAmount));
        assert!(ledger.conservation_check());
    }

    #[test]
    fn purchases_accumulate() {
        let mut ledger = bank();
        let p = id("p");
        assert_eq!(ledger.balance_of(&p), (TokenAmount(0), TokenAmount(0)));
        ledger.buy_tokens(&p, 10).unwrap();
        ledger.buy_tokens(&p, 20).unwrap();
        assert_eq!(ledger.balance_of(&p).0, TokenAmount(30));
        assert_eq!(ledger.buy_tokens(&p, 9), Err(Error::BelowMinimumPurchase));
        assert_eq!(ledger.buy_tokens(&p, 1001), Err(Error::AboveMaximumPurchase));
        assert_eq!(ledger.buy_tokens(&p, u64::MAX), Err(Error::AboveMaximumPurchase));
        assert!(ledger.conservation_check());
    }

    #[test]
    fn rate_scales_purchase_and_redemption() {
        let mut ledger = Ledger::new();
        ledger
            .initialize_bank(id("o"), TokenAmount(1000), ExchangeRate::new(5).unwrap())
            .unwrap();
        let p = id("p");
        assert_eq!(ledger.buy_tokens(&p, 1), Err(Error::BelowMinimumPurchase));
        assert_eq!(ledger.buy_tokens(&p, 2).unwrap(), TokenAmount(10));
        assert_eq!(ledger.buy_tokens(&p, 201), Err(Error::AboveMaximumPurchase));
        assert_eq!(
            ledger.withdraw_tokens(&p, TokenAmount(3), TokenAmount::ZERO),
            Err(Error::NotRateMultiple)
        );
        let out = ledger.withdraw_tokens(&p, TokenAmount(10), TokenAmount::ZERO).unwrap();
        assert_eq!(out.base_units, 2);
        assert!(ledger.conservation_check());
        assert_eq!(ExchangeRate::new(0), Err(Error::InvalidExchangeRate));
    }

    #[test]
    fn withdraw_rules() {
        let mut ledger = bank();
        let p = id("p");
        ledger.buy_tokens(&p, 50).unwrap();
        assert_eq!(
            ledger.withdraw_tokens(&p, TokenAmount(51), TokenAmount::ZERO),
            Err(Error::InsufficientBalance)
        );
        assert_eq!(
            ledger.withdraw_tokens(&p, TokenAmount(0), TokenAmount::ZERO),
            Err(Error::ZeroAmount)
        );
        assert_eq!(
            ledger.withdraw_tokens(&id("q"), TokenAmount(1), TokenAmount::ZERO),
            Err(Error::UnknownAccount)
        );
        assert_eq!(
            ledger.withdraw_tokens(&p, TokenAmount(30), TokenAmount(25)),
            Err(Error::DebtOutstanding)
        );
        let out = ledger.withdraw_tokens(&p, TokenAmount(50), TokenAmount::ZERO).unwrap();
        assert_eq!(out.base_units, 50);
        assert_eq!(ledger.balance_of(&p), (TokenAmount(0), TokenAmount(0)));
        assert!(ledger.conservation_check());
    }

    #[test]
    fn escrow_hold_and_settle() {
        let mut ledger = bank();
        let p = id("p");
        ledger.buy_tokens(&p, 100).unwrap();
        ledger.hold(&p, TokenAmount(10), TokenAmount(10)).unwrap();
        assert_eq!(ledger.balance_of(&p), (TokenAmount(90), TokenAmount(10)));
        assert_eq!(ledger.bank().bank_escrowed, TokenAmount(10));
        assert!(ledger.conservation_check());
        assert_eq!(
            ledger.withdraw_tokens(&p, TokenAmount(91), TokenAmount::ZERO),
            Err(Error::InsufficientBalance)
        );
        ledger.settle(&p, TokenAmount(10), TokenAmount(10), TokenAmount(20)).unwrap();
        assert_eq!(ledger.balance_of(&p), (TokenAmount(110), TokenAmount(0)));
        assert_eq!(ledger.bank().reserve, TokenAmount(99_990));
        assert!(ledger.conservation_check());
    }

    #[test]
    fn hold_refusals_leave_state_alone() {
        let mut ledger = bank();
        let p = id("p");
        ledger.buy_tokens(&p, 10).unwrap();
        let before = ledger.clone();
        assert_eq!(
            ledger.hold(&p, TokenAmount(11), TokenAmount(0)),
            Err(Error::InsufficientBalance)
        );
        assert_eq!(
            ledger.hold(&p, TokenAmount(10), TokenAmount(100_001)),
            Err(Error::InsufficientReserve)
        );
        assert_eq!(ledger, before);
    }

    #[test]
    fn corrupted_ledger_fails_conservation() {
        let mut ledger = bank();
        let p = id("p");
        ledger.buy_tokens(&p, 10).unwrap();
        assert!(ledger.conservation_check());
        ledger.corrupt_balance_for_test(&p, 1);
        assert!(!ledger.conservation_check());
    }
}
