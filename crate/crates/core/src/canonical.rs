//! Canonical state serialization and the state hash.
//!
//! Layout, all integers big-endian fixed width, strings as `u32` byte length
//! followed by UTF-8 bytes, sequences as `u32` count followed by items:
//!
//! ```text
//! "casino-state/v1"
//! bank:         initialized u8, owner str ("" if none), reserve u64,
//!               bank_escrowed u64, tokens_per_base_unit u64
//! supply:       issued u64, redeemed u64
//! accounts:     seq sorted by id of (id str, balance u64, escrowed u64)
//! loans:        seq sorted by loan_id of (loan_id u64, borrower str,
//!               principal u64, rate u32, owed u64, status u8)
//! open rounds:  seq sorted by round_id of (round_id u64, player str, kind u8,
//!               stake u64, player_escrow u64, bank_escrow u64,
//!               commitment_id u64, client_seed str, nonces seq<u64>,
//!               player_cards seq<u8>, dealer_cards seq<u8>)
//! commitments:  seq sorted by id of (id u64, commit_hash [32], next_nonce u64,
//!               open_rounds u32, revealed u8)
//! counters:     next_loan_id u64, next_round_id u64, next_commitment_id u64,
//!               active_commitment (u8 flag, u64)
//! ```
//!
//! Settled rounds are history and are not part of the state.

use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::fairness::Digest32;
use crate::games::{Outcome, Rank};
use crate::lending::LoanStatus;
use crate::platform::Platform;

pub const MAGIC: &[u8] = b"casino-state/v1";

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_be_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_be_bytes());
    }

    fn bytes(&mut self, b: &[u8]) {
        self.u32(b.len() as u32);
        self.0.extend_from_slice(b);
    }

    fn cards(&mut self, cards: &[Rank]) {
        self.u32(cards.len() as u32);
        for c in cards {
            self.u8(c.index());
        }
    }
}

fn status_code(status: LoanStatus) -> u8 {
    match status {
        LoanStatus::Requested => 0,
        LoanStatus::Approved => 1,
        LoanStatus::Rejected => 2,
        LoanStatus::Repaid => 3,
    }
}

pub fn canonical_bytes(platform: &Platform) -> Vec<u8> {
    let mut w = Writer::default();
    w.0.extend_from_slice(MAGIC);

    let ledger = platform.ledger();
    let bank = ledger.bank();
    w.u8(bank.initialized as u8);
    w.bytes(bank.owner.as_ref().map_or(&[][..], |o| o.as_str().as_bytes()));
    w.u64(bank.reserve.get());
    w.u64(bank.bank_escrowed.get());
    w.u64(ledger.rate().tokens_per_base_unit());
    w.u64(ledger.issued().get());
    w.u64(ledger.redeemed().get());

    let accounts: Vec<_> = ledger.accounts().collect();
    w.u32(accounts.len() as u32);
    for a in accounts {
        w.bytes(a.id.as_str().as_bytes());
        w.u64(a.balance.get());
        w.u64(a.escrowed.get());
    }

    let loans: Vec<_> = platform.loans().all().collect();
    w.u32(loans.len() as u32);
    for l in loans {
        w.u64(l.loan_id.0);
        w.bytes(l.borrower.as_str().as_bytes());
        w.u64(l.principal.get());
        w.u32(l.rate.0);
        w.u64(l.owed.get());
        w.u8(status_code(l.status));
    }

    let open: Vec<_> = platform.games().open_rounds().collect();
    w.u32(open.len() as u32);
    for r in open {
        w.u64(r.round_id.0);
        w.bytes(r.player.as_str().as_bytes());
        w.u8(r.kind.code());
        w.u64(r.stake.get());
        w.u64(r.player_escrow.get());
        w.u64(r.bank_escrow.get());
        w.u64(r.randomness.commitment_id.0);
        w.bytes(r.randomness.client_seed.as_bytes());
        w.u32(r.randomness.nonces.len() as u32);
        for n in &r.randomness.nonces {
            w.u64(*n);
        }
        match &r.outcome {
            Outcome::Blackjack {
                player_cards,
                dealer_cards,
                ..
            } => {
                w.cards(player_cards);
                w.cards(dealer_cards);
            }
            _ => {
                w.cards(&[]);
                w.cards(&[]);
            }
        }
    }

    let commitments: Vec<_> = platform.fairness().iter().collect();
    w.u32(commitments.len() as u32);
    for c in commitments {
        w.u64(c.id.0);
        w.0.extend_from_slice(&c.commit_hash);
        w.u64(c.next_nonce);
        w.u32(c.open_rounds);
        w.u8(c.revealed() as u8);
    }

    w.u64(platform.loans().next_id());
    w.u64(platform.games().next_round_id().0);
    w.u64(platform.fairness().next_id().0);
    match platform.fairness().active() {
        Some(id) => {
            w.u8(1);
            w.u64(id.0);
        }
        None => {
            w.u8(0);
            w.u64(0);
        }
    }
    w.0
}

pub fn state_hash(platform: &Platform) -> Digest32 {
    Sha256::digest(canonical_bytes(platform)).into()
}
