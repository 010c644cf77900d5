//! Escrowed game rounds.
//!
//! Every round locks the player's stake and the bank's matching share of
//! the maximum payout before any randomness is drawn. Settlement always
//! distributes the whole pool: gross payout to the player, the rest back
//! to the reserve.

pub mod rules;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fairness::{ClientSeed, CommitmentId, CommitmentTable};
use crate::ledger::{AccountId, Ledger, TokenAmount};

pub use rules::{BlackjackResult, Color, GameKind, Rank, RouletteGuess};
use rules::{
    blackjack_result, dice_multiplier, hand_points, roulette_multiplier, slots_multiplier,
    BLACKJACK_LIMIT, DEALER_STANDS_AT, MAX_STAKE, POCKETS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RoundId(pub u64);

impl fmt::Display for RoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Everything a verifier needs besides the revealed seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomnessRecord {
    pub commitment_id: CommitmentId,
    pub client_seed: ClientSeed,
    /// In draw order. Blackjack: two player cards, the dealer card, player
    /// hits, then dealer draws.
    pub nonces: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "game", rename_all = "snake_case")]
pub enum Outcome {
    Dice {
        guess: u8,
        roll: u8,
    },
    Slots {
        digits: [u8; 3],
    },
    Roulette {
        guess: RouletteGuess,
        pocket: u8,
    },
    Blackjack {
        player_cards: Vec<Rank>,
        dealer_cards: Vec<Rank>,
        player_points: u32,
        dealer_points: u32,
        result: Option<BlackjackResult>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRound {
    pub round_id: RoundId,
    pub player: AccountId,
    pub kind: GameKind,
    pub stake: TokenAmount,
    pub player_escrow: TokenAmount,
    pub bank_escrow: TokenAmount,
    pub randomness: RandomnessRecord,
    pub outcome: Outcome,
    pub gross_payout: TokenAmount,
    pub settled: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    PlayerTurn,
    Settled,
}

/// Player-facing view of a blackjack round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlackjackSession {
    pub session_id: RoundId,
    pub player: AccountId,
    pub stake: TokenAmount,
    pub player_cards: Vec<Rank>,
    pub dealer_cards: Vec<Rank>,
    pub player_points: u32,
    pub dealer_points: u32,
    pub phase: Phase,
    pub result: Option<BlackjackResult>,
    pub gross_payout: Option<TokenAmount>,
}

impl BlackjackSession {
    fn from_round(round: &GameRound) -> Option<Self> {
        let Outcome::Blackjack {
            player_cards,
            dealer_cards,
            player_points,
            dealer_points,
            result,
        } = &round.outcome
        else {
            return None;
        };
        Some(Self {
            session_id: round.round_id,
            player: round.player.clone(),
            stake: round.stake,
            player_cards: player_cards.clone(),
            dealer_cards: dealer_cards.clone(),
            player_points: *player_points,
            dealer_points: *dealer_points,
            phase: if round.settled {
                Phase::Settled
            } else {
                Phase::PlayerTurn
            },
            result: *result,
            gross_payout: round.settled.then_some(round.gross_payout),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTable {
    rounds: BTreeMap<RoundId, GameRound>,
    open_sessions: BTreeMap<AccountId, RoundId>,
    next_round_id: u64,
    keep_history: bool,
}

impl Default for GameTable {
    fn default() -> Self {
        Self::new(true)
    }
}

struct Prepared {
    commitment: CommitmentId,
    bank_part: TokenAmount,
}

impl GameTable {
    /// With `keep_history == false` settled rounds are dropped once
    /// returned, which keeps long simulations flat in memory.
    pub fn new(keep_history: bool) -> Self {
        Self {
            rounds: BTreeMap::new(),
            open_sessions: BTreeMap::new(),
            next_round_id: 1,
            keep_history,
        }
    }

    pub fn next_round_id(&self) -> RoundId {
        RoundId(self.next_round_id)
    }

    pub fn round(&self, id: RoundId) -> Result<&GameRound> {
        self.rounds.get(&id).ok_or(Error::UnknownRound)
    }

    pub fn rounds(&self) -> impl Iterator<Item = &GameRound> {
        self.rounds.values()
    }

    pub fn open_rounds(&self) -> impl Iterator<Item = &GameRound> {
        self.rounds.values().filter(|r| !r.settled)
    }

    pub fn open_session_of(&self, player: &AccountId) -> Option<BlackjackSession> {
        let id = self.open_sessions.get(player)?;
        self.rounds.get(id).and_then(BlackjackSession::from_round)
    }

    pub fn session(&self, id: RoundId) -> Result<BlackjackSession> {
        self.rounds
            .get(&id)
            .and_then(BlackjackSession::from_round)
            .ok_or(Error::UnknownSession)
    }

    fn prepare(
        &self,
        ledger: &Ledger,
        fairness: &CommitmentTable,
        player: &AccountId,
        kind: GameKind,
        stake: TokenAmount,
    ) -> Result<Prepared> {
        if ledger.account(player).is_none() {
            return Err(Error::UnknownAccount);
        }
        if stake.is_zero() {
            return Err(Error::ZeroStake);
        }
        if stake.get() > MAX_STAKE {
            return Err(Error::StakeAboveMaximum);
        }
        let commitment = fairness.active().ok_or(Error::NoActiveCommitment)?;
        fairness.ensure_drawable(commitment)?;
        let bank_part = stake.checked_mul(kind.max_multiplier() - 1)?;
        ledger.check_hold(player, stake, bank_part)?;
        Ok(Prepared {
            commitment,
            bank_part,
        })
    }

    fn allocate_id(&mut self) -> RoundId {
        let id = RoundId(self.next_round_id);
        self.next_round_id += 1;
        id
    }

    /// Settles a single-draw game whose pool was just escrowed.
    #[allow(clippy::too_many_arguments)]
    fn settle_instant(
        &mut self,
        ledger: &mut Ledger,
        player: &AccountId,
        kind: GameKind,
        stake: TokenAmount,
        prepared: &Prepared,
        randomness: RandomnessRecord,
        outcome: Outcome,
        multiplier: u64,
    ) -> Result<GameRound> {
        let gross_payout = stake.checked_mul(multiplier)?;
        ledger.settle(player, stake, prepared.bank_part, gross_payout)?;
        let round = GameRound {
            round_id: self.allocate_id(),
            player: player.clone(),
            kind,
            stake,
            player_escrow: TokenAmount::ZERO,
            bank_escrow: TokenAmount::ZERO,
            randomness,
            outcome,
            gross_payout,
            settled: true,
        };
        if self.keep_history {
            self.rounds.insert(round.round_id, round.clone());
        }
        Ok(round)
    }

    pub fn play_dice(
        &mut self,
        ledger: &mut Ledger,
        fairness: &mut CommitmentTable,
        player: &AccountId,
        guess: u8,
        stake: TokenAmount,
        client_seed: ClientSeed,
    ) -> Result<GameRound> {
        if !(1..=6).contains(&guess) {
            return Err(Error::GuessOutOfRange);
        }
        let prepared = self.prepare(ledger, fairness, player, GameKind::Dice, stake)?;
        ledger.hold(player, stake, prepared.bank_part)?;
        let (nonce, value) = fairness.next_draw(prepared.commitment, &client_seed, 6)?;
        let roll = value as u8 + 1;
        let randomness = RandomnessRecord {
            commitment_id: prepared.commitment,
            client_seed,
            nonces: alloc::vec![nonce],
        };
        self.settle_instant(
            ledger,
            player,
            GameKind::Dice,
            stake,
            &prepared,
            randomness,
            Outcome::Dice { guess, roll },
            dice_multiplier(guess, roll),
        )
    }

    pub fn play_slots(
        &mut self,
        ledger: &mut Ledger,
        fairness: &mut CommitmentTable,
        player: &AccountId,
        stake: TokenAmount,
        client_seed: ClientSeed,
    ) -> Result<GameRound> {
        let prepared = self.prepare(ledger, fairness, player, GameKind::Slots, stake)?;
        ledger.hold(player, stake, prepared.bank_part)?;
        let mut digits = [0u8; 3];
        let mut nonces = Vec::with_capacity(3);
        for digit in &mut digits {
            let (nonce, value) = fairness.next_draw(prepared.commitment, &client_seed, 10)?;
            *digit = value as u8;
            nonces.push(nonce);
        }
        let randomness = RandomnessRecord {
            commitment_id: prepared.commitment,
            client_seed,
            nonces,
        };
        self.settle_instant(
            ledger,
            player,
            GameKind::Slots,
            stake,
            &prepared,
            randomness,
            Outcome::Slots { digits },
            slots_multiplier(digits),
        )
    }

    pub fn play_roulette(
        &mut self,
        ledger: &mut Ledger,
        fairness: &mut CommitmentTable,
        player: &AccountId,
        guess: RouletteGuess,
        stake: TokenAmount,
        client_seed: ClientSeed,
    ) -> Result<GameRound> {
        // Re-validate in case the guess was built without `RouletteGuess::new`.
        let guess = RouletteGuess::new(guess.number, guess.color)?;
        let prepared = self.prepare(ledger, fairness, player, GameKind::Roulette, stake)?;
        ledger.hold(player, stake, prepared.bank_part)?;
        let (nonce, value) =
            fairness.next_draw(prepared.commitment, &client_seed, POCKETS as u64)?;
        let pocket = value as u8;
        let randomness = RandomnessRecord {
            commitment_id: prepared.commitment,
            client_seed,
            nonces: alloc::vec![nonce],
        };
        self.settle_instant(
            ledger,
            player,
            GameKind::Roulette,
            stake,
            &prepared,
            randomness,
            Outcome::Roulette { guess, pocket },
            roulette_multiplier(guess, pocket),
        )
    }

    pub fn blackjack_start(
        &mut self,
        ledger: &mut Ledger,
        fairness: &mut CommitmentTable,
        player: &AccountId,
        stake: TokenAmount,
        client_seed: ClientSeed,
    ) -> Result<BlackjackSession> {
        if self.open_sessions.contains_key(player) {
            return Err(Error::OpenSessionExists);
        }
        let prepared = self.prepare(ledger, fairness, player, GameKind::Blackjack, stake)?;
        ledger.hold(player, stake, prepared.bank_part)?;

        let mut nonces = Vec::with_capacity(3);
        let mut deal = |nonces: &mut Vec<u64>| -> Result<Rank> {
            let (nonce, index) =
                fairness.next_draw(prepared.commitment, &client_seed, Rank::COUNT)?;
            nonces.push(nonce);
            Rank::from_index(index).ok_or(Error::Overflow)
        };
        let player_cards = alloc::vec![deal(&mut nonces)?, deal(&mut nonces)?];
        let dealer_cards = alloc::vec![deal(&mut nonces)?];
        fairness.add_open_round(prepared.commitment);

        let round_id = self.allocate_id();
        let round = GameRound {
            round_id,
            player: player.clone(),
            kind: GameKind::Blackjack,
            stake,
            player_escrow: stake,
            bank_escrow: prepared.bank_part,
            randomness: RandomnessRecord {
                commitment_id: prepared.commitment,
                client_seed,
                nonces,
            },
            outcome: Outcome::Blackjack {
                player_points: hand_points(&player_cards),
                dealer_points: hand_points(&dealer_cards),
                player_cards,
                dealer_cards,
                result: None,
            },
            gross_payout: TokenAmount::ZERO,
            settled: false,
        };
        let bust = matches!(round.outcome, Outcome::Blackjack { player_points, .. } if player_points > BLACKJACK_LIMIT);
        self.rounds.insert(round_id, round);
        self.open_sessions.insert(player.clone(), round_id);

        if bust {
            self.settle_blackjack(ledger, fairness, round_id, BlackjackResult::PlayerBust)?;
        }
        self.session_snapshot(round_id)
    }

    fn session_snapshot(&mut self, id: RoundId) -> Result<BlackjackSession> {
        let session = self.session(id)?;
        if session.phase == Phase::Settled && !self.keep_history {
            self.rounds.remove(&id);
        }
        Ok(session)
    }

    fn open_session_for(&self, player: &AccountId, id: RoundId) -> Result<&GameRound> {
        let round = self.rounds.get(&id).ok_or(Error::UnknownSession)?;
        if round.kind != GameKind::Blackjack {
            return Err(Error::UnknownSession);
        }
        if &round.player != player {
            return Err(Error::NotYourSession);
        }
        if round.settled {
            return Err(Error::NotPlayerTurn);
        }
        Ok(round)
    }

    fn draw_card(
        &mut self,
        fairness: &mut CommitmentTable,
        id: RoundId,
        to_dealer: bool,
    ) -> Result<u32> {
        let round = self.rounds.get_mut(&id).ok_or(Error::UnknownSession)?;
        let (nonce, index) = fairness.next_draw(
            round.randomness.commitment_id,
            &round.randomness.client_seed,
            Rank::COUNT,
        )?;
        let card = Rank::from_index(index).ok_or(Error::Overflow)?;
        round.randomness.nonces.push(nonce);
        let Outcome::Blackjack {
            player_cards,
            dealer_cards,
            player_points,
            dealer_points,
            ..
        } = &mut round.outcome
        else {
            return Err(Error::UnknownSession);
        };
        if to_dealer {
            dealer_cards.push(card);
            *dealer_points = hand_points(dealer_cards);
            Ok(*dealer_points)
        } else {
            player_cards.push(card);
            *player_points = hand_points(player_cards);
            Ok(*player_points)
        }
    }

    pub fn blackjack_hit(
        &mut self,
        ledger: &mut Ledger,
        fairness: &mut CommitmentTable,
        player: &AccountId,
        id: RoundId,
    ) -> Result<BlackjackSession> {
        self.open_session_for(player, id)?;
        let points = self.draw_card(fairness, id, false)?;
        if points > BLACKJACK_LIMIT {
            self.settle_blackjack(ledger, fairness, id, BlackjackResult::PlayerBust)?;
        }
        self.session_snapshot(id)
    }

    pub fn blackjack_stand(
        &mut self,
        ledger: &mut Ledger,
        fairness: &mut CommitmentTable,
        player: &AccountId,
        id: RoundId,
    ) -> Result<GameRound> {
        let round = self.open_session_for(player, id)?;
        let Outcome::Blackjack {
            player_points,
            mut dealer_points,
            ..
        } = round.outcome
        else {
            return Err(Error::UnknownSession);
        };
        while dealer_points < DEALER_STANDS_AT {
            dealer_points = self.draw_card(fairness, id, true)?;
        }
        let result = blackjack_result(player_points, dealer_points);
        self.settle_blackjack(ledger, fairness, id, result)?;
        let round = self.rounds.get(&id).cloned().ok_or(Error::UnknownSession)?;
        if !self.keep_history {
            self.rounds.remove(&id);
        }
        Ok(round)
    }

    fn settle_blackjack(
        &mut self,
        ledger: &mut Ledger,
        fairness: &mut CommitmentTable,
        id: RoundId,
        result: BlackjackResult,
    ) -> Result<()> {
        let round = self.rounds.get_mut(&id).ok_or(Error::UnknownSession)?;
        let multiplier = if result.player_wins() {
            GameKind::Blackjack.max_multiplier()
        } else {
            0
        };
        let gross_payout = round.stake.checked_mul(multiplier)?;
        ledger.settle(&round.player, round.player_escrow, round.bank_escrow, gross_payout)?;
        round.player_escrow = TokenAmount::ZERO;
        round.bank_escrow = TokenAmount::ZERO;
        round.gross_payout = gross_payout;
        round.settled = true;
        if let Outcome::Blackjack { result: slot, .. } = &mut round.outcome {
            *slot = Some(result);
        }
        fairness.close_open_round(round.randomness.commitment_id);
        let player = round.player.clone();
        self.open_sessions.remove(&player);
        Ok(())
    }
}
