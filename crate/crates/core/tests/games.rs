mod common;

use casino_core::fairness::draw_uniform_from_seed;
use casino_core::{
    BlackjackResult, ClientSeed, Color, Command, Effect, Error, GameKind, GameRound, Outcome,
    Phase, Platform, Rank, RoundId, TokenAmount,
};
use common::*;

fn round(effect: Effect) -> GameRound {
    match effect {
        Effect::Round(r) => r,
        other => panic!("expected round, got {other:?}"),
    }
}

fn session(effect: Effect) -> casino_core::BlackjackSession {
    match effect {
        Effect::Session(s) => s,
        other => panic!("expected session, got {other:?}"),
    }
}

fn rank_indices(ranks: &[Rank]) -> Vec<u64> {
    ranks.iter().map(|r| r.index() as u64).collect()
}

fn dice(p: &mut Platform, guess: u8, stake: u64, seed: ClientSeed) -> Result<Effect, Error> {
    p.apply(Command::PlayDice {
        player: alice(),
        guess,
        stake: TokenAmount(stake),
        client_seed: seed,
    })
}

#[test]
fn dice_win_pays_six_times_stake() {
    let mut p = platform_with(100);
    let seed = client_seed_for(&p, &[6], &[3]);
    let r = round(dice(&mut p, 4, 10, seed).unwrap());
    assert_eq!(r.outcome, Outcome::Dice { guess: 4, roll: 4 });
    assert_eq!(r.gross_payout, TokenAmount(60));
    assert_eq!(p.balance_of(&alice()), (TokenAmount(150), TokenAmount(0)));
    assert_eq!(p.bank().reserve, TokenAmount(100_000 - 50));
    assert!(p.conservation_check());
}

#[test]
fn dice_loss_moves_stake_to_reserve() {
    let mut p = platform_with(100);
    let seed = client_seed_for(&p, &[6], &[1]);
    let r = round(dice(&mut p, 4, 10, seed).unwrap());
    assert_eq!(r.outcome, Outcome::Dice { guess: 4, roll: 2 });
    assert_eq!(r.gross_payout, TokenAmount(0));
    assert_eq!(p.balance_of(&alice()).0, TokenAmount(90));
    assert_eq!(p.bank().reserve, TokenAmount(100_010));
    assert_eq!(p.bank().bank_escrowed, TokenAmount(0));
}

#[test]
fn dice_refusals() {
    let mut p = platform_with(100);
    let before = p.clone();
    let s = ClientSeed::default;
    assert_eq!(dice(&mut p, 0, 10, s()), Err(Error::GuessOutOfRange));
    assert_eq!(dice(&mut p, 7, 10, s()), Err(Error::GuessOutOfRange));
    assert_eq!(dice(&mut p, 3, 0, s()), Err(Error::ZeroStake));
    assert_eq!(dice(&mut p, 3, 101, s()), Err(Error::InsufficientBalance));
    assert_eq!(dice(&mut p, 3, 1001, s()), Err(Error::StakeAboveMaximum));
    assert_eq!(
        p.apply(Command::PlayDice {
            player: id("nobody"),
            guess: 1,
            stake: TokenAmount(1),
            client_seed: s(),
        }),
        Err(Error::UnknownAccount)
    );
    assert_eq!(p, before);
}

#[test]
fn dice_needs_five_times_stake_in_reserve() {
    let mut p = Platform::default();
    p.apply(Command::InitializeBank {
        owner: owner(),
        investment: TokenAmount(49),
        rate: Default::default(),
    })
    .unwrap();
    p.open_commitment(SEED).unwrap();
    p.apply(Command::BuyTokens {
        buyer: alice(),
        base_amount: 100,
    })
    .unwrap();
    assert_eq!(dice(&mut p, 1, 10, ClientSeed::default()), Err(Error::InsufficientReserve));
    assert!(dice(&mut p, 1, 9, ClientSeed::default()).is_ok());
}

#[test]
fn slots_tiers() {
    for (digits, payout) in [([7, 7, 7], 90), ([3, 3, 8], 30), ([1, 2, 3], 0)] {
        let mut p = platform_with(100);
        let seed = client_seed_for(&p, &[10, 10, 10], &digits.map(u64::from));
        let r = round(
            p.apply(Command::PlaySlots {
                player: alice(),
                stake: TokenAmount(10),
                client_seed: seed,
            })
            .unwrap(),
        );
        assert_eq!(r.outcome, Outcome::Slots { digits });
        assert_eq!(r.gross_payout, TokenAmount(payout));
        assert_eq!(r.randomness.nonces, vec![0, 1, 2]);
        assert_eq!(p.balance_of(&alice()).0, TokenAmount(90 + payout));
        assert!(p.conservation_check());
    }
}

#[test]
fn roulette_number_color_and_miss() {
    for (pocket, payout) in [(7u64, 360), (9, 20), (8, 0), (0, 0)] {
        let mut p = platform_with(100);
        let seed = client_seed_for(&p, &[37], &[pocket]);
        let r = round(
            p.apply(Command::PlayRoulette {
                player: alice(),
                number: 7,
                color: Color::Red,
                stake: TokenAmount(10),
                client_seed: seed,
            })
            .unwrap(),
        );
        assert_eq!(r.gross_payout, TokenAmount(payout), "pocket {pocket}");
        assert!(p.conservation_check());
    }
    let mut p = platform_with(100);
    assert_eq!(
        p.apply(Command::PlayRoulette {
            player: alice(),
            number: 7,
            color: Color::Black,
            stake: TokenAmount(10),
            client_seed: ClientSeed::default(),
        }),
        Err(Error::InconsistentGuess)
    );
}

fn start(p: &mut Platform, stake: u64, seed: ClientSeed) -> Result<Effect, Error> {
    p.apply(Command::BlackjackStart {
        player: alice(),
        stake: TokenAmount(stake),
        client_seed: seed,
    })
}

#[test]
fn blackjack_deal_and_escrow() {
    let mut p = platform_with(100);
    let want = rank_indices(&[Rank::King, Rank::Five, Rank::Nine]);
    let seed = client_seed_for(&p, &[13, 13, 13], &want);
    let s = session(start(&mut p, 10, seed).unwrap());
    assert_eq!(s.phase, Phase::PlayerTurn);
    assert_eq!(s.player_points, 15);
    assert_eq!(s.dealer_cards, vec![Rank::Nine]);
    assert_eq!(p.balance_of(&alice()), (TokenAmount(90), TokenAmount(10)));
    assert_eq!(p.bank().bank_escrowed, TokenAmount(10));
    assert!(p.conservation_check());

    // escrowed tokens cannot be withdrawn
    assert_eq!(
        p.apply(Command::WithdrawTokens {
            caller: alice(),
            amount: TokenAmount(91),
        }),
        Err(Error::InsufficientBalance)
    );
    assert_eq!(start(&mut p, 10, ClientSeed::default()), Err(Error::OpenSessionExists));

    // the commitment cannot be revealed under an open session
    let cid = p.fairness().active().unwrap();
    assert_eq!(
        p.apply(Command::RevealCommitment { commitment_id: cid }),
        Err(Error::OpenRoundsRemain)
    );
    let open = p.games().open_rounds().next().unwrap();
    assert_eq!(
        open.player_escrow.get() + open.bank_escrow.get(),
        GameKind::Blackjack.max_multiplier() * 10
    );
}

#[test]
fn blackjack_double_ace_loses_directly() {
    let mut p = platform_with(100);
    let ace = Rank::Ace.index() as u64;
    let seed = client_seed_for(&p, &[13, 13], &[ace, ace]);
    let s = session(start(&mut p, 10, seed).unwrap());
    assert_eq!(s.player_points, 22);
    assert_eq!(s.phase, Phase::Settled);
    assert_eq!(s.result, Some(BlackjackResult::PlayerBust));
    assert_eq!(s.gross_payout, Some(TokenAmount(0)));
    assert_eq!(p.balance_of(&alice()), (TokenAmount(90), TokenAmount(0)));
    assert_eq!(p.bank().reserve, TokenAmount(100_010));
    assert!(p.games().open_rounds().next().is_none());
}

#[test]
fn blackjack_hit_to_21_then_bust_on_22() {
    let idx = |r: Rank| r.index() as u64;
    // 15 points then a six: 21, still the player's turn
    let mut p = platform_with(100);
    let want = [idx(Rank::King), idx(Rank::Five), idx(Rank::Nine), idx(Rank::Six)];
    let seed = client_seed_for(&p, &[13; 4], &want);
    let s = session(start(&mut p, 10, seed).unwrap());
    let hit = Command::BlackjackHit {
        player: alice(),
        session_id: s.session_id,
    };
    let s = session(p.apply(hit.clone()).unwrap());
    assert_eq!((s.player_points, s.phase), (21, Phase::PlayerTurn));

    // 15 points then a seven: 22, settled loss
    let mut p = platform_with(100);
    let want = [idx(Rank::King), idx(Rank::Five), idx(Rank::Nine), idx(Rank::Seven)];
    let seed = client_seed_for(&p, &[13; 4], &want);
    let s = session(start(&mut p, 10, seed).unwrap());
    let hit = Command::BlackjackHit {
        player: alice(),
        session_id: s.session_id,
    };
    let s = session(p.apply(hit.clone()).unwrap());
    assert_eq!((s.player_points, s.phase), (22, Phase::Settled));
    assert_eq!(p.apply(hit), Err(Error::NotPlayerTurn));
    assert!(p.conservation_check());
}

#[test]
fn blackjack_stand_outcomes() {
    let idx = |r: Rank| r.index() as u64;
    let cases = [
        // player 20, dealer 9 + 9 = 18: win
        (vec![Rank::King, Rank::Queen, Rank::Nine, Rank::Nine], 20, 18, 20),
        // player 18, dealer 18: tie loses
        (vec![Rank::Nine, Rank::Nine, Rank::Nine, Rank::Nine], 18, 18, 0),
        // player 12, dealer 5 + 10 + 10 = 25: dealer bust
        (vec![Rank::Seven, Rank::Five, Rank::Five, Rank::Ten, Rank::King], 12, 25, 20),
    ];
    for (cards, player_points, dealer_points, payout) in cases {
        let mut p = platform_with(100);
        let want: Vec<u64> = cards.iter().map(|&r| idx(r)).collect();
        let seed = client_seed_for(&p, &vec![13; want.len()], &want);
        let s = session(start(&mut p, 10, seed).unwrap());
        let r = round(
            p.apply(Command::BlackjackStand {
                player: alice(),
                session_id: s.session_id,
            })
            .unwrap(),
        );
        let Outcome::Blackjack {
            player_points: pp,
            dealer_points: dp,
            ..
        } = r.outcome
        else {
            panic!()
        };
        assert_eq!((pp, dp), (player_points, dealer_points));
        assert_eq!(r.gross_payout, TokenAmount(payout));
        assert_eq!((r.player_escrow, r.bank_escrow), (TokenAmount(0), TokenAmount(0)));
        assert!(p.conservation_check());
        // reveal is allowed again once the session settled
        let cid = r.randomness.commitment_id;
        assert!(p.apply(Command::RevealCommitment { commitment_id: cid }).is_ok());
    }
}

#[test]
fn blackjack_session_ownership() {
    let mut p = platform_with(100);
    p.apply(Command::BuyTokens {
        buyer: id("bob"),
        base_amount: 100,
    })
    .unwrap();
    let mut found = None;
    for i in 0.. {
        let seed = ClientSeed::new(format!("s{i}")).unwrap();
        let s = session(start(&mut p, 1, seed).unwrap());
        if s.phase == Phase::PlayerTurn {
            found = Some(s.session_id);
            break;
        }
    }
    let sid = found.unwrap();
    assert_eq!(
        p.apply(Command::BlackjackHit {
            player: id("bob"),
            session_id: sid,
        }),
        Err(Error::NotYourSession)
    );
    assert_eq!(
        p.apply(Command::BlackjackStand {
            player: alice(),
            session_id: RoundId(999),
        }),
        Err(Error::UnknownSession)
    );
}

#[test]
fn round_info_exposes_randomness_for_verification() {
    let mut p = platform_with(100);
    let r = round(dice(&mut p, 2, 5, ClientSeed::new("lucky").unwrap()).unwrap());
    let stored = p.round_info(r.round_id).unwrap().clone();
    assert_eq!(stored, r);
    assert_eq!(p.round_info(RoundId(404)).unwrap_err(), Error::UnknownRound);

    let cid = stored.randomness.commitment_id;
    let seed = match p.apply(Command::RevealCommitment { commitment_id: cid }).unwrap() {
        Effect::Revealed { server_seed, .. } => server_seed,
        other => panic!("{other:?}"),
    };
    let roll = 1 + draw_uniform_from_seed(&seed, b"lucky", stored.randomness.nonces[0], 6).unwrap();
    assert_eq!(stored.outcome, Outcome::Dice { guess: 2, roll: roll as u8 });

    // no commitment is active after reveal until a new one is opened
    assert_eq!(dice(&mut p, 2, 5, ClientSeed::default()), Err(Error::NoActiveCommitment));
    p.open_commitment([1; 32]).unwrap();
    assert!(dice(&mut p, 2, 5, ClientSeed::default()).is_ok());
}
