//! The journaled platform service.
//!
//! One writer applies commands in arrival order: authenticate, apply to the
//! in-memory [`Platform`], append the outcome to the journal (fsynced), then
//! publish an immutable snapshot for readers. Refused commands are journaled
//! as error events and leave state untouched.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use casino_core::{
    AccountId, ClientSeed, Command, CommitmentId, Digest32, Effect, ExchangeRate,
    InterestRatePercent, LoanId, Platform, PlatformConfig, RoundId, ServerSeed, TokenAmount,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{ApiError, StartupError};
use crate::journal::{read_journal, EventRecord, Journal, OK};
use crate::seal::Sealer;

pub const OPEN_COMMITMENT: &str = "open_commitment";

/// Largest page served by [`Service::events`].
pub const MAX_EVENT_PAGE: usize = 1000;

fn credential_hash(secret: &str) -> String {
    hex::encode(Sha256::digest(secret.as_bytes()))
}

/// A mutating API request, before authentication.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Request {
    InitBank {
        investment: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        rate: Option<u64>,
    },
    TopUp {
        amount: u64,
    },
    Buy {
        base_amount: u64,
    },
    Withdraw {
        amount: u64,
    },
    RequestLoan {
        principal: u64,
        rate_percent: u32,
    },
    DecideLoan {
        loan_id: u64,
        accept: bool,
    },
    RepayLoan {
        loan_id: u64,
        amount: u64,
    },
    Dice {
        guess: u64,
        stake: u64,
        client_seed: Option<String>,
    },
    Slots {
        stake: u64,
        client_seed: Option<String>,
    },
    Roulette {
        number: u64,
        color: String,
        stake: u64,
        client_seed: Option<String>,
    },
    BlackjackStart {
        stake: u64,
        client_seed: Option<String>,
    },
    BlackjackHit {
        session_id: u64,
    },
    BlackjackStand {
        session_id: u64,
    },
    Reveal {
        commitment_id: u64,
    },
}

impl Request {
    /// Journal event kind; matches [`Command::kind`].
    pub fn kind(&self) -> &'static str {
        match self {
            Request::InitBank { .. } => "initialize_bank",
            Request::TopUp { .. } => "top_up_bank",
            Request::Buy { .. } => "buy_tokens",
            Request::Withdraw { .. } => "withdraw_tokens",
            Request::RequestLoan { .. } => "request_loan",
            Request::DecideLoan { .. } => "decide_loan",
            Request::RepayLoan { .. } => "repay_loan",
            Request::Dice { .. } => "play_dice",
            Request::Slots { .. } => "play_slots",
            Request::Roulette { .. } => "play_roulette",
            Request::BlackjackStart { .. } => "blackjack_start",
            Request::BlackjackHit { .. } => "blackjack_hit",
            Request::BlackjackStand { .. } => "blackjack_stand",
            Request::Reveal { .. } => "reveal_commitment",
        }
    }
}

fn client_seed(s: &Option<String>) -> Result<ClientSeed, ApiError> {
    Ok(ClientSeed::new(s.clone().unwrap_or_default())?)
}

fn small(v: u64) -> Result<u8, ApiError> {
    u8::try_from(v).map_err(|_| casino_core::Error::GuessOutOfRange.into())
}

/// Platform state plus the credential registry; everything replay rebuilds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct State {
    pub platform: Platform,
    /// SHA-256 of each player credential (hex) to its account.
    pub credentials: BTreeMap<String, AccountId>,
    pub last_seq: u64,
}

impl State {
    pub fn genesis(config: PlatformConfig) -> Self {
        Self {
            platform: Platform::new(config),
            credentials: BTreeMap::new(),
            last_seq: 0,
        }
    }

    /// Applies one journaled event, checking that committed events
    /// reproduce their recorded result.
    pub fn replay_event(&mut self, ev: &EventRecord, sealer: &Sealer) -> Result<(), StartupError> {
        let corrupt = |reason: String| StartupError::corrupt(ev.seq, reason);
        if ev.seq != self.last_seq + 1 {
            return Err(corrupt(format!("expected seq {}", self.last_seq + 1)));
        }
        self.last_seq = ev.seq;
        if !ev.is_ok() {
            return Ok(());
        }
        if ev.kind == OPEN_COMMITMENT {
            let p: OpenCommitmentPayload = serde_json::from_value(ev.payload.clone())
                .map_err(|e| corrupt(format!("bad payload: {e}")))?;
            let seed = sealer.unseal(p.commitment_id, &p.sealed_seed);
            let (id, hash) = self
                .platform
                .open_commitment(seed)
                .map_err(|e| corrupt(format!("open commitment refused: {e}")))?;
            if id != p.commitment_id || hash != p.commit_hash {
                return Err(corrupt(
                    "sealed seed does not match the published commitment (wrong journal_key?)".into(),
                ));
            }
            return Ok(());
        }
        let command: Command = serde_json::from_value(json!({"kind": ev.kind, "payload": ev.payload}))
            .map_err(|e| corrupt(format!("not a command: {e}")))?;
        let effect = self
            .platform
            .apply(command)
            .map_err(|e| corrupt(format!("recorded as ok but now refused: {e}")))?;
        let recorded = ev.payload.get("result").cloned().unwrap_or(Value::Null);
        if serde_json::to_value(&effect).expect("effects serialize") != recorded {
            return Err(corrupt("replayed result differs from the recorded one".into()));
        }
        if let (Some(Value::String(hash)), Effect::Purchased { account, .. }) =
            (ev.payload.get("credential_hash"), &effect)
        {
            self.credentials.insert(hash.clone(), account.clone());
        }
        Ok(())
    }

    pub fn replay_all<'a>(
        &mut self,
        events: impl IntoIterator<Item = &'a EventRecord>,
        sealer: &Sealer,
    ) -> Result<(), StartupError> {
        events.into_iter().try_for_each(|ev| self.replay_event(ev, sealer))
    }
}

#[derive(Serialize, Deserialize)]
struct OpenCommitmentPayload {
    commitment_id: CommitmentId,
    #[serde(with = "hex32")]
    commit_hash: Digest32,
    #[serde(with = "hex32")]
    sealed_seed: [u8; 32],
}

mod hex32 {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(d)?;
        let mut out = [0u8; 32];
        hex::decode_to_slice(&s, &mut out).map_err(D::Error::custom)?;
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct SealedSeed {
    commitment_id: CommitmentId,
    #[serde(with = "hex32")]
    sealed_seed: [u8; 32],
}

#[derive(Serialize, Deserialize)]
struct SnapshotFile {
    seq: u64,
    chain: String,
    state_hash: String,
    platform: Platform,
    sealed_seeds: Vec<SealedSeed>,
    credentials: BTreeMap<String, AccountId>,
}

/// Replays a journal from genesis, ignoring any snapshot.
pub fn replay_journal(config: &Config) -> Result<State, StartupError> {
    let events = read_journal(&config.journal_path)?;
    let mut state = State::genesis(config.platform_config());
    state.replay_all(&events, &sealer_for(config))?;
    Ok(state)
}

fn sealer_for(config: &Config) -> Sealer {
    Sealer::from_secret(config.journal_key.as_deref().unwrap_or(&config.owner_credential))
}

fn load_snapshot(path: &Path, events: &[EventRecord], sealer: &Sealer) -> Option<State> {
    let text = std::fs::read_to_string(path).ok()?;
    let snap: SnapshotFile = serde_json::from_str(&text).ok()?;
    let seq = usize::try_from(snap.seq).ok()?;
    if seq == 0 || events.get(seq - 1)?.chain != snap.chain {
        return None;
    }
    let mut platform = snap.platform;
    let seeds = snap
        .sealed_seeds
        .iter()
        .map(|s| (s.commitment_id, sealer.unseal(s.commitment_id, &s.sealed_seed)));
    platform.restore_seeds(seeds).ok()?;
    if hex::encode(platform.state_hash()) != snap.state_hash {
        return None;
    }
    Some(State {
        platform,
        credentials: snap.credentials,
        last_seq: snap.seq,
    })
}

/// What readers see: the state as of the last committed event.
#[derive(Debug)]
pub struct Published {
    pub state: State,
}

struct Writer {
    state: State,
    journal: Journal,
}

pub struct Service {
    owner_id: AccountId,
    owner_hash: String,
    rate: ExchangeRate,
    sealer: Sealer,
    snapshot_interval: u64,
    snapshot_path: PathBuf,
    writer: Mutex<Writer>,
    published: RwLock<Arc<Published>>,
    events: RwLock<Vec<EventRecord>>,
}

impl std::fmt::Debug for Service {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Service")
            .field("owner_id", &self.owner_id)
            .finish_non_exhaustive()
    }
}

/// Draws a server seed from the operating system.
pub fn fresh_seed() -> ServerSeed {
    let mut seed = [0u8; 32];
    getrandom::fill(&mut seed).expect("operating system randomness");
    seed
}

impl Service {
    /// Opens (or creates) the journal and restores state from it.
    pub fn open(config: &Config) -> Result<Self, StartupError> {
        let sealer = sealer_for(config);
        let events = read_journal(&config.journal_path)?;
        let snapshot_path = config.snapshot_path();
        let mut state = load_snapshot(&snapshot_path, &events, &sealer)
            .unwrap_or_else(|| State::genesis(config.platform_config()));
        let done = state.last_seq as usize;
        state.replay_all(&events[done..], &sealer)?;
        let journal = Journal::open(&config.journal_path, &events)?;
        let service = Self {
            owner_id: config.owner_id.clone(),
            owner_hash: credential_hash(&config.owner_credential),
            rate: config.rate,
            sealer,
            snapshot_interval: config.snapshot_interval,
            snapshot_path,
            published: RwLock::new(Arc::new(Published {
                state: state.clone(),
            })),
            writer: Mutex::new(Writer { state, journal }),
            events: RwLock::new(events),
        };
        {
            let mut w = service.lock();
            service
                .ensure_active_commitment(&mut w)
                .map_err(|e| StartupError::Io(std::io::Error::other(e.message)))?;
        }
        Ok(service)
    }

    fn lock(&self) -> MutexGuard<'_, Writer> {
        self.writer.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub fn owner_id(&self) -> &AccountId {
        &self.owner_id
    }

    pub fn journal_path(&self) -> PathBuf {
        self.lock().journal.path().to_path_buf()
    }

    /// The latest committed state.
    pub fn snapshot(&self) -> Arc<Published> {
        self.published.read().unwrap_or_else(|p| p.into_inner()).clone()
    }

    fn publish(&self, w: &Writer) {
        let next = Arc::new(Published {
            state: w.state.clone(),
        });
        *self.published.write().unwrap_or_else(|p| p.into_inner()) = next;
    }

    fn record(&self, w: &mut Writer, kind: &str, payload: Value, outcome: &str) -> Result<(), ApiError> {
        let rec = w
            .journal
            .append(kind, payload, outcome)
            .map_err(|e| ApiError::journal(&e))?;
        w.state.last_seq = rec.seq;
        let seq = rec.seq;
        self.events
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .push(rec);
        if self.snapshot_interval > 0 && seq % self.snapshot_interval == 0 {
            // Snapshots only shorten restarts; the journal stays authoritative.
            let _ = self.write_snapshot(w);
        }
        Ok(())
    }

    fn write_snapshot(&self, w: &Writer) -> std::io::Result<()> {
        let platform = &w.state.platform;
        let snap = SnapshotFile {
            seq: w.journal.last_seq(),
            chain: w.journal.last_chain().to_string(),
            state_hash: hex::encode(platform.state_hash()),
            platform: platform.clone(),
            sealed_seeds: platform
                .sealed_seeds()
                .into_iter()
                .map(|(id, seed)| SealedSeed {
                    commitment_id: id,
                    sealed_seed: self.sealer.seal(id, &seed),
                })
                .collect(),
            credentials: w.state.credentials.clone(),
        };
        let mut tmp = self.snapshot_path.clone().into_os_string();
        tmp.push(".tmp");
        std::fs::write(&tmp, serde_json::to_vec(&snap)?)?;
        std::fs::rename(&tmp, &self.snapshot_path)
    }

    fn restore_published(&self, w: &mut Writer) {
        w.state = self.snapshot().state.clone();
    }

    fn ensure_active_commitment(&self, w: &mut Writer) -> Result<(), ApiError> {
        let platform = &mut w.state.platform;
        if !platform.bank().initialized || platform.fairness().active().is_some() {
            return Ok(());
        }
        let seed = fresh_seed();
        let (commitment_id, commit_hash) = platform.open_commitment(seed)?;
        let payload = serde_json::to_value(OpenCommitmentPayload {
            commitment_id,
            commit_hash,
            sealed_seed: self.sealer.seal(commitment_id, &seed),
        })
        .expect("payload serializes");
        if let Err(e) = self.record(w, OPEN_COMMITMENT, payload, OK) {
            self.restore_published(w);
            return Err(e);
        }
        self.publish(w);
        Ok(())
    }

    /// Resolves a bearer credential. `Ok(None)` means none was presented.
    fn caller(&self, state: &State, bearer: Option<&str>) -> Result<Option<AccountId>, ApiError> {
        let Some(secret) = bearer else {
            return Ok(None);
        };
        let hash = credential_hash(secret);
        if hash == self.owner_hash {
            return Ok(Some(self.owner_id.clone()));
        }
        match state.credentials.get(&hash) {
            Some(id) => Ok(Some(id.clone())),
            None => Err(ApiError::auth("unknown credential")),
        }
    }

    fn require_caller(&self, state: &State, bearer: Option<&str>) -> Result<AccountId, ApiError> {
        self.caller(state, bearer)?
            .ok_or_else(|| ApiError::auth("missing bearer credential"))
    }

    fn is_owner(&self, id: &AccountId) -> bool {
        *id == self.owner_id
    }

    fn next_player_id(state: &State) -> AccountId {
        let taken = |id: &AccountId| {
            state.platform.ledger().account(id).is_some()
                || state.credentials.values().any(|v| v == id)
        };
        (state.credentials.len() + 1..)
            .map(|n| AccountId::new(format!("player-{n}")).expect("short id"))
            .find(|id| !taken(id))
            .expect("unbounded search")
    }

    /// Authenticates `req` and turns it into a core command. A fresh
    /// credential is minted for an anonymous purchase.
    fn prepare(
        &self,
        state: &State,
        bearer: Option<&str>,
        req: &Request,
    ) -> Result<(Command, Option<String>), ApiError> {
        let mut minted = None;
        let command = match req {
            Request::InitBank { investment, rate } => {
                let caller = self.require_caller(state, bearer)?;
                if !self.is_owner(&caller) {
                    return Err(ApiError::forbidden("only the owner may initialize the bank"));
                }
                let rate = match rate {
                    Some(r) => ExchangeRate::new(*r)?,
                    None => self.rate,
                };
                Command::InitializeBank {
                    owner: caller,
                    investment: TokenAmount(*investment),
                    rate,
                }
            }
            Request::TopUp { amount } => Command::TopUpBank {
                caller: self.require_caller(state, bearer)?,
                amount: TokenAmount(*amount),
            },
            Request::Buy { base_amount } => {
                let buyer = match self.caller(state, bearer)? {
                    Some(id) => id,
                    None => {
                        let mut secret = [0u8; 32];
                        getrandom::fill(&mut secret).expect("operating system randomness");
                        minted = Some(hex::encode(secret));
                        Self::next_player_id(state)
                    }
                };
                Command::BuyTokens {
                    buyer,
                    base_amount: *base_amount,
                }
            }
            Request::Withdraw { amount } => Command::WithdrawTokens {
                caller: self.require_caller(state, bearer)?,
                amount: TokenAmount(*amount),
            },
            Request::RequestLoan {
                principal,
                rate_percent,
            } => Command::RequestLoan {
                borrower: self.require_caller(state, bearer)?,
                principal: TokenAmount(*principal),
                rate_percent: InterestRatePercent(*rate_percent),
            },
            Request::DecideLoan { loan_id, accept } => Command::DecideLoan {
                caller: self.require_caller(state, bearer)?,
                loan_id: LoanId(*loan_id),
                accept: *accept,
            },
            Request::RepayLoan { loan_id, amount } => Command::RepayLoan {
                borrower: self.require_caller(state, bearer)?,
                loan_id: LoanId(*loan_id),
                amount: TokenAmount(*amount),
            },
            Request::Dice {
                guess,
                stake,
                client_seed: cs,
            } => Command::PlayDice {
                player: self.require_caller(state, bearer)?,
                guess: small(*guess)?,
                stake: TokenAmount(*stake),
                client_seed: client_seed(cs)?,
            },
            Request::Slots {
                stake,
                client_seed: cs,
            } => Command::PlaySlots {
                player: self.require_caller(state, bearer)?,
                stake: TokenAmount(*stake),
                client_seed: client_seed(cs)?,
            },
            Request::Roulette {
                number,
                color,
                stake,
                client_seed: cs,
            } => Command::PlayRoulette {
                player: self.require_caller(state, bearer)?,
                number: small(*number)?,
                color: color.parse()?,
                stake: TokenAmount(*stake),
                client_seed: client_seed(cs)?,
            },
            Request::BlackjackStart {
                stake,
                client_seed: cs,
            } => Command::BlackjackStart {
                player: self.require_caller(state, bearer)?,
                stake: TokenAmount(*stake),
                client_seed: client_seed(cs)?,
            },
            Request::BlackjackHit { session_id } => Command::BlackjackHit {
                player: self.require_caller(state, bearer)?,
                session_id: RoundId(*session_id),
            },
            Request::BlackjackStand { session_id } => Command::BlackjackStand {
                player: self.require_caller(state, bearer)?,
                session_id: RoundId(*session_id),
            },
            Request::Reveal { commitment_id } => {
                self.require_caller(state, bearer)?;
                Command::RevealCommitment {
                    commitment_id: CommitmentId(*commitment_id),
                }
            }
        };
        Ok((command, minted))
    }

    /// Applies one mutating request. The outcome, success or refusal, is in
    /// the journal before this returns.
    pub fn execute(&self, bearer: Option<&str>, req: Request) -> Result<Value, ApiError> {
        let mut w = self.lock();
        let kind = req.kind();
        let (command, minted) = match self.prepare(&w.state, bearer, &req) {
            Ok(prepared) => prepared,
            Err(e) => {
                let payload = json!({"request": req, "message": e.message});
                self.record(&mut w, kind, payload, &e.code)?;
                self.publish(&w);
                return Err(e);
            }
        };
        let mut payload = match serde_json::to_value(&command).expect("commands serialize") {
            Value::Object(mut m) => match m.remove("payload") {
                Some(Value::Object(p)) => p,
                _ => Map::new(),
            },
            _ => Map::new(),
        };
        match w.state.platform.apply(command) {
            Err(e) => {
                let e = ApiError::from(e);
                payload.insert("message".into(), Value::String(e.message.clone()));
                self.record(&mut w, kind, Value::Object(payload), &e.code)?;
                self.publish(&w);
                Err(e)
            }
            Ok(effect) => {
                payload.insert("result".into(), serde_json::to_value(&effect).expect("effects serialize"));
                let hash = minted.as_deref().map(credential_hash);
                if let Some(h) = &hash {
                    payload.insert("credential_hash".into(), Value::String(h.clone()));
                }
                if let Err(e) = self.record(&mut w, kind, Value::Object(payload), OK) {
                    self.restore_published(&mut w);
                    return Err(e);
                }
                if let (Some(h), Effect::Purchased { account, .. }) = (hash, &effect) {
                    w.state.credentials.insert(h, account.clone());
                }
                self.publish(&w);
                // The new commitment is a separate event; failing to open
                // one does not undo the command already committed.
                let _ = self.ensure_active_commitment(&mut w);
                Ok(self.respond(&w.state.platform, effect, minted))
            }
        }
    }

    fn respond(&self, platform: &Platform, effect: Effect, credential: Option<String>) -> Value {
        match effect {
            Effect::Bank(bank) => serde_json::to_value(bank).expect("serializes"),
            Effect::Purchased { account, tokens } => {
                let (balance, escrowed) = platform.balance_of(&account);
                let mut v = json!({
                    "account": account,
                    "tokens": tokens,
                    "balance": balance,
                    "escrowed": escrowed,
                });
                if let Some(c) = credential {
                    v["credential"] = Value::String(c);
                }
                v
            }
            Effect::Withdrawn {
                account,
                redemption,
            } => {
                let (balance, escrowed) = platform.balance_of(&account);
                json!({
                    "account": account,
                    "tokens": redemption.tokens,
                    "base_units": redemption.base_units,
                    "balance": balance,
                    "escrowed": escrowed,
                })
            }
            Effect::Loan(loan) => serde_json::to_value(loan).expect("serializes"),
            Effect::Round(round) => serde_json::to_value(round).expect("serializes"),
            Effect::Session(session) => serde_json::to_value(session).expect("serializes"),
            Effect::Revealed { commitment_id, .. } => {
                let info = platform.commitment_info(commitment_id).expect("just revealed");
                commitment_view(platform, info)
            }
        }
    }

    /// Journals a request that never reached the engine, such as a
    /// malformed body.
    pub fn reject(&self, kind: &str, error: ApiError) -> ApiError {
        let mut w = self.lock();
        let payload = json!({"message": error.message});
        match self.record(&mut w, kind, payload, &error.code) {
            Ok(()) => {
                self.publish(&w);
                error
            }
            Err(journal) => journal,
        }
    }

    pub fn account(&self, bearer: Option<&str>, id: &str) -> Result<Value, ApiError> {
        let snap = self.snapshot();
        let state = &snap.state;
        let caller = self.require_caller(state, bearer)?;
        let id = AccountId::new(id)?;
        if caller != id && !self.is_owner(&caller) {
            return Err(ApiError::forbidden("accounts are visible only to their holder"));
        }
        let p = &state.platform;
        let (balance, escrowed) = p.balance_of(&id);
        let mut v = json!({
            "account": id,
            "balance": balance,
            "escrowed": escrowed,
            "open_blackjack_session": p.games().open_session_of(&id),
        });
        if self.is_owner(&id) {
            v["bank"] = serde_json::to_value(p.bank()).expect("serializes");
            v["conservation_ok"] = Value::Bool(p.conservation_check());
        }
        Ok(v)
    }

    pub fn loans(&self, bearer: Option<&str>, borrower: Option<&str>) -> Result<Value, ApiError> {
        let snap = self.snapshot();
        let state = &snap.state;
        let caller = self.require_caller(state, bearer)?;
        let p = &state.platform;
        let loans = match borrower {
            Some(b) => {
                let b = AccountId::new(b)?;
                if b != caller && !self.is_owner(&caller) {
                    return Err(ApiError::forbidden("loans are visible only to their borrower"));
                }
                p.loans_of(&b)
            }
            None if self.is_owner(&caller) => p.loans().all().rev().cloned().collect(),
            None => p.loans_of(&caller),
        };
        Ok(json!({ "loans": loans }))
    }

    pub fn round(&self, id: u64) -> Result<Value, ApiError> {
        let snap = self.snapshot();
        let round = snap.state.platform.round_info(RoundId(id))?;
        Ok(serde_json::to_value(round).expect("serializes"))
    }

    /// Public commitment data; `None` selects the active commitment.
    pub fn commitment(&self, id: Option<u64>) -> Result<Value, ApiError> {
        let snap = self.snapshot();
        let p = &snap.state.platform;
        let id = match id {
            Some(id) => CommitmentId(id),
            None => p
                .fairness()
                .active()
                .ok_or(casino_core::Error::NoActiveCommitment)?,
        };
        let info = p.commitment_info(id)?;
        Ok(commitment_view(p, info))
    }

    pub fn events(&self, since: u64, limit: usize) -> Value {
        let events = self.events.read().unwrap_or_else(|p| p.into_inner());
        let start = usize::try_from(since).unwrap_or(usize::MAX).min(events.len());
        let page: Vec<&EventRecord> = events[start..].iter().take(limit.min(MAX_EVENT_PAGE)).collect();
        json!({ "events": page, "last_seq": events.len() })
    }

    pub fn state_hash(&self) -> Digest32 {
        self.snapshot().state.platform.state_hash()
    }

    pub fn state_hash_view(&self) -> Value {
        let snap = self.snapshot();
        json!({
            "state_hash": hex::encode(snap.state.platform.state_hash()),
            "seq": snap.state.last_seq,
        })
    }
}

fn commitment_view(platform: &Platform, info: casino_core::CommitmentInfo) -> Value {
    let verified = info
        .server_seed
        .map(|seed| casino_core::fairness::verify_reveal(&seed, &info.commit_hash));
    let active = platform.fairness().active() == Some(info.commitment_id);
    let mut v = serde_json::to_value(&info).expect("serializes");
    v["active"] = Value::Bool(active);
    v["verified"] = verified.map_or(Value::Null, Value::Bool);
    v
}
