//! Commit-reveal randomness.
//!
//! The house publishes `SHA-256(server_seed)` before any stake is placed.
//! Each draw hashes `server_seed ‖ client_seed ‖ nonce_be64` (plus a
//! big-endian `u32` retry counter on rejected attempts), reads the first
//! eight digest bytes as a big-endian `u64` and rejects values in the
//! biased tail before reducing modulo `n`. Once every round that used a
//! commitment has settled, the seed may be revealed and every outcome
//! recomputed by anyone.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAX_CLIENT_SEED_LEN: usize = 64;

pub type ServerSeed = [u8; 32];
pub type Digest32 = [u8; 32];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CommitmentId(pub u64);

impl fmt::Display for CommitmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Player-chosen entropy mixed into every draw, at most 64 bytes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ClientSeed(String);

impl ClientSeed {
    pub fn new(seed: impl Into<String>) -> Result<Self> {
        let seed = seed.into();
        if seed.len() > MAX_CLIENT_SEED_LEN {
            return Err(Error::ClientSeedTooLong);
        }
        Ok(Self(seed))
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ClientSeed {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Self::new(value)
    }
}

impl From<ClientSeed> for String {
    fn from(seed: ClientSeed) -> Self {
        seed.0
    }
}

pub fn commit_hash(seed: &ServerSeed) -> Digest32 {
    Sha256::digest(seed).into()
}

/// Digest for one draw attempt. Attempt 0 carries no retry suffix.
pub fn draw_digest(seed: &ServerSeed, client_seed: &[u8], nonce: u64, attempt: u32) -> Digest32 {
    let mut hasher = Sha256::new();
    hasher.update(seed);
    hasher.update(client_seed);
    hasher.update(nonce.to_be_bytes());
    if attempt > 0 {
        hasher.update(attempt.to_be_bytes());
    }
    hasher.finalize().into()
}

/// Rejection step over a `width_bits`-bit uniform word: accepts `x` only
/// below the largest multiple of `n` that fits, then reduces.
pub fn reduce(x: u64, n: u64, width_bits: u32) -> Option<u64> {
    debug_assert!(n >= 1 && (1..=64).contains(&width_bits));
    let space: u128 = 1u128 << width_bits;
    let zone = space - space % n as u128;
    ((x as u128) < zone).then(|| x % n)
}

/// Uniform integer in `[0, n)` from a seed triple.
pub fn draw_uniform_from_seed(
    seed: &ServerSeed,
    client_seed: &[u8],
    nonce: u64,
    n: u64,
) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroRange);
    }
    let mut attempt = 0u32;
    loop {
        let digest = draw_digest(seed, client_seed, nonce, attempt);
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        if let Some(value) = reduce(u64::from_be_bytes(word), n, 64) {
            return Ok(value);
        }
        attempt += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    pub id: CommitmentId,
    #[serde(with = "crate::hexbytes")]
    pub commit_hash: Digest32,
    /// Sealed until reveal; never serialized.
    #[serde(skip)]
    server_seed: Option<ServerSeed>,
    #[serde(with = "crate::hexbytes::option", default)]
    pub revealed_seed: Option<ServerSeed>,
    pub next_nonce: u64,
    /// Blackjack sessions still drawing from this commitment.
    pub open_rounds: u32,
}

impl Commitment {
    pub fn revealed(&self) -> bool {
        self.revealed_seed.is_some()
    }
}

/// What the house may publish about a commitment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentInfo {
    pub commitment_id: CommitmentId,
    #[serde(with = "crate::hexbytes")]
    pub commit_hash: Digest32,
    pub revealed: bool,
    #[serde(with = "crate::hexbytes::option", default)]
    pub server_seed: Option<ServerSeed>,
    pub next_nonce: u64,
    pub open_rounds: u32,
}

impl From<&Commitment> for CommitmentInfo {
    fn from(c: &Commitment) -> Self {
        Self {
            commitment_id: c.id,
            commit_hash: c.commit_hash,
            revealed: c.revealed(),
            server_seed: c.revealed_seed,
            next_nonce: c.next_nonce,
            open_rounds: c.open_rounds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentTable {
    commitments: BTreeMap<CommitmentId, Commitment>,
    next_id: u64,
    active: Option<CommitmentId>,
}

impl Default for CommitmentTable {
    fn default() -> Self {
        Self {
            commitments: BTreeMap::new(),
            next_id: 1,
            active: None,
        }
    }
}

impl CommitmentTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: CommitmentId) -> Option<&Commitment> {
        self.commitments.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Commitment> {
        self.commitments.values()
    }

    /// The commitment new rounds draw from.
    pub fn active(&self) -> Option<CommitmentId> {
        self.active
    }

    pub fn next_id(&self) -> CommitmentId {
        CommitmentId(self.next_id)
    }

    /// Registers a freshly drawn server seed, publishes its hash and makes
    /// it the active commitment.
    pub fn open(&mut self, server_seed: ServerSeed) -> (CommitmentId, Digest32) {
        let id = CommitmentId(self.next_id);
        self.next_id += 1;
        let hash = commit_hash(&server_seed);
        self.commitments.insert(
            id,
            Commitment {
                id,
                commit_hash: hash,
                server_seed: Some(server_seed),
                revealed_seed: None,
                next_nonce: 0,
                open_rounds: 0,
            },
        );
        self.active = Some(id);
        (id, hash)
    }

    pub fn ensure_drawable(&self, id: CommitmentId) -> Result<()> {
        let c = self.commitments.get(&id).ok_or(Error::UnknownCommitment)?;
        if c.revealed() {
            return Err(Error::AlreadyRevealed);
        }
        if c.server_seed.is_none() {
            return Err(Error::SeedUnavailable);
        }
        Ok(())
    }

    /// Pure draw at an explicit nonce.
    pub fn draw_uniform(
        &self,
        id: CommitmentId,
        client_seed: &ClientSeed,
        nonce: u64,
        n: u64,
    ) -> Result<u64> {
        let c = self.commitments.get(&id).ok_or(Error::UnknownCommitment)?;
        if c.revealed() {
            return Err(Error::AlreadyRevealed);
        }
        if n == 0 {
            return Err(Error::ZeroRange);
        }
        let seed = c.server_seed.as_ref().ok_or(Error::SeedUnavailable)?;
        draw_uniform_from_seed(seed, client_seed.as_bytes(), nonce, n)
    }

    /// Consumes the next nonce of `id` and draws with it.
    /// Returns `(nonce, value)`.
    pub fn next_draw(
        &mut self,
        id: CommitmentId,
        client_seed: &ClientSeed,
        n: u64,
    ) -> Result<(u64, u64)> {
        let nonce = self.commitments.get(&id).ok_or(Error::UnknownCommitment)?.next_nonce;
        let value = self.draw_uniform(id, client_seed, nonce, n)?;
        if let Some(c) = self.commitments.get_mut(&id) {
            c.next_nonce = nonce.checked_add(1).ok_or(Error::Overflow)?;
        }
        Ok((nonce, value))
    }

    pub(crate) fn add_open_round(&mut self, id: CommitmentId) {
        if let Some(c) = self.commitments.get_mut(&id) {
            c.open_rounds += 1;
        }
    }

    pub(crate) fn close_open_round(&mut self, id: CommitmentId) {
        if let Some(c) = self.commitments.get_mut(&id) {
            c.open_rounds = c.open_rounds.saturating_sub(1);
        }
    }

    /// Publishes the seed and closes the commitment for further draws.
    pub fn reveal(&mut self, id: CommitmentId) -> Result<ServerSeed> {
        let c = self.commitments.get_mut(&id).ok_or(Error::UnknownCommitment)?;
        if c.revealed() {
            return Err(Error::AlreadyRevealed);
        }
        if c.open_rounds > 0 {
            return Err(Error::OpenRoundsRemain);
        }
        let seed = c.server_seed.ok_or(Error::SeedUnavailable)?;
        c.revealed_seed = Some(seed);
        if self.active == Some(id) {
            self.active = None;
        }
        Ok(seed)
    }

    /// Unrevealed seeds, for sealing into snapshots.
    pub fn sealed_seeds(&self) -> Vec<(CommitmentId, ServerSeed)> {
        self.commitments
            .values()
            .filter(|c| !c.revealed())
            .filter_map(|c| c.server_seed.map(|s| (c.id, s)))
            .collect()
    }

    /// Reloads a sealed seed after deserialization.
    pub fn restore_seed(&mut self, id: CommitmentId, seed: ServerSeed) -> Result<()> {
        let c = self.commitments.get_mut(&id).ok_or(Error::UnknownCommitment)?;
        if commit_hash(&seed) != c.commit_hash {
            return Err(Error::CommitmentMismatch);
        }
        c.server_seed = Some(seed);
        Ok(())
    }

    pub(crate) fn restore_revealed_seeds(&mut self) {
        for c in self.commitments.values_mut() {
            if let Some(seed) = c.revealed_seed {
                c.server_seed = Some(seed);
            }
        }
    }
}

/// True when `seed` opens `hash`.
pub fn verify_reveal(seed: &ServerSeed, hash: &Digest32) -> bool {
    commit_hash(seed) == *hash
}
