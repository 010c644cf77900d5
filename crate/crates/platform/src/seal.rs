//! Encryption at rest for server seeds written to the journal and snapshots.
//!
//! Each seed is XORed with `SHA-256(key || "seal" || commitment_id)`. A
//! commitment id is used exactly once, so no keystream block is reused.

use casino_core::{CommitmentId, ServerSeed};
use sha2::{Digest, Sha256};

#[derive(Clone)]
pub struct Sealer {
    key: [u8; 32],
}

impl Sealer {
    pub fn from_secret(secret: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"casino-journal-key\0");
        h.update(secret.as_bytes());
        Self {
            key: h.finalize().into(),
        }
    }

    fn keystream(&self, id: CommitmentId) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update(b"seal");
        h.update(id.0.to_be_bytes());
        h.finalize().into()
    }

    pub fn seal(&self, id: CommitmentId, seed: &ServerSeed) -> [u8; 32] {
        let ks = self.keystream(id);
        core::array::from_fn(|i| seed[i] ^ ks[i])
    }

    pub fn unseal(&self, id: CommitmentId, sealed: &[u8; 32]) -> ServerSeed {
        self.seal(id, sealed)
    }
}

impl std::fmt::Debug for Sealer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Sealer(..)")
    }
}
