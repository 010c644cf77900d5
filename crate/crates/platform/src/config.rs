//! Service configuration, read from a TOML key-value file.
//!
//! ```toml
//! listen_addr = "127.0.0.1:8080"
//! journal_path = "/var/lib/casino/journal.jsonl"
//! owner_credential = "change-me"
//! tokens_per_base_unit = 1
//! strict_lending = false
//! snapshot_interval = 1000
//! ```

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use casino_core::{AccountId, ExchangeRate, LendingPolicy, PlatformConfig};
use serde::Deserialize;

use crate::error::StartupError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_listen")]
    listen_addr: SocketAddr,
    journal_path: PathBuf,
    owner_credential: String,
    #[serde(default = "default_owner_id")]
    owner_id: String,
    #[serde(default = "default_rate")]
    tokens_per_base_unit: u64,
    #[serde(default)]
    strict_lending: bool,
    #[serde(default = "default_snapshot_interval")]
    snapshot_interval: u64,
    #[serde(default)]
    journal_key: Option<String>,
    #[serde(default = "default_min_rate")]
    min_loan_rate_percent: u32,
    #[serde(default = "default_max_rate")]
    max_loan_rate_percent: u32,
}

fn default_listen() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}

fn default_owner_id() -> String {
    "owner".into()
}

fn default_rate() -> u64 {
    1
}

fn default_snapshot_interval() -> u64 {
    1000
}

fn default_min_rate() -> u32 {
    LendingPolicy::default().min_rate_percent
}

fn default_max_rate() -> u32 {
    LendingPolicy::default().max_rate_percent
}

#[derive(Clone, Debug)]
pub struct Config {
    pub listen_addr: SocketAddr,
    pub journal_path: PathBuf,
    pub owner_credential: String,
    pub owner_id: AccountId,
    pub rate: ExchangeRate,
    pub lending: LendingPolicy,
    /// Write a snapshot after every this many events; 0 disables snapshots.
    pub snapshot_interval: u64,
    /// Secret for sealing server seeds in the journal. Derived from the
    /// owner credential when absent.
    pub journal_key: Option<String>,
}

impl Config {
    /// Minimal configuration for the given journal, with defaults elsewhere.
    pub fn new(journal_path: impl Into<PathBuf>, owner_credential: impl Into<String>) -> Self {
        Self {
            listen_addr: default_listen(),
            journal_path: journal_path.into(),
            owner_credential: owner_credential.into(),
            owner_id: AccountId::new(default_owner_id()).expect("valid default"),
            rate: ExchangeRate::default(),
            lending: LendingPolicy::default(),
            snapshot_interval: default_snapshot_interval(),
            journal_key: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, StartupError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| StartupError::ConfigInvalid(e.to_string()))?;
        let invalid = |msg: &str| StartupError::ConfigInvalid(msg.into());
        if raw.owner_credential.is_empty() {
            return Err(invalid("owner_credential must not be empty"));
        }
        let owner_id = AccountId::new(raw.owner_id).map_err(|_| invalid("owner_id must be 1 to 64 characters"))?;
        let rate = ExchangeRate::new(raw.tokens_per_base_unit)
            .map_err(|_| invalid("tokens_per_base_unit must be positive"))?;
        if raw.min_loan_rate_percent == 0 || raw.min_loan_rate_percent > raw.max_loan_rate_percent {
            return Err(invalid("loan rate interval must satisfy 1 <= min <= max"));
        }
        Ok(Self {
            listen_addr: raw.listen_addr,
            journal_path: raw.journal_path,
            owner_credential: raw.owner_credential,
            owner_id,
            rate,
            lending: LendingPolicy {
                min_rate_percent: raw.min_loan_rate_percent,
                max_rate_percent: raw.max_loan_rate_percent,
                strict: raw.strict_lending,
            },
            snapshot_interval: raw.snapshot_interval,
            journal_key: raw.journal_key,
        })
    }

    pub fn load(path: &Path) -> Result<Self, StartupError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| StartupError::ConfigInvalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn platform_config(&self) -> PlatformConfig {
        PlatformConfig {
            lending: self.lending,
            keep_history: true,
        }
    }

    pub fn snapshot_path(&self) -> PathBuf {
        let mut name = self.journal_path.as_os_str().to_owned();
        name.push(".snapshot");
        PathBuf::from(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let c = Config::parse(
            r#"
            # comment
            listen_addr = "0.0.0.0:9000"
            journal_path = "j.jsonl"
            owner_credential = "s3cret"
            tokens_per_base_unit = 5
            strict_lending = true
            snapshot_interval = 10
            "#,
        )
        .unwrap();
        assert_eq!(c.listen_addr.port(), 9000);
        assert_eq!(c.rate.tokens_per_base_unit(), 5);
        assert!(c.lending.strict);
        assert_eq!(c.snapshot_interval, 10);
        assert_eq!(c.owner_id.as_str(), "owner");
        assert_eq!(c.snapshot_path(), PathBuf::from("j.jsonl.snapshot"));
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "journal_path = \"j\"",
            "journal_path = \"j\"\nowner_credential = \"\"",
            "journal_path = \"j\"\nowner_credential = \"x\"\ntokens_per_base_unit = 0",
            "journal_path = \"j\"\nowner_credential = \"x\"\nunknown = 1",
            "journal_path = \"j\"\nowner_credential = \"x\"\nmin_loan_rate_percent = 5\nmax_loan_rate_percent = 4",
            "not toml at all",
        ] {
            assert!(
                matches!(Config::parse(text), Err(StartupError::ConfigInvalid(_))),
                "{text}"
            );
        }
    }
}
