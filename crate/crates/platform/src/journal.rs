//! Append-only event journal: one JSON [`EventRecord`] per line.
//!
//! Records are hash-chained. `chain` is the lowercase hex of
//! `SHA-256(previous chain || "\n" || JSON of the record without chain)`,
//! starting from 64 zeros, so any edited, dropped or reordered line is
//! detected on load.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::StartupError;

pub const GENESIS_CHAIN: &str = "0000000000000000000000000000000000000000000000000000000000000000";
pub const OK: &str = "ok";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    pub ts: String,
    pub kind: String,
    pub payload: Value,
    /// `"ok"` or an error code.
    pub outcome: String,
    pub chain: String,
}

#[derive(Serialize)]
struct Unchained<'a> {
    seq: u64,
    ts: &'a str,
    kind: &'a str,
    payload: &'a Value,
    outcome: &'a str,
}

fn chain_hash(prev: &str, seq: u64, ts: &str, kind: &str, payload: &Value, outcome: &str) -> String {
    let body = serde_json::to_vec(&Unchained {
        seq,
        ts,
        kind,
        payload,
        outcome,
    })
    .expect("json values always serialize");
    let mut h = Sha256::new();
    h.update(prev.as_bytes());
    h.update(b"\n");
    h.update(&body);
    hex::encode(h.finalize())
}

impl EventRecord {
    pub fn is_ok(&self) -> bool {
        self.outcome == OK
    }

    fn expected_chain(&self, prev: &str) -> String {
        chain_hash(prev, self.seq, &self.ts, &self.kind, &self.payload, &self.outcome)
    }
}

/// Reads and validates every record in `path`. A missing file is an empty
/// journal.
pub fn read_journal(path: &Path) -> Result<Vec<EventRecord>, StartupError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut events = Vec::new();
    let mut prev = GENESIS_CHAIN.to_string();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let expected_seq = i as u64 + 1;
        let line = line?;
        let record: EventRecord = serde_json::from_str(&line)
            .map_err(|e| StartupError::corrupt(expected_seq, format!("unparseable line: {e}")))?;
        if record.seq != expected_seq {
            return Err(StartupError::corrupt(
                expected_seq,
                format!("found seq {} where {expected_seq} was expected", record.seq),
            ));
        }
        if record.expected_chain(&prev) != record.chain {
            return Err(StartupError::corrupt(expected_seq, "hash chain mismatch"));
        }
        prev.clone_from(&record.chain);
        events.push(record);
    }
    Ok(events)
}

/// Writer half of the journal. Every append is flushed to stable storage
/// before it returns.
#[derive(Debug)]
pub struct Journal {
    path: PathBuf,
    file: File,
    last_seq: u64,
    last_chain: String,
}

impl Journal {
    /// Opens `path` for appending after `existing` (as returned by
    /// [`read_journal`]).
    pub fn open(path: &Path, existing: &[EventRecord]) -> Result<Self, StartupError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let (last_seq, last_chain) = existing
            .last()
            .map_or((0, GENESIS_CHAIN.to_string()), |r| (r.seq, r.chain.clone()));
        Ok(Self {
            path: path.to_path_buf(),
            file,
            last_seq,
            last_chain,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    pub fn last_chain(&self) -> &str {
        &self.last_chain
    }

    pub fn append(&mut self, kind: &str, payload: Value, outcome: &str) -> std::io::Result<EventRecord> {
        let seq = self.last_seq + 1;
        let ts = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
        let chain = chain_hash(&self.last_chain, seq, &ts, kind, &payload, outcome);
        let record = EventRecord {
            seq,
            ts,
            kind: kind.to_string(),
            payload,
            outcome: outcome.to_string(),
            chain,
        };
        let mut line = serde_json::to_vec(&record)?;
        line.push(b'\n');
        self.file.write_all(&line)?;
        self.file.sync_data()?;
        self.last_seq = seq;
        self.last_chain.clone_from(&record.chain);
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn append_then_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.jsonl");
        let mut j = Journal::open(&path, &[]).unwrap();
        let a = j.append("a", json!({"x": 1}), OK).unwrap();
        let b = j.append("b", json!({}), "ZeroAmount").unwrap();
        assert_eq!((a.seq, b.seq), (1, 2));
        let events = read_journal(&path).unwrap();
        assert_eq!(events, vec![a, b.clone()]);

        let mut j = Journal::open(&path, &events).unwrap();
        assert_eq!(j.append("c", json!(null), OK).unwrap().seq, 3);
        assert_eq!(read_journal(&path).unwrap().len(), 3);
    }

    #[test]
    fn edits_break_the_chain() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.jsonl");
        let mut j = Journal::open(&path, &[]).unwrap();
        j.append("buy", json!({"tokens": 10}), OK).unwrap();
        j.append("buy", json!({"tokens": 20}), OK).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replacen("\"tokens\":10", "\"tokens\":99", 1)).unwrap();
        assert!(matches!(
            read_journal(&path),
            Err(StartupError::JournalCorrupt { seq: 1, .. })
        ));
    }

    #[test]
    fn missing_file_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert!(read_journal(&dir.path().join("none")).unwrap().is_empty());
    }
}
