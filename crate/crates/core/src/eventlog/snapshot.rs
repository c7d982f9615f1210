//! Snapshot file layout:
//!
//! ```text
//! "LTREE1"        magic and version
//! u8              1 when a record has been applied, else 0
//! u64             last applied seq (0 when none)
//! [u8; 32]        hash of that record (zeros when none)
//! u32             body length
//! body            JSON tree, including its random-selection state
//! ```
//!
//! Integers are big-endian.

use std::io;
use std::path::Path;

use thiserror::Error;

use super::{EventLog, Hash, GENESIS_HASH};
use crate::social::SocialTree;

pub const SNAPSHOT_MAGIC: &[u8; 6] = b"LTREE1";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not a snapshot file (bad header)")]
    BadHeader,
    #[error("snapshot truncated")]
    Truncated,
    #[error("snapshot body: {0}")]
    Body(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub tree: SocialTree,
    pub last_seq: Option<u64>,
    pub last_hash: Hash,
}

impl Snapshot {
    /// Captures `tree` as the result of applying all of `log`.
    pub fn capture(tree: &SocialTree, log: &EventLog) -> Self {
        Self {
            tree: tree.clone(),
            last_seq: log.last().map(|r| r.seq),
            last_hash: log.last().map(|r| r.hash).unwrap_or(GENESIS_HASH),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let body = serde_json::to_vec(&self.tree).expect("tree serializes");
        let mut out = Vec::with_capacity(51 + body.len());
        out.extend_from_slice(SNAPSHOT_MAGIC);
        out.push(u8::from(self.last_seq.is_some()));
        out.extend_from_slice(&self.last_seq.unwrap_or(0).to_be_bytes());
        out.extend_from_slice(&self.last_hash);
        out.extend_from_slice(&(body.len() as u32).to_be_bytes());
        out.extend_from_slice(&body);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SnapshotError> {
        let rest = bytes.strip_prefix(SNAPSHOT_MAGIC.as_slice()).ok_or(SnapshotError::BadHeader)?;
        if rest.len() < 45 {
            return Err(SnapshotError::Truncated);
        }
        let has_seq = match rest[0] {
            0 => false,
            1 => true,
            _ => return Err(SnapshotError::BadHeader),
        };
        let seq = u64::from_be_bytes(rest[1..9].try_into().expect("8 bytes"));
        let last_hash: Hash = rest[9..41].try_into().expect("32 bytes");
        let len = u32::from_be_bytes(rest[41..45].try_into().expect("4 bytes")) as usize;
        let body = rest.get(45..45 + len).ok_or(SnapshotError::Truncated)?;
        if rest.len() != 45 + len {
            return Err(SnapshotError::BadHeader);
        }
        Ok(Self { tree: serde_json::from_slice(body)?, last_seq: has_seq.then_some(seq), last_hash })
    }

    /// Writes via a temporary file and rename so readers never see a
    /// partial snapshot.
    pub fn write(&self, path: &Path) -> Result<(), SnapshotError> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_bytes())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, SnapshotError> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::{apply, replay, replay_from, FixedClock, Payload, ReplayError, Target};

    fn build(events: &[Payload]) -> (EventLog, SocialTree) {
        let mut log = EventLog::in_memory();
        let mut tree = SocialTree::new("alice", 5);
        for p in events {
            apply(&mut tree, "alice", p).unwrap();
            log.append("alice", *p, &FixedClock(0)).unwrap();
        }
        (log, tree)
    }

    #[test]
    fn bytes_round_trip() {
        let (log, tree) = build(&[Payload::AddPost, Payload::AddComment { post: Target::Random }]);
        let snap = Snapshot::capture(&tree, &log);
        let bytes = snap.to_bytes();
        assert!(bytes.starts_with(b"LTREE1"));
        assert_eq!(Snapshot::from_bytes(&bytes).unwrap(), snap);
        assert!(matches!(Snapshot::from_bytes(b"LTREE2xxxx"), Err(SnapshotError::BadHeader)));
        assert!(matches!(Snapshot::from_bytes(&bytes[..20]), Err(SnapshotError::Truncated)));
    }

    #[test]
    fn resume_equals_full_replay() {
        let events = [
            Payload::AddPost,
            Payload::AddPost,
            Payload::AddComment { post: Target::Random },
            Payload::LikeAll,
            Payload::AddShare { post: Target::Random },
            Payload::Prune { threshold: 1 },
            Payload::AddPost,
            Payload::AddComment { post: Target::Random },
        ];
        let (log, _) = build(&events);
        let full = replay(log.records(), 5).unwrap().tree;
        for k in 0..=events.len() {
            let prefix = EventLog::from_records(log.records()[..k].to_vec()).unwrap();
            let partial = replay(prefix.records(), 5).unwrap().tree;
            let snap = Snapshot::capture(&partial, &prefix);
            let resumed = replay_from(&snap, log.records()).unwrap().tree;
            assert_eq!(resumed, full, "snapshot after {k} events");
        }
    }

    #[test]
    fn foreign_snapshot_is_rejected() {
        let (log, tree) = build(&[Payload::AddPost]);
        let mut snap = Snapshot::capture(&tree, &log);
        snap.last_hash[0] ^= 1;
        assert_eq!(replay_from(&snap, log.records()), Err(ReplayError::SnapshotMismatch));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tree.snap");
        let (log, tree) = build(&[Payload::AddFriend]);
        let snap = Snapshot::capture(&tree, &log);
        snap.write(&path).unwrap();
        assert_eq!(Snapshot::read(&path).unwrap(), snap);
    }
}
