//! Append-only, hash-chained record of every tree mutation.
//!
//! Each record's hash is SHA-256 over
//!
//! ```text
//! u64 seq | u64 timestamp | str actor | payload | prevHash[32]
//! ```
//!
//! with integers big-endian and `str` a u32 byte length followed by UTF-8.
//! The payload encodes as `str type`, a u32 field count, then each field
//! sorted by name as `str name` followed by a tagged value:
//!
//! ```text
//! 0x00            random post target
//! 0x01 u64        post id
//! 0x02 u64        unsigned integer (prune threshold)
//! ```
//!
//! Record 0 chains from 32 zero bytes.

mod replay;
mod snapshot;
mod store;
mod wire;

use std::fmt;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::social::{NodeId, DEFAULT_PRUNE_THRESHOLD};

pub use crate::social::PostTarget as Target;
pub use replay::{apply, check, replay, replay_from, EventEffect, ReplayError, Replayed, DEFAULT_OWNER};
pub use snapshot::{Snapshot, SnapshotError, SNAPSHOT_MAGIC};
pub use store::{read_log, verify_log_bytes, Clock, EventLog, FixedClock, LogError, SystemClock};
pub use wire::{LineError, RANDOM};

pub type Hash = [u8; 32];

pub const GENESIS_HASH: Hash = [0; 32];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Payload {
    AddPost,
    AddFriend,
    AddComment { post: Target },
    AddShare { post: Target },
    LikeAll,
    ViewAll,
    Like { post: NodeId },
    View { post: NodeId },
    Prune { threshold: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PayloadError {
    #[error("unknown event type '{0}'")]
    UnknownType(String),
    #[error("unexpected argument '{0}'")]
    UnexpectedArg(String),
    #[error("missing argument '{0}'")]
    MissingArg(&'static str),
    #[error("argument '{0}' has an invalid value")]
    InvalidArg(&'static str),
}

/// Whether omitted arguments fall back to defaults (random target,
/// threshold 50) or are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgDefaults {
    Allow,
    Deny,
}

enum Field {
    Target(Target),
    Post(NodeId),
    Uint(u64),
}

impl Payload {
    pub const TYPES: [&'static str; 9] =
        ["AddPost", "AddFriend", "AddComment", "AddShare", "LikeAll", "ViewAll", "Like", "View", "Prune"];

    pub fn type_name(&self) -> &'static str {
        match self {
            Payload::AddPost => "AddPost",
            Payload::AddFriend => "AddFriend",
            Payload::AddComment { .. } => "AddComment",
            Payload::AddShare { .. } => "AddShare",
            Payload::LikeAll => "LikeAll",
            Payload::ViewAll => "ViewAll",
            Payload::Like { .. } => "Like",
            Payload::View { .. } => "View",
            Payload::Prune { .. } => "Prune",
        }
    }

    /// Named fields in name order.
    fn fields(&self) -> Vec<(&'static str, Field)> {
        match *self {
            Payload::AddComment { post } | Payload::AddShare { post } => vec![("post", Field::Target(post))],
            Payload::Like { post } | Payload::View { post } => vec![("post", Field::Post(post))],
            Payload::Prune { threshold } => vec![("threshold", Field::Uint(threshold))],
            _ => Vec::new(),
        }
    }

    /// The post this event addresses explicitly, if any.
    pub fn explicit_post(&self) -> Option<NodeId> {
        match *self {
            Payload::AddComment { post: Target::Id(p) }
            | Payload::AddShare { post: Target::Id(p) }
            | Payload::Like { post: p }
            | Payload::View { post: p } => Some(p),
            _ => None,
        }
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_str(&mut out, self.type_name());
        let fields = self.fields();
        out.extend_from_slice(&(fields.len() as u32).to_be_bytes());
        for (name, value) in fields {
            put_str(&mut out, name);
            match value {
                Field::Target(Target::Random) => out.push(0x00),
                Field::Target(Target::Id(id)) | Field::Post(id) => {
                    out.push(0x01);
                    out.extend_from_slice(&id.0.to_be_bytes());
                }
                Field::Uint(v) => {
                    out.push(0x02);
                    out.extend_from_slice(&v.to_be_bytes());
                }
            }
        }
        out
    }

    /// Arguments as a JSON object, the shape used on the wire.
    pub fn args(&self) -> Map<String, Value> {
        self.fields()
            .into_iter()
            .map(|(name, value)| {
                let v = match value {
                    Field::Target(Target::Random) => Value::from(RANDOM),
                    Field::Target(Target::Id(id)) | Field::Post(id) => Value::from(id.0),
                    Field::Uint(v) => Value::from(v),
                };
                (name.to_owned(), v)
            })
            .collect()
    }

    /// Builds a payload from a type name and JSON arguments. Unknown
    /// arguments are always rejected.
    pub fn from_args(kind: &str, args: &Map<String, Value>, defaults: ArgDefaults) -> Result<Self, PayloadError> {
        let allowed: &[&str] = match kind {
            "AddComment" | "AddShare" | "Like" | "View" => &["post"],
            "Prune" => &["threshold"],
            k if Self::TYPES.contains(&k) => &[],
            other => return Err(PayloadError::UnknownType(other.to_owned())),
        };
        if let Some(extra) = args.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(PayloadError::UnexpectedArg(extra.clone()));
        }
        let target = || -> Result<Target, PayloadError> {
            match args.get("post") {
                None if defaults == ArgDefaults::Allow => Ok(Target::Random),
                None => Err(PayloadError::MissingArg("post")),
                Some(Value::String(s)) if s == RANDOM => Ok(Target::Random),
                Some(v) => v.as_u64().map(|id| Target::Id(NodeId(id))).ok_or(PayloadError::InvalidArg("post")),
            }
        };
        let post = || -> Result<NodeId, PayloadError> {
            match args.get("post") {
                None => Err(PayloadError::MissingArg("post")),
                Some(v) => v.as_u64().map(NodeId).ok_or(PayloadError::InvalidArg("post")),
            }
        };
        Ok(match kind {
            "AddPost" => Payload::AddPost,
            "AddFriend" => Payload::AddFriend,
            "AddComment" => Payload::AddComment { post: target()? },
            "AddShare" => Payload::AddShare { post: target()? },
            "LikeAll" => Payload::LikeAll,
            "ViewAll" => Payload::ViewAll,
            "Like" => Payload::Like { post: post()? },
            "View" => Payload::View { post: post()? },
            "Prune" => Payload::Prune {
                threshold: match args.get("threshold") {
                    None if defaults == ArgDefaults::Allow => DEFAULT_PRUNE_THRESHOLD,
                    None => return Err(PayloadError::MissingArg("threshold")),
                    Some(v) => v.as_u64().ok_or(PayloadError::InvalidArg("threshold"))?,
                },
            },
            _ => unreachable!("type checked above"),
        })
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.type_name())?;
        let args = self.args();
        if !args.is_empty() {
            write!(f, " {}", Value::Object(args))?;
        }
        Ok(())
    }
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_be_bytes());
    out.extend_from_slice(s.as_bytes());
}

/// Exact byte string that a record's hash covers.
pub fn hash_input(seq: u64, timestamp: u64, actor: &str, payload: &Payload, prev_hash: &Hash) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&seq.to_be_bytes());
    out.extend_from_slice(&timestamp.to_be_bytes());
    put_str(&mut out, actor);
    out.extend_from_slice(&payload.canonical_bytes());
    out.extend_from_slice(prev_hash);
    out
}

pub fn record_hash(seq: u64, timestamp: u64, actor: &str, payload: &Payload, prev_hash: &Hash) -> Hash {
    Sha256::digest(hash_input(seq, timestamp, actor, payload, prev_hash))
        .as_slice()
        .try_into()
        .expect("sha-256 is 32 bytes")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub seq: u64,
    /// Milliseconds since the Unix epoch. Recorded, never replayed.
    pub timestamp: u64,
    pub actor: String,
    pub payload: Payload,
    pub prev_hash: Hash,
    pub hash: Hash,
}

impl EventRecord {
    /// Builds a correctly hashed record.
    pub fn seal(seq: u64, timestamp: u64, actor: &str, payload: Payload, prev_hash: Hash) -> Self {
        let hash = record_hash(seq, timestamp, actor, &payload, &prev_hash);
        Self { seq, timestamp, actor: actor.to_owned(), payload, prev_hash, hash }
    }

    pub fn recompute_hash(&self) -> Hash {
        record_hash(self.seq, self.timestamp, &self.actor, &self.payload, &self.prev_hash)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Malformed(String),
    Sequence { found: u64 },
    BrokenLink,
    HashMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Malformed(why) => write!(f, "malformed record: {why}"),
            Violation::Sequence { found } => write!(f, "sequence number {found} out of place"),
            Violation::BrokenLink => write!(f, "previous-hash link broken"),
            Violation::HashMismatch => write!(f, "hash does not match contents"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Ok,
    /// `seq` is the position of the first bad record.
    Broken { seq: u64, violation: Violation },
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verification::Ok)
    }
}

/// Checks sequence numbers, hash links and every recomputed hash.
pub fn verify_chain(records: &[EventRecord]) -> Verification {
    let mut prev = GENESIS_HASH;
    for (i, r) in records.iter().enumerate() {
        let seq = i as u64;
        let violation = if r.seq != seq {
            Some(Violation::Sequence { found: r.seq })
        } else if r.prev_hash != prev {
            Some(Violation::BrokenLink)
        } else if r.recompute_hash() != r.hash {
            Some(Violation::HashMismatch)
        } else {
            None
        };
        if let Some(violation) = violation {
            return Verification::Broken { seq, violation };
        }
        prev = r.hash;
    }
    Verification::Ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(payloads: &[Payload]) -> Vec<EventRecord> {
        let mut out: Vec<EventRecord> = Vec::new();
        for (i, p) in payloads.iter().enumerate() {
            let prev = out.last().map(|r| r.hash).unwrap_or(GENESIS_HASH);
            out.push(EventRecord::seal(i as u64, 1000 + i as u64, "alice", *p, prev));
        }
        out
    }

    #[test]
    fn canonical_layout_is_stable() {
        let bytes = Payload::Prune { threshold: 50 }.canonical_bytes();
        let mut expected = vec![0, 0, 0, 5];
        expected.extend_from_slice(b"Prune");
        expected.extend_from_slice(&[0, 0, 0, 1, 0, 0, 0, 9]);
        expected.extend_from_slice(b"threshold");
        expected.push(0x02);
        expected.extend_from_slice(&50u64.to_be_bytes());
        assert_eq!(bytes, expected);

        let bytes = Payload::AddComment { post: Target::Random }.canonical_bytes();
        assert_eq!(*bytes.last().unwrap(), 0x00);
        assert_ne!(
            Payload::AddComment { post: Target::Id(NodeId(1)) }.canonical_bytes(),
            Payload::AddShare { post: Target::Id(NodeId(1)) }.canonical_bytes()
        );
    }

    #[test]
    fn hash_matches_independent_sha256() {
        let r = EventRecord::seal(3, 77, "bob", Payload::Like { post: NodeId(4) }, [9; 32]);
        let mut input = Vec::new();
        input.extend_from_slice(&3u64.to_be_bytes());
        input.extend_from_slice(&77u64.to_be_bytes());
        input.extend_from_slice(&3u32.to_be_bytes());
        input.extend_from_slice(b"bob");
        input.extend_from_slice(&4u32.to_be_bytes());
        input.extend_from_slice(b"Like");
        input.extend_from_slice(&1u32.to_be_bytes());
        input.extend_from_slice(&4u32.to_be_bytes());
        input.extend_from_slice(b"post");
        input.push(0x01);
        input.extend_from_slice(&4u64.to_be_bytes());
        input.extend_from_slice(&[9; 32]);
        let digest: [u8; 32] = Sha256::digest(&input).as_slice().try_into().unwrap();
        assert_eq!(r.hash, digest);
    }

    #[test]
    fn verify_detects_each_violation() {
        let log = chain(&[Payload::AddPost, Payload::LikeAll, Payload::ViewAll, Payload::AddFriend]);
        assert_eq!(verify_chain(&log), Verification::Ok);
        assert_eq!(verify_chain(&[]), Verification::Ok);

        let mut bad = log.clone();
        bad[2].actor = "mallory".into();
        assert_eq!(verify_chain(&bad), Verification::Broken { seq: 2, violation: Violation::HashMismatch });

        let mut bad = log.clone();
        bad[1].prev_hash[0] ^= 1;
        assert_eq!(verify_chain(&bad), Verification::Broken { seq: 1, violation: Violation::BrokenLink });

        let mut bad = log.clone();
        bad.remove(1);
        assert!(matches!(verify_chain(&bad), Verification::Broken { seq: 1, violation: Violation::Sequence { found: 2 } }));
    }

    #[test]
    fn args_round_trip_through_json() {
        for p in [
            Payload::AddPost,
            Payload::AddComment { post: Target::Random },
            Payload::AddShare { post: Target::Id(NodeId(12)) },
            Payload::View { post: NodeId(3) },
            Payload::Prune { threshold: 7 },
        ] {
            assert_eq!(Payload::from_args(p.type_name(), &p.args(), ArgDefaults::Deny).unwrap(), p);
        }
    }

    #[test]
    fn argument_validation() {
        let empty = Map::new();
        assert_eq!(
            Payload::from_args("AddComment", &empty, ArgDefaults::Allow).unwrap(),
            Payload::AddComment { post: Target::Random }
        );
        assert_eq!(Payload::from_args("AddComment", &empty, ArgDefaults::Deny), Err(PayloadError::MissingArg("post")));
        assert_eq!(
            Payload::from_args("Prune", &empty, ArgDefaults::Allow).unwrap(),
            Payload::Prune { threshold: 50 }
        );
        assert_eq!(Payload::from_args("Like", &empty, ArgDefaults::Allow), Err(PayloadError::MissingArg("post")));
        assert!(matches!(Payload::from_args("Poke", &empty, ArgDefaults::Allow), Err(PayloadError::UnknownType(_))));
        let mut extra = Map::new();
        extra.insert("colour".into(), Value::from(1));
        assert!(matches!(Payload::from_args("AddPost", &extra, ArgDefaults::Allow), Err(PayloadError::UnexpectedArg(_))));
        let mut bad = Map::new();
        bad.insert("post".into(), Value::from("random"));
        assert_eq!(Payload::from_args("AddShare", &bad, ArgDefaults::Allow), Err(PayloadError::InvalidArg("post")));
        bad.insert("post".into(), Value::from(-1));
        assert_eq!(Payload::from_args("View", &bad, ArgDefaults::Allow), Err(PayloadError::InvalidArg("post")));
    }
}
