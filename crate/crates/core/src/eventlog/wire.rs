//! One JSON object per line:
//!
//! ```text
//! {"seq":0,"ts":1700000000000,"actor":"alice","type":"AddComment","args":{"post":"RANDOM"},"prevHash":"00..","hash":"9f.."}
//! ```
//!
//! Hashes are 64 lowercase hex digits. Parsing is strict: unknown fields,
//! uppercase hex or surrounding whitespace are all rejected, so every byte
//! of a line is significant.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::{ArgDefaults, EventRecord, Hash, Payload, PayloadError};

/// Wire spelling of a random post target.
pub const RANDOM: &str = "RANDOM";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("not UTF-8")]
    Encoding,
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("bad {0} hash")]
    Hash(&'static str),
    #[error(transparent)]
    Payload(#[from] PayloadError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRecord {
    seq: u64,
    ts: u64,
    actor: String,
    #[serde(rename = "type")]
    kind: String,
    args: Map<String, Value>,
    #[serde(rename = "prevHash")]
    prev_hash: String,
    hash: String,
}

fn decode_hash(text: &str, which: &'static str) -> Result<Hash, LineError> {
    if text.len() != 64 || !text.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        return Err(LineError::Hash(which));
    }
    let mut out = [0u8; 32];
    hex::decode_to_slice(text, &mut out).map_err(|_| LineError::Hash(which))?;
    Ok(out)
}

impl EventRecord {
    /// The record's line, without the trailing newline.
    pub fn to_line(&self) -> String {
        let wire = WireRecord {
            seq: self.seq,
            ts: self.timestamp,
            actor: self.actor.clone(),
            kind: self.payload.type_name().to_owned(),
            args: self.payload.args(),
            prev_hash: hex::encode(self.prev_hash),
            hash: hex::encode(self.hash),
        };
        serde_json::to_string(&wire).expect("records serialize")
    }

    pub fn from_line(line: &[u8]) -> Result<Self, LineError> {
        let text = std::str::from_utf8(line).map_err(|_| LineError::Encoding)?;
        if text.trim() != text {
            return Err(LineError::Json("surrounding whitespace".into()));
        }
        let wire: WireRecord = serde_json::from_str(text).map_err(|e| LineError::Json(e.to_string()))?;
        let payload = Payload::from_args(&wire.kind, &wire.args, ArgDefaults::Deny)?;
        // Arguments must be spelled exactly as the writer spells them.
        if payload.args() != wire.args {
            return Err(LineError::Json("non-canonical arguments".into()));
        }
        let record = EventRecord {
            seq: wire.seq,
            timestamp: wire.ts,
            actor: wire.actor,
            payload,
            prev_hash: decode_hash(&wire.prev_hash, "prevHash")?,
            hash: decode_hash(&wire.hash, "hash")?,
        };
        if record.to_line() != text {
            return Err(LineError::Json("non-canonical encoding".into()));
        }
        Ok(record)
    }
}
