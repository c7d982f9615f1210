use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use thiserror::Error;

use super::{verify_chain, EventRecord, Payload, Verification, Violation, GENESIS_HASH};

pub trait Clock {
    fn now_ms(&self) -> u64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FixedClock(pub u64);

impl Clock for FixedClock {
    fn now_ms(&self) -> u64 {
        self.0
    }
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("log i/o on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("log chain broken at seq {seq}: {violation}")]
    Broken { seq: u64, violation: Violation },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> LogError + '_ {
    move |source| LogError::Io { path: path.to_owned(), source }
}

/// Parses a log file's bytes line by line and verifies the chain. A line
/// that fails to parse is reported at its own position.
pub fn verify_log_bytes(bytes: &[u8]) -> Verification {
    match parse_lines(bytes) {
        Ok(records) => verify_chain(&records),
        Err((seq, why)) => Verification::Broken { seq, violation: Violation::Malformed(why) },
    }
}

fn parse_lines(bytes: &[u8]) -> Result<Vec<EventRecord>, (u64, String)> {
    let mut records = Vec::new();
    if bytes.is_empty() {
        return Ok(records);
    }
    let body = bytes.strip_suffix(b"\n").ok_or((count_lines(bytes), "missing final newline".to_owned()))?;
    for (i, line) in body.split(|&b| b == b'\n').enumerate() {
        let record = EventRecord::from_line(line).map_err(|e| (i as u64, e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

fn count_lines(bytes: &[u8]) -> u64 {
    bytes.iter().filter(|&&b| b == b'\n').count() as u64
}

/// Reads and verifies a log file. A missing file is an empty log.
pub fn read_log(path: &Path) -> Result<Vec<EventRecord>, LogError> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(io_err(path)(e)),
    };
    let records = parse_lines(&bytes)
        .map_err(|(seq, why)| LogError::Broken { seq, violation: Violation::Malformed(why) })?;
    match verify_chain(&records) {
        Verification::Ok => Ok(records),
        Verification::Broken { seq, violation } => Err(LogError::Broken { seq, violation }),
    }
}

/// The in-process view of a log, optionally mirrored to a file that every
/// append reaches (and syncs) before returning.
#[derive(Debug)]
pub struct EventLog {
    records: Vec<EventRecord>,
    sink: Option<(PathBuf, File)>,
}

impl EventLog {
    pub fn in_memory() -> Self {
        Self { records: Vec::new(), sink: None }
    }

    /// Wraps already-verified records without a backing file.
    pub fn from_records(records: Vec<EventRecord>) -> Result<Self, LogError> {
        match verify_chain(&records) {
            Verification::Ok => Ok(Self { records, sink: None }),
            Verification::Broken { seq, violation } => Err(LogError::Broken { seq, violation }),
        }
    }

    /// Opens (or creates) a file-backed log, verifying what is already there.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LogError> {
        let path = path.as_ref();
        let records = read_log(path)?;
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err(path))?;
        Ok(Self { records, sink: Some((path.to_owned(), file)) })
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn path(&self) -> Option<&Path> {
        self.sink.as_ref().map(|(p, _)| p.as_path())
    }

    pub fn last(&self) -> Option<&EventRecord> {
        self.records.last()
    }

    pub fn verify(&self) -> Verification {
        verify_chain(&self.records)
    }

    /// Seals and stores the next record.
    pub fn append(&mut self, actor: &str, payload: Payload, clock: &dyn Clock) -> Result<&EventRecord, LogError> {
        let seq = self.records.len() as u64;
        let prev = self.records.last().map(|r| r.hash).unwrap_or(GENESIS_HASH);
        let record = EventRecord::seal(seq, clock.now_ms(), actor, payload, prev);
        if let Some((path, file)) = &mut self.sink {
            let mut line = record.to_line();
            line.push('\n');
            file.write_all(line.as_bytes()).map_err(io_err(path))?;
            file.sync_data().map_err(io_err(path))?;
        }
        self.records.push(record);
        Ok(self.records.last().expect("just pushed"))
    }

    /// Full file contents for these records.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<(), LogError> {
        std::fs::write(path, self.to_text()).map_err(io_err(path))
    }
}
