//! HTTP/JSON access to one tree and its log.
//!
//! | method | path        | body / result                                   |
//! |--------|-------------|-------------------------------------------------|
//! | POST   | `/events`   | `{actor?, type, args?}` → `{seq, status, ...}`  |
//! | GET    | `/state`    | status, posts with counters, friend ids         |
//! | GET    | `/geometry` | layout geometry of the current tree             |
//! | GET    | `/log`      | the log records as a JSON array                 |
//! | POST   | `/verify`   | `{ok}` or `{ok: false, seq, reason}`            |
//!
//! `POST /events` answers 400 for malformed bodies, 409 when a random
//! target is requested with no posts, 422 for an unknown post id and 415
//! when the content type is not JSON.

mod api;
mod view;
mod writer;

use std::net::SocketAddr;
use std::path::PathBuf;

use ltree_core::eventlog::{LogError, ReplayError, Snapshot, SnapshotError};
use ltree_core::{EventLog, Session};
use thiserror::Error;

pub use api::{parse_event, router, AppState};
pub use view::state_json;

/// Environment variable that takes precedence over `--log-path`.
pub const LOG_ENV: &str = "LTREE_LOG";

#[derive(Debug, Clone, Default)]
pub struct ServerConfig {
    pub port: u16,
    pub seed: u64,
    pub log_path: Option<PathBuf>,
    pub snapshot_path: Option<PathBuf>,
}

impl ServerConfig {
    /// The log path in effect: `LTREE_LOG` when set, else the flag.
    pub fn effective_log_path(&self) -> Option<PathBuf> {
        match std::env::var_os(LOG_ENV) {
            Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
            _ => self.log_path.clone(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("server i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Opens the log and rebuilds the tree, starting from the snapshot when
/// one exists and belongs to this log.
pub fn open_session(config: &ServerConfig) -> Result<Session, ServeError> {
    let log = match config.effective_log_path() {
        Some(path) => EventLog::open(path)?,
        None => EventLog::in_memory(),
    };
    if let Some(path) = config.snapshot_path.as_deref().filter(|p| p.exists()) {
        let snapshot = Snapshot::read(path)?;
        let anchored = match snapshot.last_seq {
            None => true,
            Some(seq) => log.records().get(seq as usize).is_some_and(|r| r.hash == snapshot.last_hash),
        };
        if anchored && snapshot.tree.seed() == config.seed {
            return Ok(Session::resume(&snapshot, log)?);
        }
        eprintln!("warning: snapshot does not match this log and seed, replaying in full");
    }
    Ok(Session::new(config.seed, log)?)
}

/// Serves until the process is stopped.
pub async fn serve(config: ServerConfig) -> Result<(), ServeError> {
    let session = open_session(&config)?;
    let app = router(AppState::new(session, config.snapshot_path.clone()));
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], config.port))).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await?;
    Ok(())
}

/// [`serve`] on a fresh multi-threaded runtime.
pub fn run(config: ServerConfig) -> Result<(), ServeError> {
    tokio::runtime::Builder::new_multi_thread().enable_all().build()?.block_on(serve(config))
}
