//! The single mutation executor. Jobs are taken from one queue in arrival
//! order by one thread that owns the session; after each accepted event it
//! publishes a fresh [`View`] before replying.

use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use ltree_core::eventlog::{verify_log_bytes, Verification};
use ltree_core::session::{Applied, SessionError};
use ltree_core::{Payload, Session};
use tokio::sync::{mpsc, oneshot};

use crate::view::View;

pub enum Job {
    Apply { actor: String, payload: Payload, reply: oneshot::Sender<Result<Applied, SessionError>> },
    Verify { reply: oneshot::Sender<Verification> },
}

/// State shared between the executor and the readers.
#[derive(Debug)]
pub struct Shared {
    pub view: RwLock<Arc<View>>,
    pub lines: RwLock<Vec<Arc<str>>>,
}

impl Shared {
    pub fn current(&self) -> Arc<View> {
        self.view.read().expect("view lock").clone()
    }

    /// The log lines covered by `view`.
    pub fn log_json(&self, view: &View) -> String {
        let lines = self.lines.read().expect("lines lock");
        let mut out = String::from("[");
        for (i, line) in lines[..view.log_len].iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(line);
        }
        out.push(']');
        out
    }
}

pub fn spawn(session: Session, snapshot_path: Option<PathBuf>) -> (mpsc::UnboundedSender<Job>, Arc<Shared>) {
    let shared = Arc::new(Shared {
        view: RwLock::new(Arc::new(View::of(&session))),
        lines: RwLock::new(session.log().records().iter().map(|r| Arc::from(r.to_line())).collect()),
    });
    let (tx, mut rx) = mpsc::unbounded_channel::<Job>();
    let out = shared.clone();
    std::thread::Builder::new()
        .name("ltree-writer".into())
        .spawn(move || {
            let mut session = session;
            while let Some(job) = rx.blocking_recv() {
                match job {
                    Job::Apply { actor, payload, reply } => {
                        let result = session.apply(&actor, payload);
                        if result.is_ok() {
                            publish(&session, &shared, snapshot_path.as_deref());
                        }
                        let _ = reply.send(result);
                    }
                    Job::Verify { reply } => {
                        let _ = reply.send(verify(&session));
                    }
                }
            }
        })
        .expect("spawn writer thread");
    (tx, out)
}

fn publish(session: &Session, shared: &Shared, snapshot_path: Option<&std::path::Path>) {
    if let Some(last) = session.log().last() {
        shared.lines.write().expect("lines lock").push(Arc::from(last.to_line()));
    }
    *shared.view.write().expect("view lock") = Arc::new(View::of(session));
    if let Some(path) = snapshot_path {
        if let Err(e) = session.snapshot().write(path) {
            eprintln!("warning: snapshot not written: {e}");
        }
    }
}

/// Checks the bytes on disk when the log is file-backed, so that edits
/// made behind the server's back are caught too.
fn verify(session: &Session) -> Verification {
    match session.log().path() {
        Some(path) => match std::fs::read(path) {
            Ok(bytes) => verify_log_bytes(&bytes),
            Err(e) => Verification::Broken {
                seq: 0,
                violation: ltree_core::eventlog::Violation::Malformed(format!("unreadable log: {e}")),
            },
        },
        None => session.log().verify(),
    }
}
