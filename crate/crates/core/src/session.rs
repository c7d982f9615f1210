//! A tree paired with the log that produced it. Every accepted mutation is
//! appended to the log first and applied to the tree second, so the tree
//! always equals a replay of the log.

use thiserror::Error;

use crate::eventlog::{
    apply, check, replay, replay_from, Clock, EventEffect, EventLog, LogError, Payload, ReplayError, Snapshot,
    SystemClock,
};
use crate::layout::{layout, LayoutConfig};
use crate::social::{SocialError, SocialTree, Status};
use crate::turtle::{emit_svg, Geometry, SvgStyle};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Rejected(#[from] SocialError),
    #[error(transparent)]
    Log(#[from] LogError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub seq: u64,
    pub effect: EventEffect,
    pub status: Status,
}

pub struct Session {
    seed: u64,
    tree: SocialTree,
    log: EventLog,
    config: LayoutConfig,
    clock: Box<dyn Clock + Send + Sync>,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session").field("seed", &self.seed).field("events", &self.log.len()).finish_non_exhaustive()
    }
}

impl Session {
    /// Rebuilds the tree by replaying `log`.
    pub fn new(seed: u64, log: EventLog) -> Result<Self, ReplayError> {
        let tree = replay(log.records(), seed)?.tree;
        Ok(Self::assemble(seed, tree, log))
    }

    /// Rebuilds from `snapshot`, replaying only the records after it.
    pub fn resume(snapshot: &Snapshot, log: EventLog) -> Result<Self, ReplayError> {
        let tree = replay_from(snapshot, log.records())?.tree;
        Ok(Self::assemble(tree.seed(), tree, log))
    }

    fn assemble(seed: u64, tree: SocialTree, log: EventLog) -> Self {
        Self { seed, tree, log, config: LayoutConfig::default(), clock: Box::new(SystemClock) }
    }

    pub fn in_memory(seed: u64) -> Self {
        Self::assemble(seed, SocialTree::new(crate::eventlog::DEFAULT_OWNER, seed), EventLog::in_memory())
    }

    pub fn with_clock(mut self, clock: impl Clock + Send + Sync + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn with_layout(mut self, config: LayoutConfig) -> Self {
        self.config = config;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tree(&self) -> &SocialTree {
        &self.tree
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn status(&self) -> Status {
        self.tree.status()
    }

    /// Validates, appends, then applies. A rejected event leaves both the
    /// log and the tree untouched.
    pub fn apply(&mut self, actor: &str, payload: Payload) -> Result<Applied, SessionError> {
        check(&self.tree, &payload)?;
        if self.log.is_empty() {
            // The first record's actor owns the trunk, as on replay.
            self.tree = SocialTree::new(actor, self.seed);
        }
        let seq = self.log.append(actor, payload, self.clock.as_ref())?.seq;
        let effect = apply(&mut self.tree, actor, &payload).expect("checked event applies");
        Ok(Applied { seq, effect, status: self.tree.status() })
    }

    pub fn geometry(&self) -> Geometry {
        layout(&self.tree, &self.config)
    }

    pub fn svg(&self, style: &SvgStyle) -> String {
        emit_svg(&self.geometry(), style)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot::capture(&self.tree, &self.log)
    }
}
