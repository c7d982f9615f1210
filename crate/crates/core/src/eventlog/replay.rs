use thiserror::Error;

use super::{verify_chain, EventRecord, Payload, Snapshot, Verification, Violation};
use crate::social::{NodeId, SocialError, SocialTree};

/// Trunk owner of a tree whose log is still empty.
pub const DEFAULT_OWNER: &str = "user";

/// What applying one event did, kept for audit: created node, resolved
/// post (random targets included), pruned posts, posts touched.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EventEffect {
    pub created: Option<NodeId>,
    pub target: Option<NodeId>,
    pub pruned: Vec<NodeId>,
    pub affected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("chain broken at seq {seq}: {violation}")]
    Chain { seq: u64, violation: Violation },
    #[error("event {seq} cannot be applied: {source}")]
    Apply { seq: u64, source: SocialError },
    #[error("snapshot does not belong to this log")]
    SnapshotMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replayed {
    pub tree: SocialTree,
    /// One entry per applied record, in seq order.
    pub effects: Vec<(u64, EventEffect)>,
}

/// Fails exactly when [`apply`] would, without touching the tree.
pub fn check(tree: &SocialTree, payload: &Payload) -> Result<(), SocialError> {
    match *payload {
        Payload::AddComment { post } | Payload::AddShare { post } => tree.peek_target(post).map(drop),
        Payload::Like { post } | Payload::View { post } => tree.counters(post).map(drop),
        _ => Ok(()),
    }
}

/// Applies one event. On error the tree is unchanged.
pub fn apply(tree: &mut SocialTree, actor: &str, payload: &Payload) -> Result<EventEffect, SocialError> {
    let mut effect = EventEffect::default();
    match *payload {
        Payload::AddPost => effect.created = Some(tree.add_post(actor)),
        Payload::AddFriend => effect.created = Some(tree.add_friend(actor)),
        Payload::AddComment { post } => {
            let id = tree.add_comment(post, actor)?;
            effect.created = Some(id);
            effect.target = tree.node(id).and_then(|n| n.parent);
        }
        Payload::AddShare { post } => {
            let id = tree.add_share(post, actor)?;
            effect.created = Some(id);
            effect.target = tree.node(id).and_then(|n| n.parent);
        }
        Payload::LikeAll => effect.affected = tree.like_all(),
        Payload::ViewAll => effect.affected = tree.view_all(),
        Payload::Like { post } => {
            tree.like(post)?;
            effect.target = Some(post);
            effect.affected = 1;
        }
        Payload::View { post } => {
            tree.view(post)?;
            effect.target = Some(post);
            effect.affected = 1;
        }
        Payload::Prune { threshold } => {
            effect.pruned = tree.prune(threshold);
            effect.affected = effect.pruned.len();
        }
    }
    Ok(effect)
}

fn apply_all(mut tree: SocialTree, records: &[EventRecord]) -> Result<Replayed, ReplayError> {
    let mut effects = Vec::with_capacity(records.len());
    for r in records {
        let effect =
            apply(&mut tree, &r.actor, &r.payload).map_err(|source| ReplayError::Apply { seq: r.seq, source })?;
        effects.push((r.seq, effect));
    }
    Ok(Replayed { tree, effects })
}

fn verified(records: &[EventRecord]) -> Result<(), ReplayError> {
    match verify_chain(records) {
        Verification::Ok => Ok(()),
        Verification::Broken { seq, violation } => Err(ReplayError::Chain { seq, violation }),
    }
}

/// Rebuilds the tree from a verified log. The genesis record's actor owns
/// the trunk; random targets are re-drawn from `seed`.
pub fn replay(records: &[EventRecord], seed: u64) -> Result<Replayed, ReplayError> {
    verified(records)?;
    let owner = records.first().map(|r| r.actor.as_str()).unwrap_or(DEFAULT_OWNER);
    apply_all(SocialTree::new(owner, seed), records)
}

/// Resumes from `snapshot`, applying only the records after it.
pub fn replay_from(snapshot: &Snapshot, records: &[EventRecord]) -> Result<Replayed, ReplayError> {
    let Some(seq) = snapshot.last_seq else {
        return replay(records, snapshot.tree.seed());
    };
    verified(records)?;
    let anchor = records.get(seq as usize).ok_or(ReplayError::SnapshotMismatch)?;
    if anchor.hash != snapshot.last_hash {
        return Err(ReplayError::SnapshotMismatch);
    }
    apply_all(snapshot.tree.clone(), &records[seq as usize + 1..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::{EventLog, FixedClock, Target};
    use crate::social::PostCounters;

    fn log(events: &[Payload]) -> EventLog {
        let mut log = EventLog::in_memory();
        for p in events {
            log.append("alice", *p, &FixedClock(0)).unwrap();
        }
        log
    }

    #[test]
    fn post_then_like() {
        let l = log(&[Payload::AddPost, Payload::LikeAll]);
        let out = replay(l.records(), 0).unwrap();
        let post = out.tree.posts().next().unwrap();
        assert_eq!(post.counters, Some(PostCounters::new(1, 0, 1)));
        assert_eq!(out.tree.owner(), "alice");
    }

    #[test]
    fn empty_log_gives_bare_trunk() {
        let out = replay(&[], 3).unwrap();
        assert_eq!(out.tree.status().branches, 1);
        assert_eq!(out.tree.owner(), DEFAULT_OWNER);
    }

    #[test]
    fn random_targets_are_recorded_in_effects() {
        let l = log(&[Payload::AddPost, Payload::AddPost, Payload::AddComment { post: Target::Random }]);
        let a = replay(l.records(), 9).unwrap();
        let b = replay(l.records(), 9).unwrap();
        assert_eq!(a, b);
        let (seq, effect) = &a.effects[2];
        assert_eq!(*seq, 2);
        assert!(effect.target.is_some());
    }

    #[test]
    fn corrupt_reference_aborts_with_seq() {
        let l = log(&[Payload::AddPost, Payload::View { post: NodeId(1) }, Payload::View { post: NodeId(7) }]);
        assert_eq!(
            replay(l.records(), 0),
            Err(ReplayError::Apply { seq: 2, source: SocialError::UnknownPost(NodeId(7)) })
        );
    }

    #[test]
    fn tampered_log_is_not_replayed() {
        let l = log(&[Payload::AddPost, Payload::LikeAll]);
        let mut records = l.records().to_vec();
        records[1].payload = Payload::ViewAll;
        assert!(matches!(replay(&records, 0), Err(ReplayError::Chain { seq: 1, .. })));
    }

    #[test]
    fn check_agrees_with_apply() {
        let mut t = SocialTree::new("a", 0);
        for p in [
            Payload::AddComment { post: Target::Random },
            Payload::Like { post: NodeId(1) },
            Payload::AddShare { post: Target::Id(NodeId(0)) },
        ] {
            assert!(check(&t, &p).is_err());
            let before = t.clone();
            assert!(apply(&mut t, "a", &p).is_err());
            assert_eq!(t, before);
        }
    }
}
