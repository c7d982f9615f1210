//! Id-agnostic tree comparison and the filtered-log construction.

use std::collections::{BTreeMap, BTreeSet};

use ltree_core::eventlog::{EventEffect, FixedClock, Target};
use ltree_core::{EventLog, EventRecord, NodeId, NodeKind, Payload, PostCounters, SocialTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Branch {
    Post { author: String, counters: PostCounters, children: Vec<(NodeKind, String)> },
    Friend { author: String },
}

/// The trunk's branches in order, with ids erased. The trunk owner is left
/// out because a filtered log may start with a different actor.
pub fn shape(tree: &SocialTree) -> Vec<Branch> {
    tree.trunk()
        .children
        .iter()
        .map(|&id| {
            let n = tree.node(id).expect("child exists");
            match n.kind {
                NodeKind::Post => Branch::Post {
                    author: n.author.clone(),
                    counters: n.counters.expect("post counters"),
                    children: n
                        .children
                        .iter()
                        .map(|c| {
                            let c = tree.node(*c).expect("child exists");
                            (c.kind, c.author.clone())
                        })
                        .collect(),
                },
                _ => Branch::Friend { author: n.author.clone() },
            }
        })
        .collect()
}

/// The log as it would have been had the pruned posts never existed: prune
/// events and every event about a pruned post are dropped, random targets
/// are pinned to the posts they resolved to, and ids are renumbered.
pub fn filtered_log(records: &[EventRecord], effects: &[(u64, EventEffect)]) -> EventLog {
    let pruned: BTreeSet<NodeId> = effects.iter().flat_map(|(_, e)| e.pruned.iter().copied()).collect();
    let mut renumber: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut next = 1u64;
    let mut out = EventLog::in_memory();
    for (r, (_, effect)) in records.iter().zip(effects) {
        let about_pruned = match r.payload {
            Payload::Prune { .. } => true,
            Payload::AddPost => pruned.contains(&effect.created.expect("post created")),
            Payload::AddComment { .. } | Payload::AddShare { .. } | Payload::Like { .. } | Payload::View { .. } => {
                pruned.contains(&effect.target.expect("target resolved"))
            }
            _ => false,
        };
        if about_pruned {
            continue;
        }
        let pinned = |old: Option<NodeId>| renumber[&old.expect("target resolved")];
        let payload = match r.payload {
            Payload::AddComment { .. } => Payload::AddComment { post: Target::Id(pinned(effect.target)) },
            Payload::AddShare { .. } => Payload::AddShare { post: Target::Id(pinned(effect.target)) },
            Payload::Like { .. } => Payload::Like { post: pinned(effect.target) },
            Payload::View { .. } => Payload::View { post: pinned(effect.target) },
            p => p,
        };
        if let Some(old) = effect.created {
            renumber.insert(old, NodeId(next));
            next += 1;
        }
        out.append(&r.actor, payload, &FixedClock(r.timestamp)).expect("in-memory append");
    }
    out
}
