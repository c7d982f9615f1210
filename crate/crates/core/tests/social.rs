use std::collections::BTreeMap;

use ltree_core::eventlog::FixedClock;
use ltree_core::session::Session;
use ltree_core::social::SocialError;
use ltree_core::{NodeId, NodeKind, PostCounters, SocialTree};
use ltree_testkit::gen::{self, events, Mix};
use ltree_testkit::oracle::{Oracle, Reject};
use proptest::prelude::*;

fn live_counters(tree: &SocialTree) -> BTreeMap<u64, PostCounters> {
    tree.posts().map(|p| (p.id.0, p.counters.unwrap())).collect()
}

fn lockstep(seed: u64, len: usize, mix: Mix) -> Result<(), TestCaseError> {
    let mut s = Session::in_memory(seed).with_clock(FixedClock(0));
    let mut o = Oracle::new(seed);
    for (i, p) in events(seed, len, mix).iter().enumerate() {
        let expected = o.step(p);
        let got = s.apply("alice", *p);
        match (expected, got) {
            (Ok(pruned), Ok(applied)) => {
                let ids: Vec<u64> = applied.effect.pruned.iter().map(|n| n.0).collect();
                prop_assert_eq!(ids, pruned, "event {} {:?}", i, p);
            }
            (Err(Reject::NoPosts), Err(ltree_core::session::SessionError::Rejected(SocialError::NoPosts))) => {}
            (Err(Reject::UnknownPost(a)), Err(ltree_core::session::SessionError::Rejected(SocialError::UnknownPost(b)))) => {
                prop_assert_eq!(a, b.0)
            }
            (e, g) => prop_assert!(false, "event {} {:?}: oracle {:?}, tree {:?}", i, p, e, g),
        }
    }
    prop_assert_eq!(live_counters(s.tree()), o.counters());
    prop_assert_eq!(s.status(), o.status());
    let friends: Vec<u64> = s.tree().friends().map(|f| f.id.0).collect();
    prop_assert_eq!(friends.as_slice(), o.friends());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counters_match_brute_force(seed in any::<u64>(), len in 0usize..300) {
        lockstep(seed, len, Mix::default())?;
    }

    #[test]
    fn prune_is_exact(seed in any::<u64>(), len in 0usize..300, threshold in 0u64..60) {
        let s = gen::session(seed, len, Mix::growth());
        let before = s.tree().clone();
        let mut after = before.clone();
        let removed = after.prune(threshold);

        let expected: Vec<NodeId> = before
            .posts()
            .filter(|p| p.counters.unwrap().views > threshold)
            .map(|p| p.id)
            .collect();
        prop_assert_eq!(&removed, &expected);
        for node in before.nodes() {
            let doomed = match node.kind {
                NodeKind::Post => removed.contains(&node.id),
                NodeKind::Comment | NodeKind::Share => removed.contains(&node.parent.unwrap()),
                _ => false,
            };
            match after.node(node.id) {
                Some(kept) if node.kind == NodeKind::User => {
                    let survivors: Vec<NodeId> =
                        node.children.iter().copied().filter(|c| !removed.contains(c)).collect();
                    prop_assert_eq!(&kept.children, &survivors);
                }
                Some(kept) => {
                    prop_assert!(!doomed);
                    prop_assert_eq!(kept, node);
                }
                None => prop_assert!(doomed),
            }
        }
        for p in before.posts() {
            if p.counters.unwrap().views == threshold {
                prop_assert!(after.node(p.id).is_some());
            }
        }
        after.check_structure().map_err(TestCaseError::fail)?;
    }
}

#[test]
fn ten_thousand_events_stay_sound() {
    let mut s = Session::in_memory(77).with_clock(FixedClock(0));
    for (i, p) in events(77, 10_000, Mix::default()).into_iter().enumerate() {
        let _ = s.apply("alice", p);
        if i % 500 == 0 {
            s.tree().check_structure().unwrap();
        }
    }
    s.tree().check_structure().unwrap();
    assert!(s.log().len() > 5_000);
}

#[test]
fn views_at_threshold_survive() {
    let mut t = SocialTree::new("a", 0);
    let keep = t.add_post("a");
    let drop = t.add_post("a");
    for _ in 0..50 {
        t.view(keep).unwrap();
        t.view(drop).unwrap();
    }
    t.view(drop).unwrap();
    assert_eq!(t.prune(50), vec![drop]);
    assert_eq!(t.counters(keep).unwrap().views, 50);
}
