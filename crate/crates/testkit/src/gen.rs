//! Seeded random event sequences.

use ltree_core::eventlog::{FixedClock, Target};
use ltree_core::session::Session;
use ltree_core::{NodeId, Payload};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ACTORS: [&str; 3] = ["alice", "bob", "carol"];

/// Event mix, as relative weights.
#[derive(Debug, Clone, Copy)]
pub struct Mix {
    pub post: u32,
    pub friend: u32,
    pub comment: u32,
    pub share: u32,
    pub like_all: u32,
    pub view_all: u32,
    pub like: u32,
    pub view: u32,
    pub prune: u32,
}

impl Default for Mix {
    fn default() -> Self {
        Self { post: 14, friend: 8, comment: 12, share: 8, like_all: 10, view_all: 22, like: 8, view: 14, prune: 4 }
    }
}

impl Mix {
    /// No prune events at all.
    pub fn growth() -> Self {
        Self { prune: 0, ..Self::default() }
    }
}

/// `len` events drawn from `mix`. Explicit targets name ids that may not
/// be live posts, so some events are expected to be rejected.
pub fn events(seed: u64, len: usize, mix: Mix) -> Vec<Payload> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = [
        mix.post, mix.friend, mix.comment, mix.share, mix.like_all, mix.view_all, mix.like, mix.view, mix.prune,
    ];
    let total: u32 = weights.iter().sum();
    let mut created = 1u64;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let mut roll = rng.random_range(0..total);
        let mut kind = 0;
        while roll >= weights[kind] {
            roll -= weights[kind];
            kind += 1;
        }
        let id = NodeId(rng.random_range(0..created + 1));
        let target = if rng.random_bool(0.8) { Target::Random } else { Target::Id(id) };
        let p = match kind {
            0 => Payload::AddPost,
            1 => Payload::AddFriend,
            2 => Payload::AddComment { post: target },
            3 => Payload::AddShare { post: target },
            4 => Payload::LikeAll,
            5 => Payload::ViewAll,
            6 => Payload::Like { post: id },
            7 => Payload::View { post: id },
            _ => Payload::Prune { threshold: if rng.random_bool(0.5) { 50 } else { rng.random_range(0..30) } },
        };
        if matches!(p, Payload::AddPost | Payload::AddFriend | Payload::AddComment { .. } | Payload::AddShare { .. }) {
            created += 1;
        }
        out.push(p);
    }
    out
}

/// Drives a session with random events, keeping only accepted ones.
pub fn session(seed: u64, len: usize, mix: Mix) -> Session {
    let mut s = Session::in_memory(seed).with_clock(FixedClock(1_700_000_000_000 + seed));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for p in events(seed, len, mix) {
        let actor = ACTORS[rng.random_range(0..ACTORS.len())];
        let _ = s.apply(actor, p);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(events(4, 100, Mix::default()), events(4, 100, Mix::default()));
        assert!(!events(4, 200, Mix::growth()).iter().any(|p| matches!(p, Payload::Prune { .. })));
        assert!(session(4, 200, Mix::default()).log().len() > 100);
    }
}
