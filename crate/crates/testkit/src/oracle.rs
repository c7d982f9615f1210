//! Brute-force model of the social tree.
//!
//! The model stores every accepted event with its resolved post and
//! recomputes counters by scanning the history each time they are needed.

use std::collections::BTreeMap;

use ltree_core::eventlog::Target;
use ltree_core::{NodeId, Payload, PostCounters, Status};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random post selections draw from this stream, one index per selection.
pub const SELECTION_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Touch {
    LikeAll,
    ViewAll,
    Like(u64),
    View(u64),
    Comment(u64),
    Share(u64),
    Other,
}

#[derive(Debug, Clone)]
struct PostRec {
    id: u64,
    born: usize,
    alive: bool,
    children: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reject {
    NoPosts,
    UnknownPost(u64),
}

#[derive(Debug, Clone)]
pub struct Oracle {
    seed: u64,
    history: Vec<Touch>,
    posts: Vec<PostRec>,
    friends: Vec<u64>,
    next_id: u64,
    draws: u64,
}

fn pick(seed: u64, draw: u64, n: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SELECTION_STREAM);
    rng.set_word_pos(u128::from(draw) * 16);
    rng.random_range(0..n)
}

impl Oracle {
    pub fn new(seed: u64) -> Self {
        Self { seed, history: Vec::new(), posts: Vec::new(), friends: Vec::new(), next_id: 1, draws: 0 }
    }

    fn fresh(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn live(&self) -> impl Iterator<Item = &PostRec> {
        self.posts.iter().filter(|p| p.alive)
    }

    pub fn live_posts(&self) -> Vec<u64> {
        self.live().map(|p| p.id).collect()
    }

    fn find_live(&self, id: u64) -> Result<usize, Reject> {
        self.posts.iter().position(|p| p.alive && p.id == id).ok_or(Reject::UnknownPost(id))
    }

    fn resolve(&mut self, target: Target) -> Result<usize, Reject> {
        match target {
            Target::Id(NodeId(id)) => self.find_live(id),
            Target::Random => {
                let live = self.live_posts();
                if live.is_empty() {
                    return Err(Reject::NoPosts);
                }
                let id = live[pick(self.seed, self.draws, live.len())];
                self.draws += 1;
                self.find_live(id)
            }
        }
    }

    /// Counts likes, shares and views of `post` over the whole history.
    fn count(&self, post: &PostRec) -> PostCounters {
        let mut c = PostCounters::default();
        for touch in &self.history[post.born + 1..] {
            match *touch {
                Touch::LikeAll => {
                    c.likes += 1;
                    c.views += 1;
                }
                Touch::ViewAll => c.views += 1,
                Touch::Like(p) if p == post.id => {
                    c.likes += 1;
                    c.views += 1;
                }
                Touch::View(p) | Touch::Comment(p) if p == post.id => c.views += 1,
                Touch::Share(p) if p == post.id => {
                    c.shares += 1;
                    c.views += 1;
                }
                _ => {}
            }
        }
        c
    }

    /// Applies one event; returns pruned ids for a prune.
    pub fn step(&mut self, payload: &Payload) -> Result<Vec<u64>, Reject> {
        let touch = match *payload {
            Payload::AddPost => {
                let id = self.fresh();
                self.posts.push(PostRec { id, born: self.history.len(), alive: true, children: 0 });
                Touch::Other
            }
            Payload::AddFriend => {
                let id = self.fresh();
                self.friends.push(id);
                Touch::Other
            }
            Payload::AddComment { post } | Payload::AddShare { post } => {
                let idx = self.resolve(post)?;
                self.fresh();
                self.posts[idx].children += 1;
                let id = self.posts[idx].id;
                if matches!(payload, Payload::AddComment { .. }) {
                    Touch::Comment(id)
                } else {
                    Touch::Share(id)
                }
            }
            Payload::LikeAll => Touch::LikeAll,
            Payload::ViewAll => Touch::ViewAll,
            Payload::Like { post } => Touch::Like(self.posts[self.find_live(post.0)?].id),
            Payload::View { post } => Touch::View(self.posts[self.find_live(post.0)?].id),
            Payload::Prune { threshold } => {
                let doomed: Vec<usize> = (0..self.posts.len())
                    .filter(|&i| self.posts[i].alive && self.count(&self.posts[i]).views > threshold)
                    .collect();
                self.history.push(Touch::Other);
                for &i in &doomed {
                    self.posts[i].alive = false;
                }
                return Ok(doomed.iter().map(|&i| self.posts[i].id).collect());
            }
        };
        self.history.push(touch);
        Ok(Vec::new())
    }

    /// Counters of every live post.
    pub fn counters(&self) -> BTreeMap<u64, PostCounters> {
        self.live().map(|p| (p.id, self.count(p))).collect()
    }

    pub fn friends(&self) -> &[u64] {
        &self.friends
    }

    pub fn status(&self) -> Status {
        let posts = self.live().count();
        let children: u64 = self.live().map(|p| p.children).sum();
        Status { branches: 1 + posts + self.friends.len() + children as usize, posts, friends: self.friends.len() }
    }
}
