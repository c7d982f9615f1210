//! The account tree: a user trunk carrying post and friend branches, with
//! comment and share leaves on posts.
//!
//! Mutations mirror the interactive key bindings (add post, add friend,
//! comment or share on a random post, like or view every post, prune) plus
//! addressable single-post variants.

mod lstring;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

pub use lstring::{
    tree_to_lstring, FRIEND_PREFIX, POST_PREFIX, SEGMENTS_PER_FRIEND, SEGMENTS_PER_LEAF, SEGMENTS_PER_POST,
    SEGMENTS_TRUNK, TRUNK,
};

/// Views above which a post is pruned by default.
pub const DEFAULT_PRUNE_THRESHOLD: u64 = 50;

/// Random stream reserved for post selection, disjoint from rewriting
/// iterations.
const SELECTION_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    User,
    Post,
    Friend,
    Comment,
    Share,
}

/// Post parameters: likes `i`, shares `s`, views `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PostCounters {
    pub likes: u64,
    pub shares: u64,
    pub views: u64,
}

impl PostCounters {
    pub fn new(likes: u64, shares: u64, views: u64) -> Self {
        Self { likes, shares, views }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Present on posts only.
    pub counters: Option<PostCounters>,
    pub author: String,
}

/// Which post a comment or share lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PostTarget {
    Id(NodeId),
    /// Uniform over live posts, drawn from the tree's seeded stream.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Status {
    pub branches: usize,
    pub posts: usize,
    pub friends: usize,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "branches: {} posts: {} friends: {}", self.branches, self.posts, self.friends)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SocialError {
    #[error("there are no posts yet")]
    NoPosts,
    #[error("post {0} does not exist")]
    UnknownPost(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocialTree {
    nodes: BTreeMap<NodeId, TreeNode>,
    trunk: NodeId,
    next_id: u64,
    seed: u64,
    draws: u64,
}

impl SocialTree {
    /// A tree holding only the user trunk.
    pub fn new(user: &str, seed: u64) -> Self {
        let trunk = NodeId(0);
        let mut nodes = BTreeMap::new();
        nodes.insert(
            trunk,
            TreeNode {
                id: trunk,
                kind: NodeKind::User,
                parent: None,
                children: Vec::new(),
                counters: None,
                author: user.to_owned(),
            },
        );
        Self { nodes, trunk, next_id: 1, seed, draws: 0 }
    }

    pub fn trunk(&self) -> &TreeNode {
        &self.nodes[&self.trunk]
    }

    pub fn trunk_id(&self) -> NodeId {
        self.trunk
    }

    pub fn owner(&self) -> &str {
        &self.trunk().author
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of random post selections made so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn node(&self, id: NodeId) -> Option<&TreeNode> {
        self.nodes.get(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.values()
    }

    /// Live posts in id order.
    pub fn posts(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.values().filter(|n| n.kind == NodeKind::Post)
    }

    pub fn friends(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.values().filter(|n| n.kind == NodeKind::Friend)
    }

    pub fn counters(&self, post: NodeId) -> Result<PostCounters, SocialError> {
        self.live_post(post).map(|n| n.counters.unwrap_or_default())
    }

    pub fn status(&self) -> Status {
        Status { branches: self.nodes.len(), posts: self.posts().count(), friends: self.friends().count() }
    }

    fn insert(&mut self, kind: NodeKind, parent: NodeId, author: &str) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        let counters = (kind == NodeKind::Post).then(PostCounters::default);
        self.nodes.insert(
            id,
            TreeNode { id, kind, parent: Some(parent), children: Vec::new(), counters, author: author.to_owned() },
        );
        self.nodes.get_mut(&parent).expect("parent exists").children.push(id);
        id
    }

    pub fn add_post(&mut self, author: &str) -> NodeId {
        self.insert(NodeKind::Post, self.trunk, author)
    }

    pub fn add_friend(&mut self, friend: &str) -> NodeId {
        self.insert(NodeKind::Friend, self.trunk, friend)
    }

    fn live_post(&self, id: NodeId) -> Result<&TreeNode, SocialError> {
        self.nodes
            .get(&id)
            .filter(|n| n.kind == NodeKind::Post)
            .ok_or(SocialError::UnknownPost(id))
    }

    fn post_mut(&mut self, id: NodeId) -> Result<&mut PostCounters, SocialError> {
        self.nodes
            .get_mut(&id)
            .filter(|n| n.kind == NodeKind::Post)
            .and_then(|n| n.counters.as_mut())
            .ok_or(SocialError::UnknownPost(id))
    }

    /// The post `target` would resolve to next, without consuming a draw.
    pub fn peek_target(&self, target: PostTarget) -> Result<NodeId, SocialError> {
        match target {
            PostTarget::Id(id) => self.live_post(id).map(|n| n.id),
            PostTarget::Random => {
                let posts: Vec<NodeId> = self.posts().map(|n| n.id).collect();
                if posts.is_empty() {
                    return Err(SocialError::NoPosts);
                }
                Ok(posts[rng::below(self.seed, SELECTION_STREAM, self.draws, posts.len())])
            }
        }
    }

    /// Resolves `target`, consuming a draw when it is random.
    pub fn resolve_target(&mut self, target: PostTarget) -> Result<NodeId, SocialError> {
        let id = self.peek_target(target)?;
        if target == PostTarget::Random {
            self.draws += 1;
        }
        Ok(id)
    }

    /// Comments on a post; the post gains a view.
    pub fn add_comment(&mut self, target: PostTarget, author: &str) -> Result<NodeId, SocialError> {
        let post = self.resolve_target(target)?;
        self.post_mut(post)?.views += 1;
        Ok(self.insert(NodeKind::Comment, post, author))
    }

    /// Shares a post; the post gains a view and a share.
    pub fn add_share(&mut self, target: PostTarget, author: &str) -> Result<NodeId, SocialError> {
        let post = self.resolve_target(target)?;
        let c = self.post_mut(post)?;
        c.views += 1;
        c.shares += 1;
        Ok(self.insert(NodeKind::Share, post, author))
    }

    /// A like also counts as a view.
    pub fn like(&mut self, post: NodeId) -> Result<PostCounters, SocialError> {
        let c = self.post_mut(post)?;
        c.likes += 1;
        c.views += 1;
        Ok(*c)
    }

    pub fn view(&mut self, post: NodeId) -> Result<PostCounters, SocialError> {
        let c = self.post_mut(post)?;
        c.views += 1;
        Ok(*c)
    }

    /// Likes every live post; returns how many were touched.
    pub fn like_all(&mut self) -> usize {
        self.for_each_post(|c| {
            c.likes += 1;
            c.views += 1;
        })
    }

    /// Views every live post; returns how many were touched.
    pub fn view_all(&mut self) -> usize {
        self.for_each_post(|c| c.views += 1)
    }

    fn for_each_post(&mut self, mut f: impl FnMut(&mut PostCounters)) -> usize {
        let mut n = 0;
        for node in self.nodes.values_mut().filter(|n| n.kind == NodeKind::Post) {
            f(node.counters.as_mut().expect("posts carry counters"));
            n += 1;
        }
        n
    }

    /// Removes every post whose views exceed `threshold`, together with
    /// all of its comments and shares. Returns the removed post ids in
    /// ascending order.
    pub fn prune(&mut self, threshold: u64) -> Vec<NodeId> {
        let doomed: Vec<NodeId> = self
            .posts()
            .filter(|n| n.counters.is_some_and(|c| c.views > threshold))
            .map(|n| n.id)
            .collect();
        for &post in &doomed {
            self.remove_subtree(post);
        }
        doomed
    }

    fn remove_subtree(&mut self, root: NodeId) {
        if let Some(parent) = self.nodes[&root].parent {
            self.nodes.get_mut(&parent).expect("parent exists").children.retain(|&c| c != root);
        }
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if let Some(node) = self.nodes.remove(&id) {
                stack.extend(node.children);
            }
        }
    }

    /// Checks the structural invariants: mutual parent/child links, a
    /// single parentless trunk, legal parent kinds, full reachability and
    /// share counters matching share children.
    pub fn check_structure(&self) -> Result<(), String> {
        let trunk = self.nodes.get(&self.trunk).ok_or("trunk missing")?;
        if trunk.kind != NodeKind::User || trunk.parent.is_some() {
            return Err("trunk must be a parentless user".into());
        }
        let mut reached = 0usize;
        let mut stack = vec![self.trunk];
        let mut seen = std::collections::BTreeSet::new();
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                return Err(format!("node {id} reached twice"));
            }
            reached += 1;
            let node = self.nodes.get(&id).ok_or(format!("dangling child {id}"))?;
            if id.0 >= self.next_id {
                return Err(format!("node {id} beyond id counter"));
            }
            for &c in &node.children {
                let child = self.nodes.get(&c).ok_or(format!("dangling child {c} of {id}"))?;
                if child.parent != Some(id) {
                    return Err(format!("child {c} does not point back to {id}"));
                }
                let legal = match child.kind {
                    NodeKind::Post | NodeKind::Friend => node.kind == NodeKind::User,
                    NodeKind::Comment | NodeKind::Share => node.kind == NodeKind::Post,
                    NodeKind::User => false,
                };
                if !legal {
                    return Err(format!("{:?} {c} under {:?} {id}", child.kind, node.kind));
                }
                stack.push(c);
            }
            if node.kind == NodeKind::Post {
                let shares = node
                    .children
                    .iter()
                    .filter(|c| self.nodes[c].kind == NodeKind::Share)
                    .count() as u64;
                let counters = node.counters.ok_or(format!("post {id} without counters"))?;
                if counters.shares != shares {
                    return Err(format!("post {id} counts {} shares, has {shares}", counters.shares));
                }
            } else if node.counters.is_some() {
                return Err(format!("non-post {id} carries counters"));
            }
        }
        if reached != self.nodes.len() {
            return Err(format!("{} node(s) unreachable", self.nodes.len() - reached));
        }
        Ok(())
    }
}
