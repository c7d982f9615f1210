use ltree_core::{Session, SocialTree, Status};
use serde_json::{json, Value};

/// A finished, immutable rendering of the session served to readers.
#[derive(Debug, Clone)]
pub struct View {
    pub state: String,
    pub geometry: String,
    /// How many log lines this view covers.
    pub log_len: usize,
}

pub fn status_json(s: Status) -> Value {
    json!({ "branches": s.branches, "posts": s.posts, "friends": s.friends })
}

pub fn state_json(tree: &SocialTree) -> Value {
    let posts: Vec<Value> = tree
        .posts()
        .map(|p| {
            let c = p.counters.unwrap_or_default();
            let comments = p
                .children
                .iter()
                .filter(|&&id| tree.node(id).is_some_and(|n| n.kind == ltree_core::NodeKind::Comment))
                .count();
            json!({
                "id": p.id.0,
                "author": p.author,
                "likes": c.likes,
                "shares": c.shares,
                "views": c.views,
                "comments": comments,
            })
        })
        .collect();
    let friends: Vec<u64> = tree.friends().map(|f| f.id.0).collect();
    json!({ "status": status_json(tree.status()), "owner": tree.owner(), "posts": posts, "friends": friends })
}

impl View {
    pub fn of(session: &Session) -> Self {
        Self {
            state: state_json(session.tree()).to_string(),
            geometry: session.geometry().to_json(),
            log_len: session.log().len(),
        }
    }
}
