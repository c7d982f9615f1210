use super::{NodeKind, SocialTree};
use crate::lsystem::{Symbol, SymbolString};
use crate::turtle::MarkerKind;

/// Trunk segments below the first branch.
pub const TRUNK: &str = "mmmmm";
/// Trunk advance before each post branch.
pub const POST_PREFIX: &str = "mmm";
/// Trunk advance before each friend twig.
pub const FRIEND_PREFIX: &str = "mm";

/// Drawn segments contributed by each part of the tree.
pub const SEGMENTS_TRUNK: usize = 5;
pub const SEGMENTS_PER_POST: usize = 4;
pub const SEGMENTS_PER_FRIEND: usize = 3;
pub const SEGMENTS_PER_LEAF: usize = 3;

fn push_letters(out: &mut Vec<Symbol>, letters: &str) {
    out.extend(letters.chars().map(Symbol::new));
}

fn marker(kind: MarkerKind) -> Symbol {
    Symbol::with_params('k', [kind.tag()])
}

/// Serializes the tree as a bracketed string for the turtle.
///
/// Trunk children are visited in creation order. A post becomes
/// `mmm[lm` followed by one `m[rmmk]` twig per comment and one `m[lmmk]`
/// twig per share, then a `t(i,s,v)` label before the closing bracket. A
/// friend becomes `mm[rmk]`. Each `k` carries its leaf kind as a tag.
pub fn tree_to_lstring(tree: &SocialTree) -> SymbolString {
    let mut out = Vec::new();
    push_letters(&mut out, TRUNK);
    for &child in &tree.trunk().children {
        let node = tree.node(child).expect("children are live");
        match node.kind {
            NodeKind::Post => {
                push_letters(&mut out, POST_PREFIX);
                push_letters(&mut out, "[lm");
                for &leaf in &node.children {
                    match tree.node(leaf).expect("children are live").kind {
                        NodeKind::Comment => {
                            push_letters(&mut out, "m[rmm");
                            out.push(marker(MarkerKind::Comment));
                        }
                        NodeKind::Share => {
                            push_letters(&mut out, "m[lmm");
                            out.push(marker(MarkerKind::Share));
                        }
                        _ => continue,
                    }
                    push_letters(&mut out, "]");
                }
                let c = node.counters.unwrap_or_default();
                out.push(Symbol::with_params('t', [c.likes as f64, c.shares as f64, c.views as f64]));
                push_letters(&mut out, "]");
            }
            NodeKind::Friend => {
                push_letters(&mut out, FRIEND_PREFIX);
                push_letters(&mut out, "[rm");
                out.push(marker(MarkerKind::Friend));
                push_letters(&mut out, "]");
            }
            _ => {}
        }
    }
    SymbolString::from_symbols(out)
}
