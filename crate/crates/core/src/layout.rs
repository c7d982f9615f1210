//! Renders a [`SocialTree`] as turtle geometry: posts fan out to one side of
//! the trunk, friends to the other, leaves are colored markers and every
//! post carries its counters as a label.

use thiserror::Error;

use crate::social::{tree_to_lstring, SocialTree};
use crate::turtle::{interpret, Action, Geometry, SymbolActions, TurtleConfig, TurtleError};

pub const DEFAULT_LABEL_FORMAT: &str = "i:{i} s:{s} v:{v}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SideConvention {
    #[default]
    PostsLeft,
    PostsRight,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("label format must mention {{i}}, {{s}} and {{v}}")]
    LabelFormat,
    #[error(transparent)]
    Turtle(#[from] TurtleError),
}

/// Counter label template using `{i}`, `{s}` and `{v}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelFormat(String);

impl LabelFormat {
    pub fn new(template: &str) -> Result<Self, LayoutError> {
        if ["{i}", "{s}", "{v}"].iter().all(|p| template.contains(p)) {
            Ok(Self(template.to_owned()))
        } else {
            Err(LayoutError::LabelFormat)
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn turtle_template(&self) -> String {
        self.0.replace("{i}", "{0}").replace("{s}", "{1}").replace("{v}", "{2}")
    }
}

impl Default for LabelFormat {
    fn default() -> Self {
        Self(DEFAULT_LABEL_FORMAT.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LayoutConfig {
    turtle: TurtleConfig,
    label_format: LabelFormat,
    side: SideConvention,
}

impl LayoutConfig {
    pub fn new(turtle: TurtleConfig, label_format: LabelFormat, side: SideConvention) -> Result<Self, LayoutError> {
        turtle.validate()?;
        Ok(Self { turtle, label_format, side })
    }

    pub fn turtle(&self) -> &TurtleConfig {
        &self.turtle
    }

    pub fn label_format(&self) -> &LabelFormat {
        &self.label_format
    }

    pub fn side(&self) -> SideConvention {
        self.side
    }

    fn actions(&self) -> SymbolActions {
        let actions = SymbolActions::social(&self.label_format.turtle_template());
        match self.side {
            SideConvention::PostsLeft => actions,
            SideConvention::PostsRight => actions.with('l', Action::TurnRight).with('r', Action::TurnLeft),
        }
    }
}

/// Deterministic geometry for `tree`.
pub fn layout(tree: &SocialTree, config: &LayoutConfig) -> Geometry {
    interpret(&tree_to_lstring(tree), &config.turtle, &config.actions())
        .expect("tree strings are balanced and every letter has an action")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::social::{PostTarget, SEGMENTS_PER_FRIEND};
    use crate::turtle::{MarkerKind, SegmentKind};

    #[test]
    fn fresh_tree_is_bare_trunk() {
        let g = layout(&SocialTree::new("a", 0), &LayoutConfig::default());
        assert_eq!(g.segments.len(), 5);
        assert!(g.segments.iter().all(|s| s.kind == SegmentKind::Trunk));
        assert!(g.markers.is_empty() && g.labels.is_empty());
    }

    #[test]
    fn one_label_per_post() {
        let mut t = SocialTree::new("a", 0);
        let p = t.add_post("a");
        t.add_share(PostTarget::Id(p), "b").unwrap();
        t.like(p).unwrap();
        t.like(p).unwrap();
        for _ in 0..4 {
            t.view(p).unwrap();
        }
        let g = layout(&t, &LayoutConfig::default());
        assert_eq!(g.labels.len(), 1);
        assert_eq!(g.labels[0].text, "i:2 s:1 v:7");
    }

    #[test]
    fn posts_left_friends_right() {
        let mut t = SocialTree::new("a", 0);
        t.add_post("a");
        t.add_friend("b");
        let g = layout(&t, &LayoutConfig::default());
        assert!(g.labels[0].anchor.x < 0.0);
        assert!(g.markers[0].center.x > 0.0);
        assert_eq!(g.marker_count(MarkerKind::Friend), 1);
        assert_eq!(g.segments.len(), 5 + 4 + SEGMENTS_PER_FRIEND);

        let flipped = LayoutConfig::new(TurtleConfig::default(), LabelFormat::default(), SideConvention::PostsRight)
            .unwrap();
        let g = layout(&t, &flipped);
        assert!(g.labels[0].anchor.x > 0.0);
        assert!(g.markers[0].center.x < 0.0);
    }

    #[test]
    fn label_format_validation() {
        assert!(LabelFormat::new("likes {i} shares {s}").is_err());
        let f = LabelFormat::new("{v}/{s}/{i}").unwrap();
        let cfg = LayoutConfig::new(TurtleConfig::default(), f, SideConvention::PostsLeft).unwrap();
        let mut t = SocialTree::new("a", 0);
        t.add_post("a");
        t.like_all();
        assert_eq!(layout(&t, &cfg).labels[0].text, "1/0/1");
        let bad = TurtleConfig { step_length: -1.0, ..TurtleConfig::default() };
        assert!(LayoutConfig::new(bad, LabelFormat::default(), SideConvention::PostsLeft).is_err());
    }
}
