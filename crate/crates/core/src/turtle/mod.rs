//! 2D turtle interpretation of symbol strings.
//!
//! Coordinates are y-up; headings are degrees with 90 pointing straight
//! up. The SVG writer flips to screen coordinates.

mod koch;
mod svg;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lsystem::{Symbol, SymbolString};

pub use koch::{koch_quadratic, KOCH_GRAMMAR};
pub use svg::{emit_svg, SvgStyle};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn step(self, heading_deg: f64, length: f64) -> Point {
        let (sin, cos) = heading_deg.to_radians().sin_cos();
        Point { x: self.x + length * cos, y: self.y + length * sin }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurtleConfig {
    pub step_length: f64,
    /// Turn used on the trunk and on first-level branches.
    pub branch_angle: f64,
    /// Turn used inside nested branches (bracket depth 2 and deeper).
    pub twig_angle: f64,
    pub start: Point,
    pub start_heading: f64,
    pub marker_radius: f64,
}

impl Default for TurtleConfig {
    fn default() -> Self {
        Self {
            step_length: 12.0,
            branch_angle: 25.0,
            twig_angle: 35.0,
            start: Point::ORIGIN,
            start_heading: 90.0,
            marker_radius: 5.0,
        }
    }
}

impl TurtleConfig {
    pub fn validate(&self) -> Result<(), TurtleError> {
        let finite = [self.branch_angle, self.twig_angle, self.start_heading, self.start.x, self.start.y]
            .iter()
            .all(|v| v.is_finite());
        if !(self.step_length > 0.0 && self.step_length.is_finite()) {
            return Err(TurtleError::InvalidConfig("step length must be positive".into()));
        }
        if !(self.marker_radius > 0.0 && self.marker_radius.is_finite()) {
            return Err(TurtleError::InvalidConfig("marker radius must be positive".into()));
        }
        if !finite {
            return Err(TurtleError::InvalidConfig("angles and start must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurtleState {
    pub position: Point,
    pub heading: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Trunk,
    Branch,
    Twig,
}

impl SegmentKind {
    fn at_depth(depth: usize) -> Self {
        match depth {
            0 => SegmentKind::Trunk,
            1 => SegmentKind::Branch,
            _ => SegmentKind::Twig,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkerKind {
    Friend,
    Comment,
    Share,
}

impl MarkerKind {
    pub const ALL: [MarkerKind; 3] = [MarkerKind::Friend, MarkerKind::Comment, MarkerKind::Share];

    pub fn color(self) -> &'static str {
        match self {
            MarkerKind::Friend => "blue",
            MarkerKind::Comment => "yellow",
            MarkerKind::Share => "red",
        }
    }

    /// Numeric tag carried as a marker symbol's first parameter.
    pub fn tag(self) -> f64 {
        match self {
            MarkerKind::Friend => 0.0,
            MarkerKind::Comment => 1.0,
            MarkerKind::Share => 2.0,
        }
    }

    pub fn from_tag(tag: f64) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: Point,
    pub to: Point,
    pub kind: SegmentKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub center: Point,
    pub radius: f64,
    pub kind: MarkerKind,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub anchor: Point,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    fn at(p: Point) -> Self {
        Self { min: p, max: p }
    }

    fn include(&mut self, p: Point) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub segments: Vec<Segment>,
    pub markers: Vec<Marker>,
    pub labels: Vec<Label>,
    pub bounds: Bounds,
}

impl Geometry {
    pub fn empty_at(p: Point) -> Self {
        Self { segments: Vec::new(), markers: Vec::new(), labels: Vec::new(), bounds: Bounds::at(p) }
    }

    pub fn marker_count(&self, kind: MarkerKind) -> usize {
        self.markers.iter().filter(|m| m.kind == kind).count()
    }

    /// Canonical JSON document.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("geometry serializes")
    }
}

/// What the turtle does on reading a letter.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Draw,
    Move,
    TurnLeft,
    TurnRight,
    /// Drops a marker. A first parameter holding a [`MarkerKind::tag`]
    /// overrides the given kind.
    Marker(MarkerKind),
    /// Emits a label a marker radius ahead of the turtle. `{0}`, `{1}`, ...
    /// in the template are replaced by the symbol's parameters.
    Label(String),
    Push,
    Pop,
    NoOp,
}

/// Letter to action mapping. Brackets are always push and pop.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolActions {
    map: BTreeMap<char, Action>,
    fallback: Option<Action>,
}

impl SymbolActions {
    pub fn new() -> Self {
        let mut map = BTreeMap::new();
        map.insert('[', Action::Push);
        map.insert(']', Action::Pop);
        Self { map, fallback: None }
    }

    pub fn with(mut self, letter: char, action: Action) -> Self {
        self.map.insert(letter, action);
        self
    }

    /// Letters without an explicit action get `action` instead of failing.
    pub fn with_fallback(mut self, action: Action) -> Self {
        self.fallback = Some(action);
        self
    }

    pub fn get(&self, letter: char) -> Option<&Action> {
        self.map.get(&letter).or(self.fallback.as_ref())
    }

    /// `F` draws, `f` moves, `+` turns left, `-` turns right.
    pub fn koch() -> Self {
        Self::new()
            .with('F', Action::Draw)
            .with('f', Action::Move)
            .with('+', Action::TurnLeft)
            .with('-', Action::TurnRight)
    }

    /// Account-tree letters: `m` segment, `l`/`r` turns, `k` leaf marker,
    /// `t` counter label. Growth letters are silent.
    pub fn social(label_template: &str) -> Self {
        let mut actions = Self::new()
            .with('m', Action::Draw)
            .with('l', Action::TurnLeft)
            .with('r', Action::TurnRight)
            .with('k', Action::Marker(MarkerKind::Friend))
            .with('t', Action::Label(label_template.to_owned()));
        for c in ['U', 'P', 'F', 'C', 'S', 'B'] {
            actions = actions.with(c, Action::NoOp);
        }
        actions
    }
}

impl Default for SymbolActions {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TurtleError {
    #[error("invalid turtle configuration: {0}")]
    InvalidConfig(String),
    #[error("no action for letter '{letter}' at position {position}")]
    NoAction { letter: char, position: usize },
    #[error("unbalanced brackets at position {position}")]
    Unbalanced { position: usize },
}

/// Geometry plus the turtle's state after the last symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub geometry: Geometry,
    pub final_state: TurtleState,
}

/// Interprets `input` and returns the resulting geometry.
pub fn interpret(
    input: &SymbolString,
    config: &TurtleConfig,
    actions: &SymbolActions,
) -> Result<Geometry, TurtleError> {
    trace(input, config, actions).map(|t| t.geometry)
}

/// Like [`interpret`], also reporting where the turtle ended up.
pub fn trace(
    input: &SymbolString,
    config: &TurtleConfig,
    actions: &SymbolActions,
) -> Result<Trace, TurtleError> {
    config.validate()?;
    let mut state = TurtleState { position: config.start, heading: config.start_heading, depth: 0 };
    let mut stack: Vec<TurtleState> = Vec::new();
    let mut g = Geometry::empty_at(config.start);

    for (position, symbol) in input.iter().enumerate() {
        let action = actions
            .get(symbol.letter)
            .ok_or(TurtleError::NoAction { letter: symbol.letter, position })?;
        let turn = if state.depth >= 2 { config.twig_angle } else { config.branch_angle };
        match action {
            Action::Draw => {
                let to = state.position.step(state.heading, config.step_length);
                g.segments.push(Segment { from: state.position, to, kind: SegmentKind::at_depth(state.depth) });
                g.bounds.include(to);
                state.position = to;
            }
            Action::Move => {
                state.position = state.position.step(state.heading, config.step_length);
            }
            Action::TurnLeft => state.heading = normalize(state.heading + turn),
            Action::TurnRight => state.heading = normalize(state.heading - turn),
            Action::Marker(kind) => {
                let kind = marker_kind(symbol, *kind);
                g.bounds.include(state.position);
                g.markers.push(Marker {
                    center: state.position,
                    radius: config.marker_radius,
                    kind,
                    color: kind.color().to_owned(),
                });
            }
            Action::Label(template) => {
                let anchor = state.position.step(state.heading, config.marker_radius);
                g.bounds.include(anchor);
                g.labels.push(Label { anchor, text: fill_template(template, &symbol.params) });
            }
            Action::Push => {
                stack.push(state);
                state.depth += 1;
            }
            Action::Pop => {
                state = stack.pop().ok_or(TurtleError::Unbalanced { position })?;
            }
            Action::NoOp => {}
        }
    }
    if !stack.is_empty() {
        return Err(TurtleError::Unbalanced { position: input.len() });
    }
    Ok(Trace { geometry: g, final_state: state })
}

fn normalize(deg: f64) -> f64 {
    deg.rem_euclid(360.0)
}

fn marker_kind(symbol: &Symbol, default: MarkerKind) -> MarkerKind {
    symbol.params.first().and_then(|&t| MarkerKind::from_tag(t)).unwrap_or(default)
}

fn fill_template(template: &str, params: &[f64]) -> String {
    let mut text = template.to_owned();
    for (i, p) in params.iter().enumerate() {
        text = text.replace(&format!("{{{i}}}"), &p.to_string());
    }
    text
}
