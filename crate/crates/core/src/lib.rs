//! Arranges a social-media account as an L-system fractal tree.
//!
//! The crate is split into a generic rewriting core ([`lsystem`]), a 2D
//! turtle interpreter with SVG output ([`turtle`]), the account data model
//! ([`social`]), the deterministic tree renderer ([`layout`]) and a
//! hash-chained event log that makes every mutation replayable
//! ([`eventlog`]). [`session`] ties tree and log together for the CLI,
//! the HTTP server and the browser demo.

pub mod eventlog;
pub mod keys;
pub mod layout;
pub mod lsystem;
mod rng;
pub mod session;
pub mod social;
pub mod turtle;

pub use eventlog::{EventLog, EventRecord, Payload, Target, Verification};
pub use layout::{layout, LayoutConfig};
pub use lsystem::{parse_grammar, rewrite, rewrite_step, Grammar, Symbol, SymbolString};
pub use session::Session;
pub use social::{NodeId, NodeKind, PostCounters, SocialTree, Status};
pub use turtle::{emit_svg, interpret, koch_quadratic, Geometry, SvgStyle, TurtleConfig};
