//! Generic L-system machinery: symbols, grammars, and parallel rewriting.
//!
//! Supported flavours are deterministic context-free, context-sensitive
//! (bracket-aware 2L), stochastic and parametric productions, in any
//! combination.

mod grammar;
mod parse;
mod rewrite;
mod symbol;

use thiserror::Error;

pub use grammar::{
    CmpOp, Comparison, Condition, Grammar, Operand, ParamExpr, Production, SymbolTemplate,
};
pub use parse::{parse_grammar, PROBABILITY_TOLERANCE};
pub use rewrite::{match_context, rewrite, rewrite_step, RandomStream};
pub use symbol::{Symbol, SymbolString, POP, PUSH};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("missing or empty axiom")]
    MissingAxiom,
    #[error("axiom brackets are unbalanced")]
    UnbalancedAxiom,
    #[error("successor brackets are unbalanced")]
    UnbalancedSuccessor,
    #[error("letter '{0}' is not in the alphabet")]
    UnknownLetter(char),
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error("'{letter}' takes {expected} parameter(s), found {found}")]
    ArityMismatch { letter: char, expected: usize, found: usize },
    #[error("probability {0} is outside (0, 1]")]
    InvalidProbability(f64),
    #[error("probabilities for '{predecessor}' sum to {sum}, expected 1")]
    ProbabilitySum { predecessor: char, sum: f64 },
}

/// A grammar source error. `line` and `column` are 1-based; a line of 0
/// means the problem concerns the file as a whole.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        Self { line, column, kind }
    }

    pub(crate) fn at(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Self::new(line, column, ParseErrorKind::Syntax(msg.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("input brackets are unbalanced")]
    Unbalanced,
    #[error("letter '{letter}' at position {position} is not in the alphabet")]
    UnknownLetter { letter: char, position: usize },
    #[error("'{letter}' at position {position} has {found} parameter(s), expected {expected}")]
    ArityMismatch { letter: char, position: usize, expected: usize, found: usize },
}
