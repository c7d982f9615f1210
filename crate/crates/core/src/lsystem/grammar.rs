use std::collections::{BTreeMap, BTreeSet};

use super::symbol::SymbolString;

/// A successor parameter: a literal or a predecessor parameter shifted by a
/// constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamExpr {
    Const(f64),
    /// `index` addresses the predecessor's parameter list, which binds
    /// positionally to the grammar's parameter names.
    Param { index: usize, offset: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTemplate {
    pub letter: char,
    pub params: Vec<ParamExpr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operand {
    Param(usize),
    Const(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub lhs: Operand,
    pub op: CmpOp,
    pub rhs: Operand,
}

/// Conjunction of comparisons over the predecessor's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub clauses: Vec<Comparison>,
}

impl Condition {
    /// Out-of-range parameter references evaluate to false.
    pub fn holds(&self, params: &[f64]) -> bool {
        let value = |o: Operand| match o {
            Operand::Const(c) => Some(c),
            Operand::Param(i) => params.get(i).copied(),
        };
        self.clauses.iter().all(|c| match (value(c.lhs), value(c.rhs)) {
            (Some(l), Some(r)) => c.op.holds(l, r),
            _ => false,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    pub predecessor: char,
    pub left_context: Vec<char>,
    pub right_context: Vec<char>,
    pub condition: Option<Condition>,
    pub probability: f64,
    pub successor: Vec<SymbolTemplate>,
}

impl Production {
    pub fn has_context(&self) -> bool {
        !self.left_context.is_empty() || !self.right_context.is_empty()
    }

    /// Context outranks condition; both outrank a bare rule.
    pub(crate) fn specificity(&self) -> u8 {
        2 * u8::from(self.has_context()) + u8::from(self.condition.is_some())
    }

    /// Productions sharing a group are stochastic alternatives.
    pub(crate) fn same_group(&self, other: &Production) -> bool {
        self.predecessor == other.predecessor
            && self.left_context == other.left_context
            && self.right_context == other.right_context
            && self.condition == other.condition
    }
}

/// A validated L-system: alphabet, parameter names, axiom and productions.
///
/// Built through [`parse_grammar`](super::parse_grammar), which checks every
/// structural invariant before handing one out.
#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    pub(crate) alphabet: BTreeSet<char>,
    pub(crate) param_names: Vec<String>,
    pub(crate) arities: BTreeMap<char, usize>,
    pub(crate) axiom: SymbolString,
    pub(crate) productions: Vec<Production>,
    pub(crate) constants: BTreeSet<char>,
    pub(crate) by_letter: BTreeMap<char, Vec<usize>>,
}

impl Grammar {
    pub(crate) fn assemble(
        alphabet: BTreeSet<char>,
        param_names: Vec<String>,
        arities: BTreeMap<char, usize>,
        axiom: SymbolString,
        productions: Vec<Production>,
    ) -> Self {
        let mut by_letter: BTreeMap<char, Vec<usize>> = BTreeMap::new();
        for (i, p) in productions.iter().enumerate() {
            by_letter.entry(p.predecessor).or_default().push(i);
        }
        let constants = alphabet
            .iter()
            .copied()
            .filter(|c| !by_letter.contains_key(c))
            .collect();
        Self { alphabet, param_names, arities, axiom, productions, constants, by_letter }
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn axiom(&self) -> &SymbolString {
        &self.axiom
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    /// Alphabet letters that have no production.
    pub fn constants(&self) -> &BTreeSet<char> {
        &self.constants
    }

    /// Declared parameter count for `letter`; zero when undeclared.
    pub fn arity(&self, letter: char) -> usize {
        self.arities.get(&letter).copied().unwrap_or(0)
    }

    pub fn knows(&self, letter: char) -> bool {
        self.alphabet.contains(&letter)
    }

    pub(crate) fn candidates(&self, letter: char) -> &[usize] {
        self.by_letter.get(&letter).map(Vec::as_slice).unwrap_or(&[])
    }
}
