use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ParseError;

pub const PUSH: char = '[';
pub const POP: char = ']';

/// A letter with its (possibly empty) list of numeric parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub letter: char,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
}

impl Symbol {
    pub fn new(letter: char) -> Self {
        Self { letter, params: Vec::new() }
    }

    pub fn with_params(letter: char, params: impl Into<Vec<f64>>) -> Self {
        Self { letter, params: params.into() }
    }

    pub fn is_bracket(&self) -> bool {
        self.letter == PUSH || self.letter == POP
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter)?;
        if !self.params.is_empty() {
            write!(f, "(")?;
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// The rewriting substrate: an ordered run of symbols.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolString {
    symbols: Vec<Symbol>,
}

impl SymbolString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Self { symbols }
    }

    /// Parses a string of letters with optional numeric parameter lists,
    /// e.g. `"mm[rk(0)]t(1,0,2)"`. Whitespace is ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut out = Vec::new();
        let mut chars = text.char_indices().peekable();
        while let Some((col, c)) = chars.next() {
            if c.is_whitespace() {
                continue;
            }
            if c == '(' || c == ')' || c == ',' {
                return Err(ParseError::at(1, col + 1, format!("unexpected '{c}'")));
            }
            let mut params = Vec::new();
            if chars.peek().map(|&(_, n)| n) == Some('(') {
                let (open, _) = chars.next().unwrap();
                let mut body = String::new();
                loop {
                    match chars.next() {
                        Some((_, ')')) => break,
                        Some((_, ch)) => body.push(ch),
                        None => return Err(ParseError::at(1, open + 1, "unclosed parameter list")),
                    }
                }
                for piece in body.split(',') {
                    let value: f64 = piece.trim().parse().map_err(|_| {
                        ParseError::at(1, open + 1, format!("bad parameter '{}'", piece.trim()))
                    })?;
                    params.push(value);
                }
            }
            out.push(Symbol { letter: c, params });
        }
        Ok(Self { symbols: out })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn push(&mut self, symbol: Symbol) {
        self.symbols.push(symbol);
    }

    pub fn extend_from(&mut self, other: &SymbolString) {
        self.symbols.extend(other.symbols.iter().cloned());
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.symbols.iter()
    }

    pub fn count_letter(&self, letter: char) -> usize {
        self.symbols.iter().filter(|s| s.letter == letter).count()
    }

    /// True when no prefix closes more brackets than it opens and the
    /// whole string closes everything it opens.
    pub fn is_balanced(&self) -> bool {
        bracket_partners(&self.symbols).is_some()
    }

    /// Letters only, parameters dropped.
    pub fn letters(&self) -> String {
        self.symbols.iter().map(|s| s.letter).collect()
    }
}

impl fmt::Display for SymbolString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for SymbolString {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl<'a> IntoIterator for &'a SymbolString {
    type Item = &'a Symbol;
    type IntoIter = std::slice::Iter<'a, Symbol>;

    fn into_iter(self) -> Self::IntoIter {
        self.symbols.iter()
    }
}

impl FromIterator<Symbol> for SymbolString {
    fn from_iter<T: IntoIterator<Item = Symbol>>(iter: T) -> Self {
        Self { symbols: iter.into_iter().collect() }
    }
}

/// For each bracket, the index of its partner; `None` for other symbols.
/// Returns `None` overall when the brackets are unbalanced.
pub(crate) fn bracket_partners(symbols: &[Symbol]) -> Option<Vec<Option<usize>>> {
    let mut partners = vec![None; symbols.len()];
    let mut open = Vec::new();
    for (i, s) in symbols.iter().enumerate() {
        match s.letter {
            PUSH => open.push(i),
            POP => {
                let j = open.pop()?;
                partners[i] = Some(j);
                partners[j] = Some(i);
            }
            _ => {}
        }
    }
    open.is_empty().then_some(partners)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let s = SymbolString::parse("mm[r k(0)]t(1, 0,2.5)").unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(s.to_string(), "mm[rk(0)]t(1,0,2.5)");
        assert_eq!(s.letters(), "mm[rk]t");
    }

    #[test]
    fn balance() {
        assert!(SymbolString::parse("A[B[C]]D").unwrap().is_balanced());
        assert!(SymbolString::parse("").unwrap().is_balanced());
        assert!(!SymbolString::parse("A]B[").unwrap().is_balanced());
        assert!(!SymbolString::parse("[[A]").unwrap().is_balanced());
    }

    #[test]
    fn rejects_stray_parenthesis() {
        assert!(SymbolString::parse("A)").is_err());
        assert!(SymbolString::parse("A(1").is_err());
        assert!(SymbolString::parse("A(x)").is_err());
    }
}
