//! Text format for grammars.
//!
//! One declaration per line, `#` starts a comment:
//!
//! ```text
//! alphabet: U P F C S B m l r k      # optional; inferred when absent
//! params: i s v                      # parameter names, bound positionally
//! param P 3                          # arity of a letter
//! axiom: U
//! U -> mmmmmPF
//! A < B > C : i > 2 (0.5) -> B(i+1)
//! ```
//!
//! A rule is `[left <] pred [> right] [: condition] [(probability)] -> successor`.

use std::collections::{BTreeMap, BTreeSet};

use super::grammar::{
    CmpOp, Comparison, Condition, Grammar, Operand, ParamExpr, Production, SymbolTemplate,
};
use super::symbol::{Symbol, SymbolString, POP, PUSH};
use super::{ParseError, ParseErrorKind};

/// Tolerance for a stochastic group's probabilities summing to one.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

const RESERVED: &[char] = &['(', ')', ',', '<', '>', ':', '#'];

fn is_letter(c: char) -> bool {
    !c.is_whitespace() && !RESERVED.contains(&c)
}

/// 1-based character column of `sub` inside `line`. `sub` must be a slice
/// of `line`.
fn column(line: &str, sub: &str) -> usize {
    let offset = sub.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

struct RawRule {
    line: usize,
    column: usize,
    production: Production,
}

struct Builder {
    alphabet: Option<(usize, BTreeSet<char>)>,
    param_names: Vec<String>,
    arities: BTreeMap<char, (usize, usize)>,
    axiom: Option<(usize, SymbolString)>,
    rules: Vec<RawRule>,
}

/// Parses and validates a grammar source.
pub fn parse_grammar(text: &str) -> Result<Grammar, ParseError> {
    let mut b = Builder {
        alphabet: None,
        param_names: Vec::new(),
        arities: BTreeMap::new(),
        axiom: None,
        rules: Vec::new(),
    };
    // Parameter names must be known before successors are parsed.
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if let Some(rest) = line.trim_start().strip_prefix("params:") {
            b.param_names = rest
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect();
            if let Some(bad) = b.param_names.iter().find(|n| !is_identifier(n)) {
                return Err(ParseError::new(
                    idx + 1,
                    column(raw, rest),
                    ParseErrorKind::Syntax(format!("bad parameter name '{bad}'")),
                ));
            }
        }
    }
    for (idx, raw) in text.lines().enumerate() {
        b.line(idx + 1, raw)?;
    }
    b.finish()
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> ParseError {
    ParseError::new(line, column, ParseErrorKind::Syntax(msg.into()))
}

impl Builder {
    fn line(&mut self, n: usize, raw: &str) -> Result<(), ParseError> {
        let body = strip_comment(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() || trimmed.starts_with("params:") {
            return Ok(());
        }
        if let Some(rest) = trimmed.strip_prefix("axiom:") {
            if self.axiom.is_some() {
                return Err(syntax(n, column(raw, trimmed), "duplicate axiom"));
            }
            let at = column(raw, rest);
            let axiom = SymbolString::parse(rest)
                .map_err(|e| syntax(n, at + e.column.saturating_sub(1), e.kind.to_string()))?;
            self.axiom = Some((n, axiom));
            return Ok(());
        }
        if let Some(rest) = trimmed.strip_prefix("alphabet:") {
            let letters: BTreeSet<char> = rest.chars().filter(|c| !c.is_whitespace()).collect();
            if let Some(&bad) = letters.iter().find(|&&c| !is_letter(c) || c == PUSH || c == POP) {
                return Err(syntax(n, column(raw, rest), format!("'{bad}' cannot be a letter")));
            }
            self.alphabet = Some((n, letters));
            return Ok(());
        }
        if !trimmed.contains("->") {
            if let Some(rest) = trimmed.strip_prefix("param") {
                if rest.starts_with(char::is_whitespace) {
                    return self.param_decl(n, raw, rest);
                }
            }
            return Err(syntax(n, column(raw, trimmed), "expected a declaration or a rule"));
        }
        self.rule(n, raw, trimmed)
    }

    fn param_decl(&mut self, n: usize, raw: &str, rest: &str) -> Result<(), ParseError> {
        let parts: Vec<&str> = rest.split_whitespace().collect();
        let col = column(raw, rest);
        let [letter, arity] = parts.as_slice() else {
            return Err(syntax(n, col, "expected 'param <letter> <arity>'"));
        };
        let mut chars = letter.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(syntax(n, col, format!("'{letter}' is not a single letter")));
        };
        if !is_letter(c) || c == PUSH || c == POP {
            return Err(syntax(n, col, format!("'{c}' cannot carry parameters")));
        }
        let arity: usize =
            arity.parse().map_err(|_| syntax(n, col, format!("bad arity '{arity}'")))?;
        if arity > self.param_names.len() {
            return Err(ParseError::new(
                n,
                col,
                ParseErrorKind::ArityMismatch { letter: c, expected: self.param_names.len(), found: arity },
            ));
        }
        self.arities.insert(c, (n, arity));
        Ok(())
    }

    fn rule(&mut self, n: usize, raw: &str, text: &str) -> Result<(), ParseError> {
        let arrow = text.find("->").expect("checked by caller");
        let mut head = text[..arrow].trim();
        let successor_src = &text[arrow + 2..];

        let mut probability = 1.0;
        if head.ends_with(')') {
            let open = head.rfind('(').ok_or_else(|| syntax(n, column(raw, head), "unmatched ')'"))?;
            let inner = head[open + 1..head.len() - 1].trim();
            probability = inner.parse().map_err(|_| {
                syntax(n, column(raw, &head[open..]), format!("bad probability '{inner}'"))
            })?;
            if !(probability > 0.0 && probability <= 1.0) {
                return Err(ParseError::new(
                    n,
                    column(raw, &head[open..]),
                    ParseErrorKind::InvalidProbability(probability),
                ));
            }
            head = head[..open].trim_end();
        }

        let (head, condition_src) = match head.find(':') {
            Some(i) => (head[..i].trim(), Some(&head[i + 1..])),
            None => (head, None),
        };

        let (left_src, rest) = match head.find('<') {
            Some(i) => (&head[..i], &head[i + 1..]),
            None => ("", head),
        };
        let (pred_src, right_src) = match rest.find('>') {
            Some(i) => (&rest[..i], &rest[i + 1..]),
            None => (rest, ""),
        };
        let pred_src = pred_src.trim();
        let mut pred_chars = pred_src.chars();
        let predecessor = match (pred_chars.next(), pred_chars.next()) {
            (Some(c), None) if is_letter(c) && c != PUSH && c != POP => c,
            _ => {
                let at = if pred_src.is_empty() { column(raw, head) } else { column(raw, pred_src) };
                return Err(syntax(n, at, format!("predecessor must be one letter, got '{pred_src}'")));
            }
        };
        let left_context = self.context(n, raw, left_src)?;
        let right_context = self.context(n, raw, right_src)?;
        let arity = self.arity(predecessor);
        let condition = condition_src
            .map(|src| self.condition(n, raw, src, arity))
            .transpose()?;
        let successor = self.successor(n, raw, successor_src, arity)?;

        self.rules.push(RawRule {
            line: n,
            column: column(raw, text),
            production: Production {
                predecessor,
                left_context,
                right_context,
                condition,
                probability,
                successor,
            },
        });
        Ok(())
    }

    fn arity(&self, letter: char) -> usize {
        self.arities.get(&letter).map(|&(_, a)| a).unwrap_or(0)
    }

    fn context(&self, n: usize, raw: &str, src: &str) -> Result<Vec<char>, ParseError> {
        let mut out = Vec::new();
        for c in src.chars().filter(|c| !c.is_whitespace()) {
            if !is_letter(c) || c == PUSH || c == POP {
                return Err(syntax(n, column(raw, src), format!("'{c}' is not allowed in a context")));
            }
            out.push(c);
        }
        Ok(out)
    }

    fn param_index(&self, name: &str, arity: usize) -> Option<usize> {
        self.param_names.iter().position(|p| p == name).filter(|&i| i < arity)
    }

    fn operand(&self, n: usize, col: usize, src: &str, arity: usize) -> Result<Operand, ParseError> {
        let src = src.trim();
        if let Ok(v) = src.parse::<f64>() {
            return Ok(Operand::Const(v));
        }
        self.param_index(src, arity)
            .map(Operand::Param)
            .ok_or_else(|| ParseError::new(n, col, ParseErrorKind::UnknownParameter(src.to_owned())))
    }

    fn condition(&self, n: usize, raw: &str, src: &str, arity: usize) -> Result<Condition, ParseError> {
        let col = column(raw, src);
        let mut clauses = Vec::new();
        for clause in src.split("&&") {
            let ops = [
                (">=", CmpOp::Ge),
                ("<=", CmpOp::Le),
                ("==", CmpOp::Eq),
                ("!=", CmpOp::Ne),
                (">", CmpOp::Gt),
                ("<", CmpOp::Lt),
            ];
            let (at, token, op) = ops
                .iter()
                .find_map(|&(tok, op)| clause.find(tok).map(|i| (i, tok, op)))
                .ok_or_else(|| syntax(n, col, format!("no comparison in '{}'", clause.trim())))?;
            clauses.push(Comparison {
                lhs: self.operand(n, col, &clause[..at], arity)?,
                op,
                rhs: self.operand(n, col, &clause[at + token.len()..], arity)?,
            });
        }
        Ok(Condition { clauses })
    }

    fn successor(
        &self,
        n: usize,
        raw: &str,
        src: &str,
        arity: usize,
    ) -> Result<Vec<SymbolTemplate>, ParseError> {
        let mut out = Vec::new();
        let mut chars = src.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if c.is_whitespace() {
                continue;
            }
            let col = column(raw, &src[i..]);
            if !is_letter(c) {
                return Err(syntax(n, col, format!("unexpected '{c}' in successor")));
            }
            let mut params = Vec::new();
            if chars.peek().map(|&(_, c)| c) == Some('(') {
                let (open, _) = chars.next().unwrap();
                let close = loop {
                    match chars.next() {
                        Some((j, ')')) => break j,
                        Some(_) => {}
                        None => return Err(syntax(n, col, "unclosed parameter list")),
                    }
                };
                for arg in src[open + 1..close].split(',') {
                    params.push(self.param_expr(n, col, arg, arity)?);
                }
            }
            out.push(SymbolTemplate { letter: c, params });
        }
        Ok(out)
    }

    fn param_expr(&self, n: usize, col: usize, arg: &str, arity: usize) -> Result<ParamExpr, ParseError> {
        let arg = arg.trim();
        if let Ok(v) = arg.parse::<f64>() {
            return Ok(ParamExpr::Const(v));
        }
        let name_end = arg
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(arg.len());
        let (name, rest) = arg.split_at(name_end);
        let index = self
            .param_index(name, arity)
            .ok_or_else(|| ParseError::new(n, col, ParseErrorKind::UnknownParameter(name.to_owned())))?;
        let rest: String = rest.chars().filter(|c| !c.is_whitespace()).collect();
        let offset = match rest.as_bytes().first() {
            None => Some(0.0),
            Some(b'+') => rest[1..].parse::<f64>().ok(),
            Some(b'-') => rest[1..].parse::<f64>().ok().map(|v| -v),
            Some(_) => None,
        }
        .ok_or_else(|| syntax(n, col, format!("unsupported parameter expression '{arg}'")))?;
        Ok(ParamExpr::Param { index, offset })
    }

    fn finish(self) -> Result<Grammar, ParseError> {
        let (axiom_line, axiom) = self
            .axiom
            .ok_or_else(|| ParseError::new(0, 0, ParseErrorKind::MissingAxiom))?;
        if axiom.is_empty() {
            return Err(ParseError::new(axiom_line, 1, ParseErrorKind::MissingAxiom));
        }
        if !axiom.is_balanced() {
            return Err(ParseError::new(axiom_line, 1, ParseErrorKind::UnbalancedAxiom));
        }

        let declared = self.alphabet.is_some();
        let alphabet = match self.alphabet {
            Some((_, a)) => a,
            None => {
                let mut a = BTreeSet::new();
                a.extend(axiom.iter().filter(|s| !s.is_bracket()).map(|s| s.letter));
                for r in &self.rules {
                    let p = &r.production;
                    a.insert(p.predecessor);
                    a.extend(p.left_context.iter().chain(&p.right_context));
                    a.extend(p.successor.iter().map(|t| t.letter).filter(|&c| c != PUSH && c != POP));
                }
                a.extend(self.arities.keys());
                a
            }
        };
        let known = |c: char| c == PUSH || c == POP || alphabet.contains(&c);
        let arity = |c: char| self.arities.get(&c).map(|&(_, a)| a).unwrap_or(0);

        if declared {
            for (&c, &(line, _)) in &self.arities {
                if !alphabet.contains(&c) {
                    return Err(ParseError::new(line, 1, ParseErrorKind::UnknownLetter(c)));
                }
            }
        }
        check_symbols(axiom_line, axiom.symbols(), &known, &arity)?;

        for r in &self.rules {
            let p = &r.production;
            for &c in std::iter::once(&p.predecessor).chain(&p.left_context).chain(&p.right_context) {
                if !known(c) {
                    return Err(ParseError::new(r.line, r.column, ParseErrorKind::UnknownLetter(c)));
                }
            }
            let succ: Vec<Symbol> = p
                .successor
                .iter()
                .map(|t| Symbol { letter: t.letter, params: vec![0.0; t.params.len()] })
                .collect();
            let succ = SymbolString::from_symbols(succ);
            if !succ.is_balanced() {
                return Err(ParseError::new(r.line, r.column, ParseErrorKind::UnbalancedSuccessor));
            }
            check_symbols(r.line, succ.symbols(), &known, &arity)?;
        }

        for (i, r) in self.rules.iter().enumerate() {
            let first = self.rules[..i].iter().any(|o| o.production.same_group(&r.production));
            if first {
                continue;
            }
            let sum: f64 = self
                .rules
                .iter()
                .filter(|o| o.production.same_group(&r.production))
                .map(|o| o.production.probability)
                .sum();
            if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
                return Err(ParseError::new(
                    r.line,
                    r.column,
                    ParseErrorKind::ProbabilitySum { predecessor: r.production.predecessor, sum },
                ));
            }
        }

        let arities = self.arities.into_iter().map(|(c, (_, a))| (c, a)).collect();
        let productions = self.rules.into_iter().map(|r| r.production).collect();
        Ok(Grammar::assemble(alphabet, self.param_names, arities, axiom, productions))
    }
}

fn check_symbols(
    line: usize,
    symbols: &[Symbol],
    known: &impl Fn(char) -> bool,
    arity: &impl Fn(char) -> usize,
) -> Result<(), ParseError> {
    for s in symbols {
        if !known(s.letter) {
            return Err(ParseError::new(line, 1, ParseErrorKind::UnknownLetter(s.letter)));
        }
        let expected = if s.is_bracket() { 0 } else { arity(s.letter) };
        if s.params.len() != expected {
            return Err(ParseError::new(
                line,
                1,
                ParseErrorKind::ArityMismatch { letter: s.letter, expected, found: s.params.len() },
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SOCIAL: &str = include_str!("../../grammars/social.lsys");

    #[test]
    fn parses_the_social_production_set() {
        let g = parse_grammar(SOCIAL).unwrap();
        assert_eq!(g.productions().len(), 6);
        assert_eq!(g.axiom().to_string(), "U");
        let constants: String = g.constants().iter().collect();
        assert_eq!(constants, "klmr");
        let u = &g.productions()[0];
        assert_eq!(u.predecessor, 'U');
        assert_eq!(u.successor.iter().map(|t| t.letter).collect::<String>(), "mmmmmPF");
    }

    #[test]
    fn axiom_only_grammar() {
        let g = parse_grammar("axiom: F\n").unwrap();
        assert!(g.productions().is_empty());
        assert_eq!(g.constants().iter().collect::<String>(), "F");
    }

    #[test]
    fn probability_group_must_sum_to_one() {
        let err = parse_grammar("axiom: B\nB (0.6) -> BB\nB (0.3) -> B\n").unwrap_err();
        match err.kind {
            ParseErrorKind::ProbabilitySum { predecessor: 'B', sum } => {
                assert!((sum - 0.9).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(err.line, 2);
        assert!(parse_grammar("axiom: B\nB (0.6) -> BB\nB (0.4) -> B\n").is_ok());
    }

    #[test]
    fn unbalanced_successor() {
        let err = parse_grammar("axiom: F\nF -> F[+F\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnbalancedSuccessor);
        assert_eq!(err.line, 2);
        let err = parse_grammar("axiom: F\nF -> F]F[\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnbalancedSuccessor);
    }

    #[test]
    fn unknown_letter_with_declared_alphabet() {
        let err = parse_grammar("alphabet: A B\naxiom: A\nA -> AQ\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownLetter('Q'));
        assert_eq!(err.line, 3);
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_grammar("axiom: A\n\n  what is this\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert_eq!((err.line, err.column), (3, 3));

        let err = parse_grammar("axiom: A\nAB -> A\n").unwrap_err();
        assert_eq!(err.line, 2);

        assert_eq!(parse_grammar("A -> B\n").unwrap_err().kind, ParseErrorKind::MissingAxiom);
        assert_eq!(
            parse_grammar("axiom: [A\n").unwrap_err().kind,
            ParseErrorKind::UnbalancedAxiom
        );
    }

    #[test]
    fn contexts_conditions_and_parameters() {
        let src = "params: x y\nparam A 2\naxiom: A(1,2)\nL < A > R : x >= 1 && y != 3 (1) -> A(x+1, y-0.5)B\n";
        let g = parse_grammar(src).unwrap();
        let p = &g.productions()[0];
        assert_eq!(p.left_context, vec!['L']);
        assert_eq!(p.right_context, vec!['R']);
        let cond = p.condition.as_ref().unwrap();
        assert_eq!(cond.clauses.len(), 2);
        assert!(cond.holds(&[1.0, 2.0]));
        assert!(!cond.holds(&[1.0, 3.0]));
        assert_eq!(
            p.successor[0].params,
            vec![ParamExpr::Param { index: 0, offset: 1.0 }, ParamExpr::Param { index: 1, offset: -0.5 }]
        );
        assert_eq!(g.arity('A'), 2);
        assert_eq!(g.arity('B'), 0);
    }

    #[test]
    fn arity_is_enforced() {
        let err = parse_grammar("params: x\nparam A 1\naxiom: A\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ArityMismatch { letter: 'A', expected: 1, found: 0 }));
        let err = parse_grammar("params: x\nparam A 1\naxiom: A(0)\nA -> A(x)B(x)\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ArityMismatch { letter: 'B', .. }));
        let err = parse_grammar("params: x\naxiom: A\nA -> A(x)\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownParameter("x".into()));
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_grammar("# koch\n\naxiom: F   # start\nF -> F+F-F-F+F # rule\n").unwrap();
        assert_eq!(g.productions().len(), 1);
        assert_eq!(g.productions()[0].successor.len(), 9);
    }
}
