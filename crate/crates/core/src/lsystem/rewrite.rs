use super::grammar::{Grammar, ParamExpr, Production};
use super::symbol::{bracket_partners, Symbol, SymbolString, POP, PUSH};
use super::RewriteError;
use crate::rng;

/// Addresses the random draws of one rewriting pass. A stochastic choice
/// for the symbol at position `p` is drawn from `(seed, iteration, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    pub seed: u64,
    pub iteration: u64,
}

impl RandomStream {
    pub fn new(seed: u64, iteration: u64) -> Self {
        Self { seed, iteration }
    }

    fn unit(&self, position: usize) -> f64 {
        rng::unit(self.seed, self.iteration, position as u64)
    }
}

/// Applies `iterations` parallel rewriting passes starting from `input`.
pub fn rewrite(
    grammar: &Grammar,
    input: &SymbolString,
    iterations: u32,
    seed: u64,
) -> Result<SymbolString, RewriteError> {
    let mut current = input.clone();
    for it in 0..iterations {
        current = rewrite_step(grammar, &current, RandomStream::new(seed, u64::from(it)))?;
    }
    Ok(current)
}

/// Rewrites every symbol of `input` simultaneously.
///
/// Symbols without a matching production are copied, brackets always are.
/// When several productions match, the highest specificity wins (context
/// and condition, then context, then condition, then bare) and ties go to
/// the first declared group; a stochastic group then draws its alternative
/// from `stream`.
pub fn rewrite_step(
    grammar: &Grammar,
    input: &SymbolString,
    stream: RandomStream,
) -> Result<SymbolString, RewriteError> {
    let symbols = input.symbols();
    let partners = bracket_partners(symbols).ok_or(RewriteError::Unbalanced)?;
    let mut out = Vec::with_capacity(symbols.len() * 2);

    for (position, symbol) in symbols.iter().enumerate() {
        if symbol.is_bracket() {
            out.push(symbol.clone());
            continue;
        }
        if !grammar.knows(symbol.letter) {
            return Err(RewriteError::UnknownLetter { letter: symbol.letter, position });
        }
        let expected = grammar.arity(symbol.letter);
        if symbol.params.len() != expected {
            return Err(RewriteError::ArityMismatch {
                letter: symbol.letter,
                position,
                expected,
                found: symbol.params.len(),
            });
        }
        match select(grammar, symbols, &partners, position, stream) {
            Some(p) => instantiate(p, symbol, position, &mut out)?,
            None => out.push(symbol.clone()),
        }
    }
    Ok(SymbolString::from_symbols(out))
}

fn select<'g>(
    grammar: &'g Grammar,
    symbols: &[Symbol],
    partners: &[Option<usize>],
    position: usize,
    stream: RandomStream,
) -> Option<&'g Production> {
    let symbol = &symbols[position];
    let matching: Vec<&Production> = grammar
        .candidates(symbol.letter)
        .iter()
        .map(|&i| &grammar.productions()[i])
        .filter(|p| {
            context_matches(symbols, partners, position, &p.left_context, &p.right_context)
                && p.condition.as_ref().is_none_or(|c| c.holds(&symbol.params))
        })
        .collect();
    let best = matching.iter().map(|p| p.specificity()).max()?;
    let leader = *matching.iter().find(|p| p.specificity() == best)?;
    let group: Vec<&Production> = matching.into_iter().filter(|p| p.same_group(leader)).collect();
    if group.len() == 1 {
        return Some(group[0]);
    }
    let draw = stream.unit(position);
    let mut acc = 0.0;
    for p in &group {
        acc += p.probability;
        if draw < acc {
            return Some(p);
        }
    }
    // Rounding can leave the cumulative sum a hair under 1.
    group.last().copied()
}

fn instantiate(
    production: &Production,
    predecessor: &Symbol,
    position: usize,
    out: &mut Vec<Symbol>,
) -> Result<(), RewriteError> {
    for t in &production.successor {
        let mut params = Vec::with_capacity(t.params.len());
        for p in &t.params {
            params.push(match *p {
                ParamExpr::Const(c) => c,
                ParamExpr::Param { index, offset } => {
                    let value = predecessor.params.get(index).ok_or(RewriteError::ArityMismatch {
                        letter: predecessor.letter,
                        position,
                        expected: index + 1,
                        found: predecessor.params.len(),
                    })?;
                    value + offset
                }
            });
        }
        out.push(Symbol { letter: t.letter, params });
    }
    Ok(())
}

/// Bracket-aware context test for the symbol at `position`.
///
/// Left context skips whole bracketed groups and treats `[` as transparent,
/// so a branch sees its parent segment. Right context skips bracketed
/// groups but never climbs out of the current branch past a `]`.
/// Unbalanced input never matches.
pub fn match_context(input: &SymbolString, position: usize, left: &[char], right: &[char]) -> bool {
    let symbols = input.symbols();
    if position >= symbols.len() {
        return false;
    }
    match bracket_partners(symbols) {
        Some(partners) => context_matches(symbols, &partners, position, left, right),
        None => false,
    }
}

fn context_matches(
    symbols: &[Symbol],
    partners: &[Option<usize>],
    position: usize,
    left: &[char],
    right: &[char],
) -> bool {
    left_matches(symbols, partners, position, left) && right_matches(symbols, partners, position, right)
}

fn left_matches(symbols: &[Symbol], partners: &[Option<usize>], position: usize, want: &[char]) -> bool {
    let mut expected = want.iter().rev();
    let mut next = expected.next();
    let mut i = position;
    while let Some(&c) = next {
        if i == 0 {
            return false;
        }
        i -= 1;
        match symbols[i].letter {
            PUSH => continue,
            POP => i = partners[i].expect("balanced"),
            letter if letter == c => next = expected.next(),
            _ => return false,
        }
    }
    true
}

fn right_matches(symbols: &[Symbol], partners: &[Option<usize>], position: usize, want: &[char]) -> bool {
    let mut i = position;
    for &c in want {
        loop {
            i += 1;
            if i >= symbols.len() {
                return false;
            }
            match symbols[i].letter {
                PUSH => i = partners[i].expect("balanced"),
                POP => return false,
                letter if letter == c => break,
                _ => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsystem::parse_grammar;

    const SOCIAL: &str = include_str!("../../grammars/social.lsys");

    fn s(text: &str) -> SymbolString {
        SymbolString::parse(text).unwrap()
    }

    #[test]
    fn social_grammar_first_steps() {
        let g = parse_grammar(SOCIAL).unwrap();
        let one = rewrite_step(&g, &s("U"), RandomStream::new(0, 0)).unwrap();
        assert_eq!(one.to_string(), "mmmmmPF");
        let two = rewrite_step(&g, &one, RandomStream::new(0, 1)).unwrap();
        assert_eq!(two.to_string(), "mmmmm".to_owned() + "mmm[[lBCS]P]" + "mm[[rmk]F]");
    }

    #[test]
    fn doubling_rule() {
        let g = parse_grammar("axiom: B\nB -> BB\n").unwrap();
        assert_eq!(rewrite_step(&g, &s("B"), RandomStream::new(1, 0)).unwrap().to_string(), "BB");
        assert_eq!(rewrite(&g, &s("B"), 10, 99).unwrap().len(), 1024);
    }

    #[test]
    fn zero_iterations_is_identity() {
        let g = parse_grammar(SOCIAL).unwrap();
        assert_eq!(rewrite(&g, &s("U"), 0, 5).unwrap(), s("U"));
    }

    #[test]
    fn unknown_letters_and_arity() {
        let g = parse_grammar(SOCIAL).unwrap();
        assert_eq!(
            rewrite_step(&g, &s("UZ"), RandomStream::new(0, 0)),
            Err(RewriteError::UnknownLetter { letter: 'Z', position: 1 })
        );
        assert!(matches!(
            rewrite_step(&g, &s("P(1)"), RandomStream::new(0, 0)),
            Err(RewriteError::ArityMismatch { letter: 'P', expected: 0, found: 1, .. })
        ));
        assert_eq!(rewrite_step(&g, &s("[U"), RandomStream::new(0, 0)), Err(RewriteError::Unbalanced));
    }

    #[test]
    fn context_skips_branches() {
        assert!(match_context(&s("A[B]C"), 4, &['A'], &[]));
        assert!(match_context(&s("AC"), 1, &['A'], &[]));
        assert!(!match_context(&s("C"), 0, &['A'], &[]));
        assert!(!match_context(&s("C"), 0, &[], &['A']));
        assert!(match_context(&s("C"), 0, &[], &[]));
        // a branch sees its parent through '['
        assert!(match_context(&s("A[B]"), 2, &['A'], &[]));
        // right context skips a sibling branch but stops at the branch end
        assert!(match_context(&s("A[B]C"), 0, &[], &['C']));
        assert!(!match_context(&s("A[B]C"), 2, &[], &['C']));
        assert!(match_context(&s("XA[Q]BC"), 1, &['X'], &['B', 'C']));
        assert!(match_context(&s("XY[Q]Z"), 5, &['X', 'Y'], &[]));
        assert!(!match_context(&s("XY[Q]Z"), 5, &['Y', 'X'], &[]));
    }

    #[test]
    fn context_sensitive_signal_propagation() {
        // classic 2L signal: a 'b' travels right one cell per step
        let g = parse_grammar("axiom: baaa\nb < a -> b\nb -> a\n").unwrap();
        let mut cur = g.axiom().clone();
        let mut seen = vec![cur.to_string()];
        for i in 0..3 {
            cur = rewrite_step(&g, &cur, RandomStream::new(0, i)).unwrap();
            seen.push(cur.to_string());
        }
        assert_eq!(seen, ["baaa", "abaa", "aaba", "aaab"]);
    }

    #[test]
    fn specificity_and_declaration_order() {
        let g = parse_grammar("params: x\nparam A 1\naxiom: A(0)\nA -> X\nA : x > 0 -> Y\nQ < A -> Z\nQ < A : x > 0 -> W\n")
            .unwrap();
        let step = |t: &str| rewrite_step(&g, &s(t), RandomStream::new(0, 0)).unwrap().letters();
        assert_eq!(step("A(0)"), "X");
        assert_eq!(step("A(1)"), "Y");
        assert_eq!(step("QA(0)"), "QZ");
        assert_eq!(step("QA(1)"), "QW");

        let g = parse_grammar("axiom: A\nA -> X\nA : 1 > 0 -> Y\nA : 2 > 0 -> Z\n").unwrap();
        assert_eq!(rewrite_step(&g, &s("A"), RandomStream::new(0, 0)).unwrap().letters(), "Y");
    }

    #[test]
    fn parametric_successors() {
        let g = parse_grammar("params: i s v\nparam P 3\naxiom: P(0,0,0)\nP : v < 2 -> P(i+1, s, v+1)\n").unwrap();
        let out = rewrite(&g, g.axiom(), 5, 0).unwrap();
        assert_eq!(out.to_string(), "P(2,0,2)");
    }

    #[test]
    fn stochastic_choice_is_seeded() {
        let g = parse_grammar("axiom: AAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAA\nA (0.5) -> X\nA (0.5) -> Y\n").unwrap();
        let a = rewrite(&g, g.axiom(), 1, 1).unwrap();
        let b = rewrite(&g, g.axiom(), 1, 1).unwrap();
        let c = rewrite(&g, g.axiom(), 1, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let xs = a.count_letter('X');
        assert!(xs > 5 && xs < 35, "{xs}");
    }

    #[test]
    fn stochastic_frequencies_follow_probabilities() {
        let axiom = "A".repeat(4000);
        let g = parse_grammar(&format!("axiom: {axiom}\nA (0.2) -> X\nA (0.8) -> Y\n")).unwrap();
        let out = rewrite(&g, g.axiom(), 1, 17).unwrap();
        let share = out.count_letter('X') as f64 / 4000.0;
        assert!((share - 0.2).abs() < 0.03, "{share}");
    }
}
