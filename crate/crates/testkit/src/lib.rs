//! Reference models and generators for the ltree test suites.
//!
//! Nothing here calls into the tree's mutation code: the oracles recount
//! from the raw event list so that they can disagree with it.

pub mod gen;
pub mod oracle;
pub mod shape;

/// Line index of byte `i` in a newline-terminated log; a newline belongs
/// to the line it ends.
pub fn line_of(bytes: &[u8], i: usize) -> u64 {
    bytes[..i].iter().filter(|&&b| b == b'\n').count() as u64
}

/// Repeated string substitution, one letter at a time, for grammars without
/// brackets, parameters or context.
pub fn substitute(axiom: &str, rules: &[(char, &str)], iterations: u32) -> String {
    let mut s = axiom.to_owned();
    for _ in 0..iterations {
        let mut next = String::with_capacity(s.len() * 2);
        for c in s.chars() {
            match rules.iter().find(|(p, _)| *p == c) {
                Some((_, succ)) => next.push_str(succ),
                None => next.push(c),
            }
        }
        s = next;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers() {
        assert_eq!(line_of(b"a\nbc\n", 0), 0);
        assert_eq!(line_of(b"a\nbc\n", 1), 0);
        assert_eq!(line_of(b"a\nbc\n", 2), 1);
        assert_eq!(substitute("B", &[('B', "BB")], 3), "BBBBBBBB");
        assert_eq!(substitute("F", &[('F', "F+F")], 2), "F+F+F+F");
    }
}
