use super::{interpret, Geometry, SymbolActions, TurtleConfig, TurtleError};
use crate::lsystem::{parse_grammar, rewrite};

/// Quadratic Koch curve (type 1).
pub const KOCH_GRAMMAR: &str = include_str!("../../grammars/koch.lsys");

/// Rewrites the quadratic Koch grammar `iterations` times and interprets it
/// with 90 degree turns. The curve has exactly `5^iterations` segments.
pub fn koch_quadratic(iterations: u32, config: &TurtleConfig) -> Result<Geometry, TurtleError> {
    let grammar = parse_grammar(KOCH_GRAMMAR).expect("built-in grammar parses");
    let curve = rewrite(&grammar, grammar.axiom(), iterations, 0).expect("built-in grammar rewrites");
    let config = TurtleConfig { branch_angle: 90.0, twig_angle: 90.0, ..config.clone() };
    interpret(&curve, &config, &SymbolActions::koch())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_counts() {
        let cfg = TurtleConfig::default();
        assert_eq!(koch_quadratic(0, &cfg).unwrap().segments.len(), 1);
        assert_eq!(koch_quadratic(1, &cfg).unwrap().segments.len(), 5);
        assert_eq!(koch_quadratic(3, &cfg).unwrap().segments.len(), 125);
    }

    #[test]
    fn first_iteration_shape() {
        let cfg = TurtleConfig { step_length: 1.0, start_heading: 0.0, ..TurtleConfig::default() };
        let g = koch_quadratic(1, &cfg).unwrap();
        let ends: Vec<(i64, i64)> =
            g.segments.iter().map(|s| (s.to.x.round() as i64, s.to.y.round() as i64)).collect();
        assert_eq!(ends, [(1, 0), (1, 1), (2, 1), (2, 0), (3, 0)]);
    }
}
