//! Named automorphisms and simplices.

use crate::finite_order::{build_xp, build_xpq, sigma};
use crate::free_group::{AutoPair, Word};
use crate::graph::{Forest, Graph};
use crate::marked::MarkedGraph;

/// `a ↦ b, b ↦ ab`.
pub fn golden() -> AutoPair {
    let w = |s: &str| Word::parse(s, 2).expect("valid word");
    AutoPair::new(vec![w("b"), w("ab")], vec![w("bA"), w("a")]).expect("golden automorphism")
}

/// Theta graph on three edges from vertex 0 to vertex 1, tree `{e0}`,
/// generators `e1 E0` and `e2 E0`.
pub fn theta() -> MarkedGraph {
    let g = Graph::multi_theta(3);
    let tree = Forest::new(&g, &[0]).expect("single edge");
    MarkedGraph::from_tree(g, 0, tree).expect("theta marking")
}

/// Two loops joined by a separating edge `e1`.
pub fn barbell() -> MarkedGraph {
    let g = Graph::new(2, vec![(0, 0), (0, 1), (1, 1)]).expect("barbell");
    let tree = Forest::new(&g, &[1]).expect("single edge");
    MarkedGraph::from_tree(g, 0, tree).expect("barbell marking")
}

pub const AUTO_NAMES: &[&str] = &[
    "golden",
    "identity2",
    "identity3",
    "alpha3",
    "alpha5",
    "alpha23",
    "sigma3",
    "sigma23",
];

pub const SIMPLEX_NAMES: &[&str] = &["rose2", "rose3", "theta", "barbell"];

fn trailing_number(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse().ok().filter(|&n| n >= 1)
}

/// Built-in automorphism by name: `golden`, `identityN`, `alphaP` (the
/// rotation of `X_P`), `alpha2Q` (the model map of `X_{2,Q}`), `sigma3`,
/// `sigma2Q`.
pub fn builtin_auto(name: &str) -> Option<AutoPair> {
    if name == "golden" {
        return Some(golden());
    }
    if let Some(n) = trailing_number(name, "identity") {
        return Some(AutoPair::identity(n));
    }
    for (prefix, involution) in [("alpha", false), ("sigma", true)] {
        let Some(rest) = name.strip_prefix(prefix) else {
            continue;
        };
        let model = match rest.strip_prefix('2') {
            Some(q) if !q.is_empty() => build_xpq(2, q.parse().ok()?).ok()?,
            _ => build_xp(rest.parse().ok()?).ok()?,
        };
        return if involution {
            sigma(&model).ok()
        } else {
            Some(model.induced)
        };
    }
    None
}

/// Built-in marked graph by name: `roseN`, `theta`, `barbell`.
pub fn builtin_simplex(name: &str) -> Option<MarkedGraph> {
    match name {
        "theta" => Some(theta()),
        "barbell" => Some(barbell()),
        _ => trailing_number(name, "rose").map(MarkedGraph::rose),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for n in AUTO_NAMES {
            assert!(builtin_auto(n).is_some(), "{n}");
        }
        for n in SIMPLEX_NAMES {
            assert!(builtin_simplex(n).is_some(), "{n}");
        }
        assert!(builtin_auto("alpha4").is_none());
        assert!(builtin_auto("nothing").is_none());
        assert_eq!(builtin_auto("alpha3").unwrap().rank(), 2);
        assert_eq!(builtin_auto("alpha25").unwrap().rank(), 4);
    }
}
