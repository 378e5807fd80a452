//! Displacement of an automorphism and its minimization over a simplex.
//!
//! On a fixed marked graph, `Λ(X, Xφ)` is the largest of finitely many
//! linear-fractional functions of the edge lengths, one per candidate `a`:
//! `(c_a·L) / (d_a·L)`, where `d_a` counts edge crossings of `a` and `c_a`
//! those of the tight loop of `φ(a)`. Minimizing over the closed simplex is a
//! quasiconvex problem solved by bisection on `t` over the linear systems
//! `c_a·L ≤ t·d_a·L`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::free_group::{AutoPair, CyclicWord};
use crate::graph::all_forests;
use crate::lipschitz::candidate_table;
use crate::lp::{maximize, Constraint, LpOutcome};
use crate::marked::{CVPoint, MarkedGraph};
use crate::rational::{int, weighted_sum, Rational};

/// Per-candidate crossing vectors of `φ(a)` (numerators) and `a`
/// (denominators).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatioSystem {
    pub candidates: Vec<CyclicWord>,
    pub numerators: Vec<Vec<u64>>,
    pub denominators: Vec<Vec<u64>>,
}

impl RatioSystem {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.denominators.first().map_or(0, Vec::len)
    }

    /// `max_a (c_a·L)/(d_a·L)`, skipping `0/0` terms. `None` if some term
    /// has a zero denominator and a positive numerator.
    pub fn evaluate(&self, lengths: &[Rational]) -> Option<Rational> {
        let mut best: Option<Rational> = None;
        for (c, d) in self.numerators.iter().zip(&self.denominators) {
            let den = weighted_sum(d, lengths);
            let num = weighted_sum(c, lengths);
            if den.is_zero() {
                if num.is_zero() {
                    continue;
                }
                return None;
            }
            let r = num / den;
            if best.as_ref().is_none_or(|b| r > *b) {
                best = Some(r);
            }
        }
        best
    }

    /// Constraints `(c_a − t·d_a)·L ≤ 0` and `ΣL = 1`.
    fn constraints(&self, t: &Rational) -> Vec<Constraint> {
        let n = self.num_edges();
        let mut out: Vec<Constraint> = self
            .numerators
            .iter()
            .zip(&self.denominators)
            .map(|(c, d)| {
                Constraint::le(
                    (0..n).map(|e| int(c[e] as i64) - t * int(d[e] as i64)).collect(),
                    Rational::zero(),
                )
            })
            .collect();
        out.push(Constraint::eq(vec![Rational::one(); n], Rational::one()));
        out
    }

    /// A feasible length vector at level `t`, if any.
    pub fn feasible_at(&self, t: &Rational) -> Option<Vec<Rational>> {
        let n = self.num_edges();
        maximize(&vec![Rational::zero(); n], &self.constraints(t))
            .point()
            .map(<[Rational]>::to_vec)
    }

    /// The feasible point at level `t` maximizing the least edge length,
    /// with that length.
    pub fn max_min_length(&self, t: &Rational) -> Option<(Vec<Rational>, Rational)> {
        let n = self.num_edges();
        let mut cs: Vec<Constraint> = self
            .constraints(t)
            .into_iter()
            .map(|mut c| {
                c.coeffs.push(Rational::zero());
                c
            })
            .collect();
        for e in 0..n {
            let mut coeffs = vec![Rational::zero(); n + 1];
            coeffs[e] = -Rational::one();
            coeffs[n] = Rational::one();
            cs.push(Constraint::le(coeffs, Rational::zero()));
        }
        let mut objective = vec![Rational::zero(); n + 1];
        objective[n] = Rational::one();
        match maximize(&objective, &cs) {
            LpOutcome::Optimal { value, mut point } => {
                point.pop();
                Some((point, value))
            }
            _ => None,
        }
    }

    /// Least and greatest value of edge `e` over the feasible set at `t`.
    pub fn coordinate_range(&self, t: &Rational, e: usize) -> Option<(Rational, Rational)> {
        let n = self.num_edges();
        let cs = self.constraints(t);
        let mut obj = vec![Rational::zero(); n];
        obj[e] = Rational::one();
        let hi = match maximize(&obj, &cs) {
            LpOutcome::Optimal { value, .. } => value,
            _ => return None,
        };
        obj[e] = -Rational::one();
        let lo = match maximize(&obj, &cs) {
            LpOutcome::Optimal { value, .. } => -value,
            _ => return None,
        };
        Some((lo, hi))
    }
}

/// One ratio per candidate of the simplex.
pub fn build_ratio_system(m: &MarkedGraph, phi: &AutoPair) -> RatioSystem {
    let table = candidate_table(m);
    let mut sys = RatioSystem {
        candidates: Vec::with_capacity(table.len()),
        numerators: Vec::with_capacity(table.len()),
        denominators: Vec::with_capacity(table.len()),
    };
    for c in table {
        sys.numerators.push(m.crossings(&phi.apply(&c.class.as_word())));
        sys.denominators.push(c.counts);
        sys.candidates.push(c.class);
    }
    sys
}

/// The ratio system extended by the candidates of every face, realised in
/// this graph. It agrees with the displacement at every point of the closed
/// simplex, including those with zero-length edges.
pub fn build_closed_ratio_system(m: &MarkedGraph, phi: &AutoPair) -> RatioSystem {
    let mut sys = build_ratio_system(m, phi);
    let mut seen: std::collections::BTreeSet<CyclicWord> = sys.candidates.iter().cloned().collect();
    for forest in all_forests(m.graph()) {
        let (face, _) = m.collapse(&forest).expect("forest collapse");
        for c in candidate_table(&face) {
            if seen.insert(c.class.clone()) {
                let w = c.class.as_word();
                sys.denominators.push(m.crossings(&w));
                sys.numerators.push(m.crossings(&phi.apply(&w)));
                sys.candidates.push(c.class);
            }
        }
    }
    sys
}

/// `Λ(x, xφ)`.
pub fn displacement_at(x: &CVPoint, phi: &AutoPair) -> Result<Rational> {
    if x.rank() != phi.rank() {
        return Err(Error::RankMismatch {
            expected: x.rank(),
            found: phi.rank(),
        });
    }
    if !x.is_open() {
        return Err(Error::ZeroLengthEdge);
    }
    Ok(build_ratio_system(x.marked(), phi)
        .evaluate(x.lengths())
        .expect("open points have positive candidate lengths"))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MinimizationResult {
    pub lower: Rational,
    pub upper: Rational,
    /// Feasible at `upper`, chosen to maximize the least edge length.
    pub argmin: Vec<Rational>,
    /// Candidates whose ratio at `argmin` is at least `lower`.
    pub active: Vec<CyclicWord>,
    /// Whether `argmin` lies in the open simplex.
    pub interior: bool,
}

/// Brackets the least displacement over the closed simplex of `m`.
///
/// Bisection stops once `upper − lower ≤ tol`; as `lower ≥ 1` this also
/// gives `upper ≤ lower·(1 + tol)`.
pub fn min_displacement_on_simplex(m: &MarkedGraph, phi: &AutoPair, tol: &Rational) -> Result<MinimizationResult> {
    if !tol.is_positive() {
        return Err(Error::NonPositiveTolerance);
    }
    if m.rank() != phi.rank() {
        return Err(Error::RankMismatch {
            expected: m.rank(),
            found: phi.rank(),
        });
    }
    let sys = build_closed_ratio_system(m, phi);
    let one = Rational::one();
    let (lower, upper) = if sys.feasible_at(&one).is_some() {
        (one.clone(), one)
    } else {
        let mut lower = one;
        let mut upper = sys.evaluate(CVPoint::centre(m).lengths()).expect("centre is open");
        while &upper - &lower > *tol {
            let mid = (&lower + &upper) / int(2);
            if sys.feasible_at(&mid).is_some() {
                upper = mid;
            } else {
                lower = mid;
            }
        }
        (lower, upper)
    };
    let (argmin, delta) = sys.max_min_length(&upper).expect("upper level is feasible");
    let active = sys
        .candidates
        .iter()
        .zip(sys.numerators.iter().zip(&sys.denominators))
        .filter(|(_, (c, d))| weighted_sum(c, &argmin) >= &lower * weighted_sum(d, &argmin))
        .filter(|(_, (_, d))| !weighted_sum(d, &argmin).is_zero())
        .map(|(a, _)| a.clone())
        .collect();
    Ok(MinimizationResult {
        lower,
        upper,
        argmin,
        active,
        interior: delta.is_positive(),
    })
}

/// The set of displacement-one points of the closed simplex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FixedPointPolytope {
    pub system: RatioSystem,
    /// The feasible point maximizing the least edge length, if feasible.
    pub deepest: Option<Vec<Rational>>,
    pub max_min_length: Option<Rational>,
}

impl FixedPointPolytope {
    pub fn is_empty(&self) -> bool {
        self.deepest.is_none()
    }

    /// Some fixed point has all lengths positive.
    pub fn interior_nonempty(&self) -> bool {
        self.max_min_length.as_ref().is_some_and(|d| d.is_positive())
    }

    /// The polytope is the single point `p`.
    pub fn is_single_point(&self, p: &[Rational]) -> bool {
        let one = Rational::one();
        (0..p.len()).all(|e| {
            self.system
                .coordinate_range(&one, e)
                .is_some_and(|(lo, hi)| lo == p[e] && hi == p[e])
        })
    }
}

/// Points of the simplex of `m` with `c_a·L ≤ d_a·L` for all candidates.
pub fn fixed_point_polytope(m: &MarkedGraph, phi: &AutoPair) -> FixedPointPolytope {
    let system = build_ratio_system(m, phi);
    let found = system.max_min_length(&Rational::one());
    let (deepest, max_min_length) = match found {
        Some((p, d)) => (Some(p), Some(d)),
        None => (None, None),
    };
    FixedPointPolytope {
        system,
        deepest,
        max_min_length,
    }
}

/// Displacement at `k + 1` evenly spaced points from `x` to `y`; `None`
/// where a candidate has zero length but positive image length.
pub fn segment_profile(x: &CVPoint, y: &CVPoint, phi: &AutoPair, k: usize) -> Result<Vec<Option<Rational>>> {
    if x.marked() != y.marked() {
        return Err(Error::InvalidLengths(
            "segment endpoints lie in different simplices".into(),
        ));
    }
    if k == 0 {
        return Err(Error::InvalidLengths("segment needs at least one step".into()));
    }
    let sys = build_closed_ratio_system(x.marked(), phi);
    Ok((0..=k)
        .map(|i| {
            let s = Rational::new((i as i64).into(), (k as i64).into());
            sys.evaluate(x.interpolate(y, &s).lengths())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::Word;
    use crate::graph::{Forest, Graph};
    use crate::rational::{parse_rational, rat, to_f64};

    fn w(s: &str) -> Word {
        Word::parse(s, 4).unwrap()
    }

    fn golden() -> AutoPair {
        AutoPair::new(vec![w("b"), w("ab")], vec![w("bA"), w("a")]).unwrap()
    }

    fn theta() -> MarkedGraph {
        let g = Graph::multi_theta(3);
        let tree = Forest::new(&g, &[0]).unwrap();
        MarkedGraph::from_tree(g, 0, tree).unwrap()
    }

    // g1 -> g2 g1^-1, g2 -> g1^-1
    fn alpha3() -> AutoPair {
        AutoPair::new(vec![w("bA"), w("A")], vec![w("B"), w("aB")]).unwrap()
    }

    #[test]
    fn golden_ratio_system() {
        let sys = build_ratio_system(&MarkedGraph::rose(2), &golden());
        let expect_d: Vec<Vec<u64>> = vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 1]];
        let expect_c: Vec<Vec<u64>> = vec![vec![0, 1], vec![1, 1], vec![1, 2], vec![1, 0]];
        let order: Vec<CyclicWord> = ["a", "b", "ab", "aB"]
            .iter()
            .map(|s| w(s).conjugacy_class().unoriented())
            .collect();
        for (i, a) in order.iter().enumerate() {
            let k = sys.candidates.iter().position(|c| c == a).unwrap();
            assert_eq!(sys.denominators[k], expect_d[i]);
            assert_eq!(sys.numerators[k], expect_c[i]);
        }
        let id = build_ratio_system(&theta(), &AutoPair::identity(2));
        assert_eq!(id.numerators, id.denominators);
    }

    #[test]
    fn alpha3_permutes_candidates() {
        let sys = build_ratio_system(&theta(), &alpha3());
        let mut c = sys.numerators.clone();
        let mut d = sys.denominators.clone();
        c.sort();
        d.sort();
        assert_eq!(c, d);
        assert_ne!(sys.numerators, sys.denominators);
    }

    #[test]
    fn displacement_examples() {
        let rose = CVPoint::centre(&MarkedGraph::rose(2));
        assert_eq!(displacement_at(&rose, &golden()).unwrap(), int(2));
        assert_eq!(displacement_at(&CVPoint::centre(&theta()), &alpha3()).unwrap(), int(1));
        let x = CVPoint::new(MarkedGraph::rose(2), vec![rat(381966, 1000000), rat(618034, 1000000)]).unwrap();
        let v = to_f64(&displacement_at(&x, &golden()).unwrap());
        assert!((v - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-5);
    }

    #[test]
    fn golden_minimum() {
        let tol = parse_rational("1e-9").unwrap();
        let r = min_displacement_on_simplex(&MarkedGraph::rose(2), &golden(), &tol).unwrap();
        let gold = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(to_f64(&r.lower) <= gold + 1e-12 && to_f64(&r.upper) >= gold - 1e-12);
        assert!(&r.upper - &r.lower <= tol);
        assert!((to_f64(&r.argmin[0]) - 0.381966011).abs() < 1e-6);
        assert!(r.interior);
        let sys = build_ratio_system(&MarkedGraph::rose(2), &golden());
        assert!(sys.evaluate(&r.argmin).unwrap() <= r.upper);
    }

    #[test]
    fn identity_and_alpha3_minima() {
        let tol = rat(1, 1000);
        let r = min_displacement_on_simplex(&theta(), &AutoPair::identity(2), &tol).unwrap();
        assert_eq!((r.lower, r.upper), (int(1), int(1)));
        let r = min_displacement_on_simplex(&theta(), &alpha3(), &tol).unwrap();
        assert_eq!(r.upper, int(1));
        assert_eq!(r.argmin, vec![rat(1, 3); 3]);
        assert!(min_displacement_on_simplex(&theta(), &alpha3(), &int(0)).is_err());
    }

    #[test]
    fn fixed_point_polytopes() {
        let p = fixed_point_polytope(&theta(), &alpha3());
        assert_eq!(p.max_min_length, Some(rat(1, 3)));
        assert!(p.is_single_point(&[rat(1, 3), rat(1, 3), rat(1, 3)]));
        assert!(fixed_point_polytope(&MarkedGraph::rose(2), &golden()).is_empty());
        let id = fixed_point_polytope(&theta(), &AutoPair::identity(2));
        assert!(id.interior_nonempty());
        assert!(!id.is_single_point(&[rat(1, 3), rat(1, 3), rat(1, 3)]));
    }

    #[test]
    fn segment_profiles() {
        let x = CVPoint::centre(&theta());
        let prof = segment_profile(&x, &x, &golden(), 4).unwrap();
        assert!(prof.windows(2).all(|p| p[0] == p[1]));
        let y = CVPoint::new(theta(), vec![int(0), rat(1, 2), rat(1, 2)]).unwrap();
        let prof = segment_profile(&x, &y, &AutoPair::identity(2), 10).unwrap();
        assert!(prof.iter().all(|v| v == &Some(int(1))));
    }
}
