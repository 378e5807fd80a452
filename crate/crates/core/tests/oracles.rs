//! Cross-checks against independent computations.

mod common;

use common::*;
use cvmin_core::displacement::{build_closed_ratio_system, displacement_at, min_displacement_on_simplex};
use cvmin_core::graph::{isomorphisms, Graph, HalfEdge};
use cvmin_core::lipschitz::{stretch, stretch_bruteforce_words};
use cvmin_core::lp::{feasible_point, fourier_motzkin_feasible, Constraint};
use cvmin_core::rational::{int, parse_rational, to_f64};
use cvmin_core::samples::golden;
use cvmin_core::MarkedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest eigenvalue of the abelianised golden map by power iteration.
fn perron_frobenius(m: [[f64; 2]; 2]) -> f64 {
    let mut v = [0.5, 0.5];
    let mut lambda = 0.0;
    for _ in 0..200 {
        let next = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
        lambda = next[0] + next[1];
        v = [next[0] / lambda, next[1] / lambda];
    }
    lambda
}

#[test]
fn golden_bracket_contains_perron_frobenius_eigenvalue() {
    // a -> b, b -> ab; column j counts letters in the image of generator j
    let pf = perron_frobenius([[0.0, 1.0], [1.0, 1.0]]);
    assert!((pf - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    let tol = parse_rational("1e-9").unwrap();
    let res = min_displacement_on_simplex(&MarkedGraph::rose(2), &golden(), &tol).unwrap();
    assert!(to_f64(&res.lower) <= pf + 1e-12);
    assert!(to_f64(&res.upper) >= pf - 1e-12);
    let closed_form = (3.0 - 5f64.sqrt()) / 2.0;
    assert!((to_f64(&res.argmin[0]) - closed_form).abs() < 1e-6);
    assert!(res.interior);
}

#[test]
fn simplex_agrees_with_fourier_motzkin() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut feasible, mut infeasible) = (0, 0);
    for _ in 0..300 {
        let vars = rng.gen_range(1..=3);
        let rows = rng.gen_range(1..=4);
        let constraints: Vec<Constraint> = (0..rows)
            .map(|_| {
                let coeffs = (0..vars).map(|_| int(rng.gen_range(-3..=3))).collect();
                let rhs = int(rng.gen_range(-4..=4));
                if rng.gen_bool(0.2) {
                    Constraint::eq(coeffs, rhs)
                } else {
                    Constraint::le(coeffs, rhs)
                }
            })
            .collect();
        let point = feasible_point(vars, &constraints);
        assert_eq!(
            point.is_some(),
            fourier_motzkin_feasible(vars, &constraints),
            "{constraints:?}"
        );
        match point {
            Some(p) => {
                assert!(p.iter().all(|x| *x >= int(0)));
                assert!(constraints.iter().all(|c| c.holds(&p)));
                feasible += 1;
            }
            None => infeasible += 1,
        }
    }
    assert!(feasible > 30 && infeasible > 30);
}

/// Counts incidence-preserving maps by trying every vertex permutation,
/// edge permutation and orientation.
fn brute_force_automorphisms(g: &Graph) -> usize {
    let n = g.num_vertices();
    let e = g.num_edges();
    let vperms = permutations(n);
    let eperms = permutations(e);
    let mut count = 0;
    for vp in &vperms {
        for ep in &eperms {
            for flips in 0..(1u32 << e) {
                let ok = (0..e).all(|i| {
                    let (a, b) = g.ends()[i];
                    let h = HalfEdge::new(ep[i], flips >> i & 1 == 1);
                    g.origin(h) == vp[a] && g.terminus(h) == vp[b]
                });
                if ok {
                    count += 1;
                }
            }
        }
    }
    count
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn automorphism_counts_match_brute_force() {
    let graphs = [
        (Graph::multi_theta(3), 12),
        (Graph::rose(2), 8),
        (Graph::new(2, vec![(0, 0), (0, 1), (1, 1)]).unwrap(), 8),
        (Graph::multi_theta(4), 48),
    ];
    for (g, expected) in graphs {
        assert_eq!(brute_force_automorphisms(&g), expected);
        assert_eq!(isomorphisms(&g, &g, None).len(), expected);
    }
    for m in trivalent_rank3() {
        let g = m.graph();
        assert_eq!(isomorphisms(g, g, None).len(), brute_force_automorphisms(g));
    }
}

#[test]
fn stretch_matches_word_enumeration_in_rank_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let x = random_point(2, &mut rng);
        let y = random_point(2, &mut rng);
        let fast = stretch(&x, &y).unwrap().value;
        let slow = stretch_bruteforce_words(&x, &y, 8).unwrap();
        assert!(slow <= fast);
        assert_eq!(fast, slow, "{:?} -> {:?}", x.lengths(), y.lengths());
    }
}

#[test]
fn displacement_is_stretch_to_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for rank in [2, 3] {
        for _ in 0..20 {
            let x = random_point(rank, &mut rng);
            let phi = random_auto(rank, 4, &mut rng);
            let direct = stretch(&x, &x.act(&phi)).unwrap().value;
            assert_eq!(displacement_at(&x, &phi).unwrap(), direct);
            let closed = build_closed_ratio_system(x.marked(), &phi);
            assert_eq!(closed.evaluate(x.lengths()).unwrap(), direct);
        }
    }
}
