#![allow(dead_code)]

use cvmin_core::free_group::AutoPair;
use cvmin_core::graph::{Forest, Graph};
use cvmin_core::rational::rat;
use cvmin_core::samples::{barbell, theta};
use cvmin_core::{CVPoint, MarkedGraph, Rational, Word};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn w(s: &str) -> Word {
    Word::parse(s, 8).unwrap()
}

pub fn alpha3() -> AutoPair {
    AutoPair::new(vec![w("bA"), w("A")], vec![w("B"), w("aB")]).unwrap()
}

fn with_tree(ends: &[(usize, usize)], vertices: usize) -> MarkedGraph {
    let g = Graph::new(vertices, ends.to_vec()).unwrap();
    let tree = g.spanning_tree();
    MarkedGraph::from_tree(g, 0, tree).unwrap()
}

/// Graphs of rank 3 whose vertices all have valence three.
pub fn trivalent_rank3() -> Vec<MarkedGraph> {
    vec![
        with_tree(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 4),
        with_tree(&[(0, 1), (0, 1), (1, 2), (2, 3), (2, 3), (3, 0)], 4),
        with_tree(&[(0, 0), (0, 1), (1, 2), (1, 3), (2, 3), (2, 3)], 4),
        with_tree(&[(0, 1), (0, 2), (0, 3), (1, 1), (2, 2), (3, 3)], 4),
        with_tree(&[(0, 0), (0, 1), (1, 2), (1, 2), (2, 3), (3, 3)], 4),
    ]
}

/// A spread of marked graphs of the given rank (2 or 3).
pub fn shapes(rank: usize) -> Vec<MarkedGraph> {
    match rank {
        2 => vec![MarkedGraph::rose(2), theta(), barbell()],
        3 => {
            let mut v = trivalent_rank3();
            v.push(MarkedGraph::rose(3));
            let g = Graph::multi_theta(4);
            let tree = Forest::new(&g, &[0]).unwrap();
            v.push(MarkedGraph::from_tree(g, 0, tree).unwrap());
            v.push(with_tree(&[(0, 0), (0, 0), (0, 1), (1, 1)], 2));
            v
        }
        _ => panic!("no shapes for rank {rank}"),
    }
}

pub fn random_elementary<R: Rng>(rank: usize, rng: &mut R) -> AutoPair {
    match rng.gen_range(0..4) {
        0 => AutoPair::invert_generator(rank, rng.gen_range(0..rank)),
        1 => {
            let i = rng.gen_range(0..rank);
            let j = (i + rng.gen_range(1..rank)) % rank;
            AutoPair::swap(rank, i, j)
        }
        _ => {
            let i = rng.gen_range(0..rank);
            let j = (i + rng.gen_range(1..rank)) % rank;
            AutoPair::nielsen(rank, i, j, rng.gen(), rng.gen())
        }
    }
}

/// A product of at most `k` elementary automorphisms.
pub fn random_auto<R: Rng>(rank: usize, k: usize, rng: &mut R) -> AutoPair {
    let n = rng.gen_range(0..=k);
    (0..n).fold(AutoPair::identity(rank), |acc, _| {
        acc.compose(&random_elementary(rank, rng))
    })
}

/// Positive lengths `k_i / 20` summing to one.
pub fn random_lengths<R: Rng>(edges: usize, rng: &mut R) -> Vec<Rational> {
    assert!(edges <= 20);
    let mut cuts: Vec<i64> = (1..20).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<i64> = cuts[..edges - 1].to_vec();
    cuts.push(0);
    cuts.push(20);
    cuts.sort();
    cuts.windows(2).map(|p| rat(p[1] - p[0], 20)).collect()
}

pub fn random_point_on<R: Rng>(m: &MarkedGraph, rng: &mut R) -> CVPoint {
    CVPoint::new(m.clone(), random_lengths(m.graph().num_edges(), rng)).unwrap()
}

/// A random open point: a shape from `pool`, a marking changed by at most
/// five elementary automorphisms, and lengths with denominator 20.
pub fn random_point_from<R: Rng>(pool: &[MarkedGraph], rng: &mut R) -> CVPoint {
    let m = pool.choose(rng).unwrap();
    let phi = random_auto(m.rank(), 5, rng);
    random_point_on(&m.act(&phi), rng)
}

pub fn random_point<R: Rng>(rank: usize, rng: &mut R) -> CVPoint {
    random_point_from(&shapes(rank), rng)
}
