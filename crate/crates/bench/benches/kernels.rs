use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use cvmin_core::displacement::{build_ratio_system, min_displacement_on_simplex};
use cvmin_core::explorer::{explore_min_set, ExploreLimits};
use cvmin_core::graph::{enumerate_candidates, Graph};
use cvmin_core::lipschitz::stretch;
use cvmin_core::rational::rat;
use cvmin_core::samples::{golden, theta};
use cvmin_core::{CVPoint, MarkedGraph};

fn candidates(c: &mut Criterion) {
    let k4 = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    c.bench_function("candidates/theta", |b| {
        b.iter(|| enumerate_candidates(black_box(theta().graph())))
    });
    c.bench_function("candidates/k4", |b| b.iter(|| enumerate_candidates(black_box(&k4))));
}

fn stretch_kernel(c: &mut Criterion) {
    let x = CVPoint::new(theta(), vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
    let y = x.act(&golden().power(3));
    c.bench_function("stretch/theta", |b| {
        b.iter(|| stretch(black_box(&x), black_box(&y)).unwrap())
    });
    let m = MarkedGraph::rose(3);
    let x3 = CVPoint::centre(&m);
    let y3 = CVPoint::new(m, vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
    c.bench_function("stretch/rose3", |b| {
        b.iter(|| stretch(black_box(&x3), black_box(&y3)).unwrap())
    });
}

fn minimize(c: &mut Criterion) {
    let rose = MarkedGraph::rose(2);
    let phi = golden();
    c.bench_function("ratio_system/theta", |b| {
        b.iter(|| build_ratio_system(black_box(&theta()), &phi))
    });
    c.bench_function("minimize/golden_1e-9", |b| {
        b.iter(|| min_displacement_on_simplex(black_box(&rose), &phi, &rat(1, 1_000_000_000)).unwrap())
    });
    let seed = CVPoint::centre(&rose);
    let limits = ExploreLimits {
        max_simplices: 100,
        max_steps: 6,
    };
    c.bench_function("explore/golden_6_steps", |b| {
        b.iter(|| explore_min_set(black_box(&seed), &phi, &rat(1, 1_000_000), limits).unwrap())
    });
}

criterion_group!(benches, candidates, stretch_kernel, minimize);
criterion_main!(benches);
