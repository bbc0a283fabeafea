//! Cost of the comparison tests, including the exact Wilcoxon path at its
//! size limit.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use bso_core::stats::friedman::friedman_with_posthoc;
use bso_core::stats::wilcoxon::wilcoxon_signed_rank;

fn bench_wilcoxon(c: &mut Criterion) {
    let mut group = c.benchmark_group("wilcoxon");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [10usize, 20, 50] {
        let a: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &(a, b), |bench, (a, b)| {
            bench.iter(|| wilcoxon_signed_rank(a, b).unwrap())
        });
    }
    group.finish();
}

fn bench_friedman(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let matrix: Vec<Vec<f64>> = (0..28)
        .map(|_| (0..5).map(|_| rng.random::<f64>()).collect())
        .collect();
    c.bench_function("friedman_28x5", |b| {
        b.iter(|| friedman_with_posthoc(&matrix, 0).unwrap())
    });
}

criterion_group!(benches, bench_wilcoxon, bench_friedman);
criterion_main!(benches);
