use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use netclust::clustering::{one_median_fast, one_median_simple, p_center, p_median};
use netclust::corpus::{self, CorpusKind};
use netclust::{AlgoParams, NetIndex, PointId};

/// `n` ids spread over the first `span` points.
fn query(n: usize, span: usize) -> Vec<PointId> {
    (0..n)
        .map(|k| PointId(((k * 7919) % span) as u32))
        .collect()
}

fn build(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    g.sample_size(10);
    for kind in [CorpusKind::Line, CorpusKind::Grid2d] {
        for m in [1_000, 10_000] {
            let ps = corpus::generate(kind, m, 1).unwrap();
            g.bench_with_input(BenchmarkId::new(kind.to_string(), m), &ps, |b, ps| {
                b.iter(|| NetIndex::build(ps.clone(), 8).unwrap())
            });
        }
    }
    g.finish();
}

/// Query time at growing `m` with the query set fixed inside the first
/// 10^4 points.
fn scaling(c: &mut Criterion) {
    let q = query(256, 10_000);
    let params = AlgoParams::new(0.5).unwrap();
    for kind in [CorpusKind::Line, CorpusKind::Grid2d] {
        let mut g = c.benchmark_group(format!("scaling/{kind}"));
        for m in [10_000, 30_000, 100_000] {
            let idx = NetIndex::build(corpus::generate(kind, m, 1).unwrap(), 8).unwrap();
            g.bench_with_input(BenchmarkId::new("one_median_fast", m), &idx, |b, idx| {
                b.iter(|| one_median_fast(idx, black_box(&q), &params).unwrap())
            });
            g.bench_with_input(BenchmarkId::new("one_center", m), &idx, |b, idx| {
                b.iter(|| p_center(idx, black_box(&q), 1, 0.5).unwrap())
            });
        }
        g.finish();
    }
}

fn algorithms(c: &mut Criterion) {
    let idx = NetIndex::build(
        corpus::generate(CorpusKind::GaussianMixture, 5_000, 1).unwrap(),
        8,
    )
    .unwrap();
    let mut g = c.benchmark_group("algorithms");
    for n in [16, 64, 256] {
        let q = query(n, 5_000);
        for eps in [0.5, 0.25] {
            let params = AlgoParams::new(eps).unwrap();
            let id = format!("n{n}/eps{eps}");
            g.bench_function(BenchmarkId::new("one_median_simple", &id), |b| {
                b.iter(|| one_median_simple(&idx, black_box(&q), eps).unwrap())
            });
            g.bench_function(BenchmarkId::new("one_median_fast", &id), |b| {
                b.iter(|| one_median_fast(&idx, black_box(&q), &params).unwrap())
            });
            g.bench_function(BenchmarkId::new("p_center_2", &id), |b| {
                b.iter(|| p_center(&idx, black_box(&q), 2, eps).unwrap())
            });
        }
    }
    g.sample_size(10);
    let q = query(64, 5_000);
    let params = AlgoParams::new(0.5).unwrap();
    g.bench_function("p_median_2/n64/eps0.5", |b| {
        b.iter(|| p_median(&idx, black_box(&q), 2, &params).unwrap())
    });
    g.finish();
}

criterion_group!(benches, build, scaling, algorithms);
criterion_main!(benches);
