//! Colored Gauss-Seidel sweeps: thread pool against the sequential path.

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use strebel::corpus_gen;
use strebel::harmonic_solver::{sweep, sweep_sequential, SweepOrder};
use strebel::hopf::hopf_differential;

fn colored_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("colored_sweep");
    group.sample_size(20);
    for n in [8usize, 16, 32, 64] {
        let g = corpus_gen::square_torus(n, 1.0).unwrap();
        let f0 = g.leaf_space.projection.clone();
        let cap = Some(0.5 * f0.graph().min_edge_length());
        group.bench_with_input(BenchmarkId::new("parallel", n), &f0, |b, f0| {
            b.iter_batched(
                || f0.clone(),
                |mut f| sweep(&mut f, SweepOrder::Colored, cap).unwrap(),
                BatchSize::LargeInput,
            )
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &f0, |b, f0| {
            b.iter_batched(
                || f0.clone(),
                |mut f| sweep_sequential(&mut f, SweepOrder::Colored, cap).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn lshape_sweep(c: &mut Criterion) {
    let g = corpus_gen::l_shaped_surface(3).unwrap();
    let f0 = g.leaf_space.projection.clone();
    let cap = Some(0.5 * f0.graph().min_edge_length());
    let mut group = c.benchmark_group("lshape3_sweep");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter_batched(|| f0.clone(), |mut f| sweep(&mut f, SweepOrder::Colored, cap).unwrap(), BatchSize::LargeInput)
    });
    group.bench_function("sequential", |b| {
        b.iter_batched(
            || f0.clone(),
            |mut f| sweep_sequential(&mut f, SweepOrder::Colored, cap).unwrap(),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

fn hopf(c: &mut Criterion) {
    let g = corpus_gen::l_shaped_surface(3).unwrap();
    c.bench_function("hopf_differential/lshape3", |b| b.iter(|| hopf_differential(&g.oracle_map)));
}

criterion_group!(benches, colored_sweep, lshape_sweep, hopf);
criterion_main!(benches);
