use bea_bench::quick_config;
use bea_core::{run_monte_carlo, run_sweep, SweepAxis};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn montecarlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("montecarlo");
    g.sample_size(20);
    let cfg = quick_config(10);
    g.bench_function("10 realizations", |b| {
        b.iter(|| run_monte_carlo(black_box(&cfg)).unwrap())
    });
    g.bench_function("node count sweep", |b| {
        b.iter(|| run_sweep(black_box(&cfg), SweepAxis::NodeCount, &[40.0, 60.0, 80.0]).unwrap())
    });
    g.finish();
}

criterion_group!(benches, montecarlo);
criterion_main!(benches);
