//! Grid scans on the rayon pool against the same scans pinned to one thread.
//!
//! Build with `--no-default-features` to time the sequential fallback of
//! `par::map_range` itself.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lph::jac::surface;
use lph::mcp::{mcp_inequality_scan, GridSpec};
use lph::polygonal::{monte_carlo_homothety, H1Box};
use lph::Exponent;

fn single_thread() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()
}

fn bench_surface(c: &mut Criterion) {
    let pool = single_thread();
    let mut g = c.benchmark_group("jacobian_surface");
    for &p in &[1.5, 3.0] {
        let e = Exponent::new(p).unwrap();
        g.bench_with_input(BenchmarkId::new("pool", p), &e, |b, e| b.iter(|| surface(black_box(e), 60, 60).unwrap()));
        g.bench_with_input(BenchmarkId::new("one_thread", p), &e, |b, e| {
            b.iter(|| pool.install(|| surface(black_box(e), 60, 60).unwrap()))
        });
    }
    g.finish();
}

fn bench_mcp_scan(c: &mut Criterion) {
    let pool = single_thread();
    let e = Exponent::new(2.0).unwrap();
    let grid = GridSpec { n_theta: 40, n_w: 40, n_t: 10, ..GridSpec::default() };
    let mut g = c.benchmark_group("mcp_scan");
    g.sample_size(10);
    g.bench_function("pool", |b| b.iter(|| mcp_inequality_scan(&e, 5.0, black_box(&grid)).unwrap()));
    g.bench_function("one_thread", |b| b.iter(|| pool.install(|| mcp_inequality_scan(&e, 5.0, black_box(&grid)).unwrap())));
    g.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let pool = single_thread();
    let omega = H1Box::new([1.0, 2.0], [1.0, 2.0], [-0.1, 0.1]).unwrap();
    let mut g = c.benchmark_group("l1_monte_carlo");
    g.sample_size(10);
    g.bench_function("pool", |b| b.iter(|| monte_carlo_homothety(&omega, 0.1, 1 << 18, black_box(1)).unwrap()));
    g.bench_function("one_thread", |b| {
        b.iter(|| pool.install(|| monte_carlo_homothety(&omega, 0.1, 1 << 18, black_box(1)).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, bench_surface, bench_mcp_scan, bench_monte_carlo);
criterion_main!(benches);
