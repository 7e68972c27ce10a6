//! Grid workloads on the full rayon pool versus a single-thread pool.
//! Under `--no-default-features` both variants run the sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use torus_blowup::blowup::{solve_pair_system, SearchParams};
use torus_blowup::elliptic::{EvalConfig, Weierstrass};
use torus_blowup::green::green_critical_points_with;
use torus_blowup::par;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let mode = if par::is_parallel() {
        "parallel"
    } else {
        "sequential"
    };
    let all = rayon::current_num_threads();
    [("full-pool", all), ("single-thread", 1)]
        .into_iter()
        .map(|(name, n)| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap();
            (format!("{mode}/{name}"), pool)
        })
        .collect()
}

fn weierstrass(tau: Complex64) -> Weierstrass {
    Weierstrass::new(tau, EvalConfig::default()).unwrap()
}

fn critical_points(c: &mut Criterion) {
    let w = weierstrass(Complex64::new(0.5, 3f64.sqrt() / 2.0));
    let mut group = c.benchmark_group("critical_points_grid_80");
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| pool.install(|| green_critical_points_with(&w, 80)))
        });
    }
    group.finish();
}

fn pair_search(c: &mut Criterion) {
    let w = weierstrass(Complex64::new(0.5, 1.3));
    let params = SearchParams {
        grid_n: 100,
        n_polish: 20,
        ..SearchParams::default()
    };
    let mut group = c.benchmark_group("pair_search_grid_100");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| pool.install(|| solve_pair_system(&w, &params).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, critical_points, pair_search);
criterion_main!(benches);
