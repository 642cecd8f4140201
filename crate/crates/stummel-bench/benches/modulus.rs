//! Hot-path benchmarks: single closed-form modulus evaluations, full curve
//! sweeps, and the bump-sum classification pipeline.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use stummel_core::{classify, eta, modulus_curve, RadialGrid, ScaleFunction, TestFunction};

fn sqrt_scale() -> ScaleFunction {
    ScaleFunction::pure_power(0.5)
}

fn eta_single_radius(c: &mut Criterion) {
    let psi = sqrt_scale();
    let f = TestFunction::log_decay_member(1, 1.0, &psi).unwrap();
    c.bench_function("eta log-decay at one radius", |b| {
        b.iter(|| eta(black_box(&f), 1.0, &psi, black_box(1e-7)).unwrap())
    });
}

fn curve_over_default_grid(c: &mut Criterion) {
    let psi = sqrt_scale();
    let f = TestFunction::radial_power(1, 0.25);
    let grid = RadialGrid::default_grid();
    c.bench_function("modulus curve, 48 radii", |b| {
        b.iter(|| modulus_curve(black_box(&f), 1.0, &psi, &grid).unwrap())
    });
}

fn classify_bump_sum(c: &mut Criterion) {
    let psi = sqrt_scale();
    let f = TestFunction::bump_sum(1, 0.5, 8, 1.0);
    let grid = RadialGrid::logspace(1e-8, 1e2, 16).unwrap();
    let mut group = c.benchmark_group("classification");
    group.sample_size(10);
    group.bench_function("bump sum, 8 bumps, 16 radii", |b| {
        b.iter(|| classify(black_box(&f), 1.0, &psi, &grid).unwrap())
    });
    group.finish();
}

criterion_group!(benches, eta_single_radius, curve_over_default_grid, classify_bump_sum);
criterion_main!(benches);
