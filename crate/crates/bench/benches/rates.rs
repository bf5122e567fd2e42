use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use molion::kinetics::{evolve, sweep};
use molion::units::Unit;
use molion::{oracle, rates, EvolveOptions};
use molion_bench::sodium;

fn closed_form(c: &mut Criterion) {
    let (cond, level, mu) = sodium(0.0);
    c.bench_function("capture_rate", |b| {
        b.iter(|| rates::capture_rate(black_box(&cond), black_box(&level), mu).unwrap())
    });
}

fn oracles(c: &mut Criterion) {
    let (cond, level, mu) = sodium(0.0);
    c.bench_function("capture_rate_quadrature", |b| {
        b.iter(|| oracle::capture_rate_quadrature(black_box(&cond), level.size(), mu).unwrap())
    });
    c.bench_function("q0_root", |b| {
        b.iter(|| oracle::q0_root(black_box(&cond), level.binding()).unwrap())
    });
}

fn dynamics(c: &mut Criterion) {
    let (cond, level, mu) = sodium(100.0);
    let opts = EvolveOptions::new(Unit::Second.to_internal(1.0));
    c.bench_function("evolve_to_equilibrium", |b| {
        b.iter(|| evolve(black_box(&cond), &level, mu, &opts).unwrap())
    });
    let grid = sweep::log_grid(1e-3, 1e3, 201).unwrap();
    c.bench_function("sweep_201", |b| {
        b.iter(|| sweep::sweep_xi(&cond, level.size(), mu, black_box(&grid), sweep::Slice::Density).unwrap())
    });
}

criterion_group!(benches, closed_form, oracles, dynamics);
criterion_main!(benches);
