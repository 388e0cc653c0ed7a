use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use uscsim::dynamics::{evolve, SweepShape};
use uscsim::nonclassical::{q_function, wigner_function, PhaseGrid};
use uscsim::spectrum::{level_curves, linspace, lowest_energies, solve, EnergyUnit};
use uscsim::{SweepSchedule, SystemParams, TruncationOptions};
use uscsim_bench::{cat_oscillator, ground, supercritical, truncation};

fn eigen(c: &mut Criterion) {
    let p = supercritical();
    let mut g = c.benchmark_group("eigen");
    for n in [64, 128, 256] {
        g.bench_with_input(BenchmarkId::new("parity_blocks", n), &n, |b, &n| {
            b.iter(|| lowest_energies(black_box(&p), n, 10).unwrap())
        });
    }
    let biased = p.with_eps(0.5);
    for n in [64, 128] {
        g.bench_with_input(BenchmarkId::new("dense", n), &n, |b, &n| {
            b.iter(|| solve(black_box(&biased), &truncation(n), 10).unwrap())
        });
    }
    g.finish();
}

fn scan(c: &mut Criterion) {
    let p = SystemParams::new(1.0, 0.0, 0.0);
    let grid = linspace(0.0, 2.5, 51);
    c.bench_function("level_curves_51", |b| {
        b.iter(|| level_curves(&p, black_box(&grid), 10, EnergyUnit::Oscillator, TruncationOptions::default()).unwrap())
    });
}

fn phase_space(c: &mut Criterion) {
    let rho = cat_oscillator(96);
    let grid = PhaseGrid::square(6.0, 101);
    c.bench_function("wigner_101x101", |b| b.iter(|| wigner_function(black_box(&rho), &grid).unwrap()));
    c.bench_function("q_101x101", |b| b.iter(|| q_function(black_box(&rho), &grid).unwrap()));
}

fn dynamics(c: &mut Criterion) {
    let psi = ground(96);
    let sched =
        SweepSchedule { eps_start: 0.0, eps_end: 20.0, duration: 5.0, shape: SweepShape::Smoothstep, steps: 200 };
    c.bench_function("evolve_200_steps", |b| b.iter(|| evolve(black_box(&psi), &supercritical(), &sched).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = eigen, scan, phase_space, dynamics
}
criterion_main!(benches);
