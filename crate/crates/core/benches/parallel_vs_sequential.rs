use std::hint::black_box;

use adsearch_core::spectrum::{uniform_grid, Solver};
use adsearch_core::{
    instantaneous_spectrum, random_database, run_scaling_experiment, Algorithm, Exec, SearchHamiltonian, SearchTarget,
    SweepConfig,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn spectrum_grid(c: &mut Criterion) {
    let db = random_database(9, 1).unwrap();
    let h = SearchHamiltonian::bit_sum(&db, SearchTarget::new(77, 9).unwrap(), 0.5).unwrap();
    let grid = uniform_grid(64);
    let mut group = c.benchmark_group("spectrum_grid_n9");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| instantaneous_spectrum(black_box(&h), &grid, 2, Solver::Auto, exec).unwrap())
        });
    }
    group.finish();
}

fn scaling_sweep(c: &mut Criterion) {
    let config = SweepConfig {
        n_values: vec![5, 6, 7],
        instances_per_n: 4,
        algorithms: vec![Algorithm::BitSum],
        ..SweepConfig::default()
    };
    let mut group = c.benchmark_group("scaling_sweep_n5_7");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_scaling_experiment(black_box(&config), exec, |_| {}).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spectrum_grid, scaling_sweep);
criterion_main!(benches);
