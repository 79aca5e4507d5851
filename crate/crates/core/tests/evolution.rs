mod support;

use adsearch_core::evolution::{make_gap_adaptive_schedule, propagate_fixed};
use adsearch_core::spectrum::{uniform_grid, Solver};
use adsearch_core::{
    evolve, instantaneous_spectrum, random_database, Database, EvolutionOptions, Exec, InitialForm, Schedule,
    SearchHamiltonian, SearchTarget,
};
use num_complex::Complex64;
use support::{final_probabilities, hamming_problem, marked_problem, propagate_exact, DenseModel};

fn bit_sum_instance(n: u32, seed: u64) -> (Database, SearchTarget) {
    let db = random_database(n, seed).unwrap();
    let target = SearchTarget::new((seed.wrapping_mul(2654435761) % (1 << n)) as u32, n).unwrap();
    (db, target)
}

fn opts(tol: f64) -> EvolutionOptions {
    EvolutionOptions {
        tol,
        ..EvolutionOptions::default()
    }
}

#[test]
fn matches_dense_oracle_on_random_instances() {
    for seed in 0..10u64 {
        let n = 2 + (seed % 4) as u32;
        let (db, target) = bit_sum_instance(n, seed);
        let total_time = [3.0, 7.5, 15.0][seed as usize % 3];
        let h = SearchHamiltonian::bit_sum(&db, target, 0.5).unwrap();
        let result = evolve(&h, &Schedule::linear(total_time).unwrap(), &opts(1e-8)).unwrap();
        let model = DenseModel {
            n,
            problem: hamming_problem(db.values(), target.value()),
            g: 0.5,
            projector_driver: false,
        };
        let expected = final_probabilities(&model, total_time, 2000);
        let got = result.final_state.probabilities();
        let worst = got
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "seed {seed} n {n}: deviation {worst:e}");
        assert!(result.norm_drift <= 1e-9, "seed {seed}: drift {:e}", result.norm_drift);
    }
}

#[test]
fn marked_state_search_matches_oracle() {
    let h = SearchHamiltonian::msas(3, 5, InitialForm::UniformProjector, 0.5).unwrap();
    let result = evolve(&h, &Schedule::linear(12.0).unwrap(), &opts(1e-8)).unwrap();
    let model = DenseModel {
        n: 3,
        problem: marked_problem(3, 5),
        g: 0.5,
        projector_driver: true,
    };
    let expected = final_probabilities(&model, 12.0, 2000);
    for (a, b) in result.final_state.probabilities().iter().zip(&expected) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn norm_drift_stays_below_limit_for_long_runs() {
    let (db, target) = bit_sum_instance(4, 77);
    let h = SearchHamiltonian::bit_sum(&db, target, 0.5).unwrap();
    for total_time in [1.0, 50.0, 400.0] {
        let result = evolve(&h, &Schedule::linear(total_time).unwrap(), &opts(1e-8)).unwrap();
        assert!(
            result.norm_drift <= 1e-9,
            "T = {total_time}: drift {:e}",
            result.norm_drift
        );
    }
}

#[test]
fn fixed_step_order_is_four_at_frozen_s() {
    let db = Database::new(3, vec![6, 3, 5, 0, 4, 1, 7, 2]).unwrap();
    let target = SearchTarget::new(5, 3).unwrap();
    let h = SearchHamiltonian::bit_sum(&db, target, 0.5).unwrap();
    let psi0 = h.initial_state();
    let total_time = 4.0;
    let model = DenseModel {
        n: 3,
        problem: hamming_problem(db.values(), 5),
        g: 0.5,
        projector_driver: false,
    };
    let exact = propagate_exact(&model.matrix(0.5), psi0.amplitudes(), total_time);
    let error = |steps: usize| {
        let psi = propagate_fixed(&h, |_| 0.5, &psi0, total_time, steps).unwrap();
        psi.amplitudes()
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    let errors: Vec<f64> = [20, 40, 80, 160].iter().map(|&k| error(k)).collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 4.0).abs() <= 0.5, "observed order {order} from {errors:?}");
    }
}

#[test]
fn longer_runs_do_not_lose_probability() {
    let (db, target) = bit_sum_instance(4, 3);
    let h = SearchHamiltonian::bit_sum(&db, target, 0.5).unwrap();
    let p = |t: f64| {
        evolve(&h, &Schedule::linear(t).unwrap(), &opts(1e-8))
            .unwrap()
            .success_probability
    };
    let mut t = 10.0;
    while t <= 320.0 {
        let (short, long) = (p(t), p(2.0 * t));
        assert!(long >= short - 0.02, "P({}) = {long} < P({t}) = {short}", 2.0 * t);
        t *= 2.0;
    }
}

#[test]
fn constant_energy_shift_is_a_global_phase() {
    let (db, target) = bit_sum_instance(4, 11);
    let h = SearchHamiltonian::bit_sum(&db, target, 0.5).unwrap();
    let schedule = Schedule::linear(25.0).unwrap();
    let base = evolve(&h, &schedule, &opts(1e-10)).unwrap().final_state.probabilities();
    for c in [-3.0, 0.7, 10.0] {
        let shifted = evolve(&h.shifted(c).unwrap(), &schedule, &opts(1e-10)).unwrap();
        let worst = shifted
            .final_state
            .probabilities()
            .iter()
            .zip(&base)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "shift {c}: {worst:e}");
    }
}

#[test]
fn gap_adaptive_rate_follows_squared_gap() {
    let h = SearchHamiltonian::msas(3, 2, InitialForm::UniformProjector, 0.5).unwrap();
    let grid = uniform_grid(101);
    let profile = instantaneous_spectrum(&h, &grid, 2, Solver::Dense, Exec::Sequential).unwrap();
    let gaps = profile.gaps();
    let schedule = make_gap_adaptive_schedule(&grid, &gaps, 0.5, 3.0).unwrap();
    let model = DenseModel {
        n: 3,
        problem: marked_problem(3, 2),
        g: 0.5,
        projector_driver: true,
    };
    let gap = |s: f64| {
        let e = model.spectrum(s);
        e[1] - e[0]
    };
    for (a, b) in [(0.1, 0.5), (0.3, 0.7), (0.5, 0.9)] {
        let rate_ratio = schedule.rate_at_s(a) / schedule.rate_at_s(b);
        let gap_ratio = (gap(a) / gap(b)).powi(2);
        assert!(
            (rate_ratio / gap_ratio - 1.0).abs() < 1e-9,
            "s = {a}, {b}: {rate_ratio} vs {gap_ratio}"
        );
    }
    // The schedule covers [0, 1] monotonically.
    let total = schedule.total_time();
    let samples: Vec<f64> = (0..=50).map(|k| schedule.s_at(total * k as f64 / 50.0)).collect();
    assert_eq!(samples[0], 0.0);
    assert!((samples[50] - 1.0).abs() < 1e-12);
    assert!(samples.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn gap_adaptive_run_beats_linear_at_equal_time() {
    let h = SearchHamiltonian::msas(4, 9, InitialForm::UniformProjector, 0.5).unwrap();
    let grid = uniform_grid(201);
    let gaps = instantaneous_spectrum(&h, &grid, 2, Solver::Dense, Exec::Sequential)
        .unwrap()
        .gaps();
    let natural = make_gap_adaptive_schedule(&grid, &gaps, 1.0, 1.0).unwrap().total_time();
    let total_time = 20.0;
    let adaptive = make_gap_adaptive_schedule(&grid, &gaps, 1.0, total_time / natural).unwrap();
    assert!((adaptive.total_time() - total_time).abs() < 1e-9);
    let p_adaptive = evolve(&h, &adaptive, &opts(1e-8)).unwrap().success_probability;
    let p_linear = evolve(&h, &Schedule::linear(total_time).unwrap(), &opts(1e-8))
        .unwrap()
        .success_probability;
    assert!(p_adaptive > p_linear, "adaptive {p_adaptive} vs linear {p_linear}");
}

#[test]
fn initial_state_is_driver_ground_state() {
    for n in 1..=5 {
        let values: Vec<u32> = (0..1u32 << n).collect();
        let db = Database::new(n, values.clone()).unwrap();
        let h = SearchHamiltonian::bit_sum(&db, SearchTarget::new(0, n).unwrap(), 0.5).unwrap();
        let model = DenseModel {
            n,
            problem: hamming_problem(&values, 0),
            g: 0.5,
            projector_driver: false,
        };
        let reference = model.initial_state();
        let overlap: Complex64 = h
            .initial_state()
            .amplitudes()
            .iter()
            .zip(&reference)
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-12, "n = {n}: overlap {overlap}");
    }
}
