//! Time-dependent Schrödinger integration, `i dψ/dt = H(s(t)) ψ` with ħ = 1.
//!
//! The integrator is the Runge-Kutta-Fehlberg 4(5) embedded pair. The
//! fourth-order solution is propagated and the difference to the fifth-order
//! one is the local error estimate (max-norm over amplitudes). Steps are
//! controlled per unit time: a step of length `dt` is accepted when its error
//! estimate is at most `tol · dt / (10 T)`, so the local errors summed over
//! the whole run stay below `tol / 10`. The state is never renormalised: the norm drift
//! is reported as an accuracy witness.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SearchHamiltonian;

/// Norm drift above which a result is flagged inaccurate.
pub const NORM_DRIFT_LIMIT: f64 = 1e-9;

/// Complex amplitude vector of length `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    amplitudes: Vec<Complex64>,
}

impl WaveState {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        WaveState { amplitudes }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: u32, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::zero(); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        WaveState { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    /// Occupation probabilities of all basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }
}

/// Interpolation schedule `s(t)` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `s(t) = t / T`.
    Linear { total_time: f64 },
    /// Rate `ds/dt ∝ Δ(s)^2`, see [`make_gap_adaptive_schedule`].
    GapAdaptive(GapAdaptive),
}

/// Tabulated gap-adaptive schedule. The gap is interpolated linearly between
/// knots, which makes both `t(s)` and its inverse closed-form per segment.
#[derive(Debug, Clone, PartialEq)]
pub struct GapAdaptive {
    s: Vec<f64>,
    gap: Vec<f64>,
    /// `t(s_k)`, with `t(1) = total_time`.
    t: Vec<f64>,
    epsilon: f64,
    time_scale: f64,
}

impl Schedule {
    pub fn linear(total_time: f64) -> Result<Self> {
        check_time(total_time)?;
        Ok(Schedule::Linear { total_time })
    }

    pub fn total_time(&self) -> f64 {
        match self {
            Schedule::Linear { total_time } => *total_time,
            Schedule::GapAdaptive(g) => *g.t.last().expect("non-empty table"),
        }
    }

    /// `s(t)`, clamped to `[0, 1]`.
    pub fn s_at(&self, t: f64) -> f64 {
        match self {
            Schedule::Linear { total_time } => (t / total_time).clamp(0.0, 1.0),
            Schedule::GapAdaptive(g) => g.s_at(t),
        }
    }

    /// `ds/dt` at interpolation parameter `s`.
    pub fn rate_at_s(&self, s: f64) -> f64 {
        match self {
            Schedule::Linear { total_time } => 1.0 / total_time,
            Schedule::GapAdaptive(g) => {
                let gap = g.gap_at(s);
                g.epsilon * gap * gap / g.time_scale
            }
        }
    }
}

impl GapAdaptive {
    fn segment(&self, s: f64) -> usize {
        match self.s.partition_point(|&x| x <= s) {
            0 => 0,
            k => (k - 1).min(self.s.len() - 2),
        }
    }

    fn gap_at(&self, s: f64) -> f64 {
        let k = self.segment(s.clamp(0.0, 1.0));
        let (s0, s1) = (self.s[k], self.s[k + 1]);
        let (d0, d1) = (self.gap[k], self.gap[k + 1]);
        d0 + (d1 - d0) * (s - s0) / (s1 - s0)
    }

    fn s_at(&self, t: f64) -> f64 {
        let total = *self.t.last().expect("non-empty table");
        if t <= 0.0 {
            return 0.0;
        }
        if t >= total {
            return 1.0;
        }
        let k = match self.t.partition_point(|&x| x <= t) {
            0 => 0,
            k => (k - 1).min(self.t.len() - 2),
        };
        let (s0, s1) = (self.s[k], self.s[k + 1]);
        let (d0, d1) = (self.gap[k], self.gap[k + 1]);
        let slope = (d1 - d0) / (s1 - s0);
        // Within the segment, τ(s) - τ_k = x / (ε d0 (d0 + slope x)) with x = s - s0.
        let r = (t - self.t[k]) / self.time_scale * self.epsilon;
        let x = r * d0 * d0 / (1.0 - r * d0 * slope);
        (s0 + x).clamp(s0, s1)
    }
}

fn check_time(total_time: f64) -> Result<()> {
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(Error::bounds("T", total_time, "(0, inf)"));
    }
    Ok(())
}

/// Builds a schedule whose rate follows `ds/dt = ε Δ(s)^2 / time_scale`, so the
/// evolution slows where the gap closes. The total time is `time_scale` times
/// the natural duration `∫ ds / (ε Δ(s)^2)`.
///
/// `s_grid` must run from 0 to 1 strictly increasing; `gaps` must be positive.
pub fn make_gap_adaptive_schedule(s_grid: &[f64], gaps: &[f64], epsilon: f64, time_scale: f64) -> Result<Schedule> {
    if s_grid.len() != gaps.len() || s_grid.len() < 2 {
        return Err(Error::Domain(format!(
            "gap profile needs matching grids of length >= 2 (got {} and {})",
            s_grid.len(),
            gaps.len()
        )));
    }
    if s_grid[0] != 0.0 || *s_grid.last().unwrap() != 1.0 || s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "gap profile grid must increase strictly from 0 to 1".into(),
        ));
    }
    if let Some(i) = gaps.iter().position(|&d| !(d.is_finite() && d > 0.0)) {
        return Err(Error::Domain(format!(
            "gap {} at s = {} is not positive",
            gaps[i], s_grid[i]
        )));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::bounds("epsilon", epsilon, "(0, inf)"));
    }
    check_time(time_scale)?;
    let mut t = Vec::with_capacity(s_grid.len());
    t.push(0.0);
    for k in 0..s_grid.len() - 1 {
        // Exact integral of 1/Δ^2 for linear Δ: (s1 - s0) / (d0 d1).
        let dt = (s_grid[k + 1] - s_grid[k]) / (gaps[k] * gaps[k + 1]) / epsilon * time_scale;
        t.push(t[k] + dt);
    }
    Ok(Schedule::GapAdaptive(GapAdaptive {
        s: s_grid.to_vec(),
        gap: gaps.to_vec(),
        t,
        epsilon,
        time_scale,
    }))
}

/// Fraction of `tol` the accumulated local error may use. The headroom keeps
/// the norm drift below `tol / 10` even for runs only a few steps long.
const ERROR_SHARE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionOptions {
    /// Error budget for the whole run. A step of length `dt` may contribute a
    /// local error (max-norm of the embedded difference) of `tol · dt / (10 T)`.
    pub tol: f64,
    /// Number of evenly spaced trajectory samples on `[0, T]` (0 disables).
    pub sample_count: usize,
    /// Hard cap on attempted steps.
    pub max_steps: u64,
}

impl Default for EvolutionOptions {
    fn default() -> Self {
        EvolutionOptions {
            tol: 1e-8,
            sample_count: 0,
            max_steps: 200_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub s: f64,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub final_state: WaveState,
    pub success_probability: f64,
    /// Ground state of the problem part (argmin of its diagonal).
    pub solution_index: usize,
    /// `Some(energy)` when the problem ground energy is nonzero, i.e. the
    /// target is absent and the index is only the closest match. For the
    /// bit-sum Hamiltonian this is the residual Hamming distance.
    pub best_match: Option<f64>,
    pub trajectory: Option<Vec<TrajectorySample>>,
    /// Largest `|‖ψ(t)‖ - 1|` seen over all accepted steps.
    pub norm_drift: f64,
    pub steps_taken: u64,
    pub rejected_steps: u64,
    pub total_time: f64,
}

impl EvolutionResult {
    pub fn is_accurate(&self) -> bool {
        self.norm_drift < NORM_DRIFT_LIMIT
    }
}

/// `|⟨solution|ψ(T)⟩|^2`.
pub fn success_probability(result: &EvolutionResult, solution_index: usize) -> f64 {
    result.final_state.probability(solution_index)
}

/// Machine-readable summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSummary {
    pub n: u32,
    pub target: Option<u32>,
    pub solution_index: usize,
    #[serde(rename = "T")]
    pub total_time: f64,
    pub success_probability: f64,
    pub norm_drift: f64,
    pub steps_taken: u64,
}

impl ResultSummary {
    pub fn new(n: u32, target: Option<u32>, result: &EvolutionResult) -> Self {
        ResultSummary {
            n,
            target,
            solution_index: result.solution_index,
            total_time: result.total_time,
            success_probability: result.success_probability,
            norm_drift: result.norm_drift,
            steps_taken: result.steps_taken,
        }
    }
}

// Runge-Kutta-Fehlberg 4(5) tableau.
const C: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];
const A: [[f64; 5]; 6] = [
    [0.0; 5],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const B4: [f64; 5] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2];
/// `b5 - b4`.
const E: [f64; 6] = [
    1.0 / 360.0,
    0.0,
    -128.0 / 4275.0,
    -2197.0 / 75240.0,
    1.0 / 50.0,
    2.0 / 55.0,
];

struct Stepper<'a> {
    h: &'a SearchHamiltonian,
    k: [Vec<Complex64>; 6],
    stage: Vec<Complex64>,
    next: Vec<Complex64>,
}

impl<'a> Stepper<'a> {
    fn new(h: &'a SearchHamiltonian) -> Self {
        let dim = h.dim();
        let zero = || vec![Complex64::zero(); dim];
        Stepper {
            h,
            k: [zero(), zero(), zero(), zero(), zero(), zero()],
            stage: zero(),
            next: zero(),
        }
    }

    /// `k = -i H(s) ψ`.
    fn derivative(h: &SearchHamiltonian, s: f64, psi: &[Complex64], k: &mut [Complex64]) {
        h.apply_unchecked(s, psi, k);
        for z in k.iter_mut() {
            *z = Complex64::new(z.im, -z.re);
        }
    }

    /// Computes the stages for a step of size `dt` from `(t, ψ)`, writes the
    /// 4th-order update into `self.next` and returns the error estimate when
    /// `with_error` is set.
    #[allow(clippy::needless_range_loop)]
    fn step(&mut self, s_of: &impl Fn(f64) -> f64, t: f64, dt: f64, psi: &[Complex64], with_error: bool) -> f64 {
        let stages = if with_error { 6 } else { 5 };
        for i in 0..stages {
            if i == 0 {
                self.stage.copy_from_slice(psi);
            } else {
                for (x, out) in self.stage.iter_mut().enumerate() {
                    let mut acc = psi[x];
                    for j in 0..i {
                        let a = A[i][j];
                        if a != 0.0 {
                            acc += self.k[j][x] * (a * dt);
                        }
                    }
                    *out = acc;
                }
            }
            let s = s_of(t + C[i] * dt);
            Self::derivative(self.h, s, &self.stage, &mut self.k[i]);
        }
        let mut err = 0.0f64;
        for x in 0..psi.len() {
            let mut acc = psi[x];
            for (j, &b) in B4.iter().enumerate() {
                if b != 0.0 {
                    acc += self.k[j][x] * (b * dt);
                }
            }
            self.next[x] = acc;
            if with_error {
                let mut e = Complex64::zero();
                for (j, &c) in E.iter().enumerate() {
                    if c != 0.0 {
                        e += self.k[j][x] * c;
                    }
                }
                err = err.max((e * dt).norm());
            }
        }
        err
    }
}

fn norm_of(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Integrates from the driver ground state over the whole schedule with
/// adaptive steps.
pub fn evolve(h: &SearchHamiltonian, schedule: &Schedule, opts: &EvolutionOptions) -> Result<EvolutionResult> {
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::bounds("tol", opts.tol, "(0, inf)"));
    }
    let total_time = schedule.total_time();
    check_time(total_time)?;
    let s_of = |t: f64| schedule.s_at(t);

    let mut psi = h.initial_state().amplitudes().to_vec();
    let mut stepper = Stepper::new(h);

    let samples: Vec<f64> = match opts.sample_count {
        0 => Vec::new(),
        1 => vec![total_time],
        c => (0..c).map(|k| total_time * k as f64 / (c - 1) as f64).collect(),
    };
    let mut trajectory = Vec::with_capacity(samples.len());
    let mut next_sample = 0;
    let record = |t: f64, psi: &[Complex64], trajectory: &mut Vec<TrajectorySample>| {
        trajectory.push(TrajectorySample {
            t,
            s: schedule.s_at(t),
            probabilities: psi.iter().map(Complex64::norm_sqr).collect(),
        });
    };
    while next_sample < samples.len() && samples[next_sample] <= 0.0 {
        record(0.0, &psi, &mut trajectory);
        next_sample += 1;
    }

    // Initial step from the local time scale 1/‖H‖ and the tolerance.
    let mut dt = (0.1 / h.norm_bound().max(1e-12)).min(total_time);
    let min_step = total_time * 1e-14;
    let mut t = 0.0;
    let mut steps_taken = 0u64;
    let mut rejected = 0u64;
    let mut norm_drift = 0.0f64;

    while t < total_time {
        if steps_taken + rejected >= opts.max_steps {
            return Err(Error::Integration {
                last_good_t: t,
                reason: format!("step budget of {} exhausted", opts.max_steps),
            });
        }
        let stop = samples.get(next_sample).copied().unwrap_or(total_time).min(total_time);
        let hits_stop = t + dt >= stop;
        let this_dt = if hits_stop { stop - t } else { dt };
        let err = stepper.step(&s_of, t, this_dt, &psi, true);
        if !err.is_finite() {
            return Err(Error::Integration {
                last_good_t: t,
                reason: "non-finite error estimate".into(),
            });
        }
        let allowed = ERROR_SHARE * opts.tol * this_dt / total_time;
        if err <= allowed {
            std::mem::swap(&mut psi, &mut stepper.next);
            t = if hits_stop { stop } else { t + this_dt };
            steps_taken += 1;
            norm_drift = norm_drift.max((norm_of(&psi) - 1.0).abs());
            if hits_stop && next_sample < samples.len() && stop == samples[next_sample] {
                record(t, &psi, &mut trajectory);
                next_sample += 1;
            }
        } else {
            rejected += 1;
        }
        // err ~ dt^5 against an allowance ~ dt.
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (allowed / err).powf(0.25)).clamp(0.2, 5.0)
        };
        // Do not let a short step forced by a sample stop shrink the next one.
        dt = if err <= allowed && hits_stop {
            dt.max(this_dt * factor)
        } else {
            this_dt * factor
        };
        if dt < min_step && t < total_time {
            return Err(Error::Integration {
                last_good_t: t,
                reason: format!("step size {dt:e} underflowed for tol {:e}", opts.tol),
            });
        }
    }

    let final_state = WaveState::from_amplitudes(psi);
    let (solution_index, ground_energy) = h.problem().argmin();
    Ok(EvolutionResult {
        success_probability: final_state.probability(solution_index),
        best_match: (ground_energy != 0.0).then_some(ground_energy),
        final_state,
        solution_index,
        trajectory: (opts.sample_count > 0).then_some(trajectory),
        norm_drift,
        steps_taken,
        rejected_steps: rejected,
        total_time,
    })
}

/// Fixed-step propagation with the 4th-order member of the pair, for an
/// arbitrary `s(t)` and start state. Used to measure convergence order.
pub fn propagate_fixed(
    h: &SearchHamiltonian,
    s_of: impl Fn(f64) -> f64,
    psi0: &WaveState,
    total_time: f64,
    steps: usize,
) -> Result<WaveState> {
    if psi0.dim() != h.dim() {
        return Err(Error::Dimension {
            expected: h.dim(),
            found: psi0.dim(),
        });
    }
    check_time(total_time)?;
    if steps == 0 {
        return Err(Error::bounds("steps", 0, ">= 1"));
    }
    let mut psi = psi0.amplitudes().to_vec();
    let mut stepper = Stepper::new(h);
    let dt = total_time / steps as f64;
    for k in 0..steps {
        stepper.step(&s_of, k as f64 * dt, dt, &psi, false);
        std::mem::swap(&mut psi, &mut stepper.next);
    }
    Ok(WaveState::from_amplitudes(psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::{Database, SearchTarget};

    fn worked_hamiltonian() -> SearchHamiltonian {
        let db = Database::new(3, vec![6, 3, 5, 0, 4, 1, 7, 2]).unwrap();
        SearchHamiltonian::bit_sum(&db, SearchTarget::new(5, 3).unwrap(), 0.5).unwrap()
    }

    #[test]
    fn tiny_time_leaves_state_unchanged() {
        let h = worked_hamiltonian();
        let r = evolve(&h, &Schedule::linear(1e-3).unwrap(), &EvolutionOptions::default()).unwrap();
        assert_eq!(r.solution_index, 2);
        assert!((r.success_probability - 0.125).abs() < 1e-4);
        assert!(r.best_match.is_none());
    }

    #[test]
    fn long_run_finds_solution() {
        let h = worked_hamiltonian();
        let r = evolve(&h, &Schedule::linear(100.0).unwrap(), &EvolutionOptions::default()).unwrap();
        let probs = r.final_state.probabilities();
        let argmax = (0..8).max_by(|&a, &b| probs[a].total_cmp(&probs[b])).unwrap();
        assert_eq!(argmax, 2);
        assert!(r.success_probability > 0.9);
        assert_eq!(success_probability(&r, 2), r.success_probability);
    }

    #[test]
    fn success_probability_of_simple_states() {
        let basis = WaveState::basis(3, 5);
        assert_eq!(basis.probability(5), 1.0);
        let uniform = crate::hamiltonian::initial_state(3, crate::hamiltonian::InitialForm::UniformProjector);
        assert!((uniform.probability(3) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn trajectory_samples_are_uniform_in_t() {
        let h = worked_hamiltonian();
        let opts = EvolutionOptions {
            sample_count: 11,
            ..Default::default()
        };
        let r = evolve(&h, &Schedule::linear(20.0).unwrap(), &opts).unwrap();
        let traj = r.trajectory.unwrap();
        assert_eq!(traj.len(), 11);
        for (k, sample) in traj.iter().enumerate() {
            assert!((sample.t - 2.0 * k as f64).abs() < 1e-12);
            assert!((sample.s - sample.t / 20.0).abs() < 1e-12);
            let total: f64 = sample.probabilities.iter().sum();
            assert!((total - 1.0).abs() < 1e-8);
        }
        assert_eq!(traj.last().unwrap().probabilities, r.final_state.probabilities());
    }

    #[test]
    fn absent_target_is_flagged_best_match() {
        use crate::hamiltonian::{DiagonalOperator, InitialForm};
        // Hamming distances to a target no entry holds: the closest index is 1.
        let problem = DiagonalOperator::new(vec![2.0, 1.0, 3.0, 2.0]).unwrap();
        let h = SearchHamiltonian::custom(problem, 0.5, InitialForm::TransverseField).unwrap();
        let r = evolve(&h, &Schedule::linear(1.0).unwrap(), &EvolutionOptions::default()).unwrap();
        assert_eq!(r.best_match, Some(1.0));
        assert_eq!(r.solution_index, 1);
        let exact = evolve(
            &worked_hamiltonian(),
            &Schedule::linear(1.0).unwrap(),
            &EvolutionOptions::default(),
        )
        .unwrap();
        assert!(exact.best_match.is_none());
    }

    #[test]
    fn rejects_bad_options() {
        let h = worked_hamiltonian();
        let bad_tol = EvolutionOptions {
            tol: 0.0,
            ..Default::default()
        };
        assert!(evolve(&h, &Schedule::linear(1.0).unwrap(), &bad_tol).is_err());
        assert!(Schedule::linear(0.0).is_err());
        let tiny_budget = EvolutionOptions {
            max_steps: 3,
            ..Default::default()
        };
        assert!(matches!(
            evolve(&h, &Schedule::linear(100.0).unwrap(), &tiny_budget),
            Err(Error::Integration { .. })
        ));
    }

    #[test]
    fn constant_gap_gives_linear_schedule() {
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let gaps = vec![0.7; 11];
        let sched = make_gap_adaptive_schedule(&grid, &gaps, 2.0, 3.0).unwrap();
        let total = sched.total_time();
        assert!((total - 3.0 / (2.0 * 0.49)).abs() < 1e-12);
        for k in 0..=50 {
            let t = total * k as f64 / 50.0;
            assert!((sched.s_at(t) - t / total).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_adaptive_rejects_bad_profiles() {
        let grid = [0.0, 0.5, 1.0];
        assert!(make_gap_adaptive_schedule(&grid, &[1.0, 0.0, 1.0], 1.0, 1.0).is_err());
        assert!(make_gap_adaptive_schedule(&grid, &[1.0, -0.1, 1.0], 1.0, 1.0).is_err());
        assert!(make_gap_adaptive_schedule(&[0.0, 0.6, 0.5, 1.0], &[1.0; 4], 1.0, 1.0).is_err());
        assert!(make_gap_adaptive_schedule(&grid, &[1.0; 2], 1.0, 1.0).is_err());
    }
}
