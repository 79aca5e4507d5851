//! Scaling experiments and complexity estimates.
//!
//! The sweep finds, for every random instance, the evolution time at which
//! the success probability first enters a narrow window (by default
//! `[0.12, 0.13]`), averages those times per width `n` and fits `T ∝ N^α`.
//! The Hamming-ball estimator gives the complementary perturbative picture:
//! `T_global ∝ |S⁻|/|S⁺|` and `T_local ∝ sqrt(T_global)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::database::{instance_seed, random_database, SearchTarget};
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionOptions, Schedule};
use crate::exec::Exec;
use crate::hamiltonian::{InitialForm, SearchHamiltonian, DEFAULT_G};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Database search with the summed bit problem Hamiltonian.
    BitSum,
    /// Marked-state baseline.
    Msas,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::BitSum => "bitsum",
            Algorithm::Msas => "msas",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bitsum" | "bit-sum" => Ok(Algorithm::BitSum),
            "msas" => Ok(Algorithm::Msas),
            other => Err(format!("unknown algorithm '{other}' (expected bitsum or msas)")),
        }
    }
}

/// Exponential scan followed by bisection for a time whose success
/// probability lies in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSearch {
    pub lo: f64,
    pub hi: f64,
    /// First probed time.
    pub t0: f64,
    pub max_probes: usize,
}

impl Default for WindowSearch {
    fn default() -> Self {
        WindowSearch {
            lo: 0.12,
            hi: 0.13,
            t0: 1.0,
            max_probes: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowHit {
    pub total_time: f64,
    pub probability: f64,
    pub steps: u64,
    /// Every `(T, P(T))` evaluated, in order.
    pub probes: Vec<(f64, f64)>,
}

impl WindowSearch {
    /// Rejects windows outside (0, 1) and a non-positive `t0`.
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.lo && self.lo < self.hi && self.hi < 1.0) {
            return Err(Error::Domain(format!(
                "success window [{}, {}] must lie inside (0, 1)",
                self.lo, self.hi
            )));
        }
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(Error::bounds("T0", self.t0, "(0, inf)"));
        }
        Ok(())
    }

    /// Runs the search against `probe(T) -> (P(T), steps)`.
    ///
    /// The scan doubles `T` until `P >= lo`. If that overshoots the window the
    /// bracket `[T/2, T]` (or `[0, T0]`) is bisected, keeping `P < lo` on the
    /// left and `P > hi` on the right, so the search converges on an upward
    /// crossing of the window.
    pub fn run<F>(&self, mut probe: F) -> Result<WindowHit>
    where
        F: FnMut(f64) -> Result<(f64, u64)>,
    {
        self.validate()?;
        let mut probes = Vec::new();
        let mut eval = |t: f64, probes: &mut Vec<(f64, f64)>| -> Result<Option<WindowHit>> {
            let (p, steps) = probe(t)?;
            probes.push((t, p));
            Ok((self.lo..=self.hi).contains(&p).then(|| WindowHit {
                total_time: t,
                probability: p,
                steps,
                probes: Vec::new(),
            }))
        };
        let finish = |mut hit: WindowHit, probes: Vec<(f64, f64)>| {
            hit.probes = probes;
            Ok(hit)
        };

        let mut below = 0.0;
        let mut t = self.t0;
        let above = loop {
            if probes.len() >= self.max_probes {
                return Err(self.failure(probes));
            }
            if let Some(hit) = eval(t, &mut probes)? {
                return finish(hit, probes);
            }
            let p = probes.last().expect("just probed").1;
            if p > self.hi {
                break t;
            }
            below = t;
            t *= 2.0;
            if !t.is_finite() {
                return Err(self.failure(probes));
            }
        };

        let (mut left, mut right) = (below, above);
        while probes.len() < self.max_probes {
            let mid = 0.5 * (left + right);
            if let Some(hit) = eval(mid, &mut probes)? {
                return finish(hit, probes);
            }
            if probes.last().expect("just probed").1 < self.lo {
                left = mid;
            } else {
                right = mid;
            }
        }
        Err(self.failure(probes))
    }

    fn failure(&self, probes: Vec<(f64, f64)>) -> Error {
        Error::SearchFailure {
            lo: self.lo,
            hi: self.hi,
            probes,
        }
    }
}

/// Window search for one Hamiltonian under a linear schedule.
pub fn find_time_for_window(h: &SearchHamiltonian, window: &WindowSearch, tol: f64) -> Result<WindowHit> {
    let opts = EvolutionOptions {
        tol,
        ..Default::default()
    };
    window.run(|t| {
        let r = evolve(h, &Schedule::linear(t)?, &opts)?;
        Ok((r.success_probability, r.steps_taken))
    })
}

/// One instance that reached the success window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub algorithm: Algorithm,
    pub n: u32,
    pub instance: u32,
    pub seed: u64,
    #[serde(rename = "T_star")]
    pub t_star: f64,
    #[serde(rename = "success_prob")]
    pub success_probability: f64,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFailure {
    pub algorithm: Algorithm,
    pub n: u32,
    pub instance: u32,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n_values: Vec<u32>,
    pub instances_per_n: u32,
    pub algorithms: Vec<Algorithm>,
    pub seed_base: u64,
    pub g: f64,
    pub msas_initial: InitialForm,
    pub window: WindowSearch,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_values: (5..=11).collect(),
            instances_per_n: 20,
            algorithms: vec![Algorithm::BitSum, Algorithm::Msas],
            seed_base: 0,
            g: DEFAULT_G,
            msas_initial: InitialForm::UniformProjector,
            window: WindowSearch::default(),
            tol: 1e-6,
        }
    }
}

impl SweepConfig {
    /// Instances actually run at width `n`: at most `2^n`.
    pub fn instances_for(&self, n: u32) -> u32 {
        let cap = if n >= 32 { u32::MAX } else { 1u32 << n };
        self.instances_per_n.min(cap)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    /// Successful instances ordered by (algorithm, n, instance).
    pub records: Vec<ScalingRecord>,
    pub failures: Vec<InstanceFailure>,
}

impl SweepOutcome {
    pub fn records_for(&self, algorithm: Algorithm) -> Vec<ScalingRecord> {
        self.records
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .cloned()
            .collect()
    }
}

/// The random instance `k` at width `n`: database seed, database, target.
pub fn sweep_instance(seed_base: u64, n: u32, k: u32) -> Result<(u64, crate::database::Database, SearchTarget)> {
    let seed = instance_seed(seed_base, n, k);
    let db = random_database(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let target = SearchTarget::new(rng.random_range(0..1u32 << n), n)?;
    Ok((seed, db, target))
}

fn run_job(
    config: &SweepConfig,
    algorithm: Algorithm,
    n: u32,
    k: u32,
) -> std::result::Result<ScalingRecord, InstanceFailure> {
    let seed = instance_seed(config.seed_base, n, k);
    let fail = |e: Error| InstanceFailure {
        algorithm,
        n,
        instance: k,
        seed,
        message: e.to_string(),
    };
    let (_, db, target) = sweep_instance(config.seed_base, n, k).map_err(fail)?;
    let h = match algorithm {
        Algorithm::BitSum => SearchHamiltonian::bit_sum(&db, target, config.g),
        Algorithm::Msas => {
            let marked = db.index_of(target.value()).expect("permutation holds every value");
            SearchHamiltonian::msas(n, marked, config.msas_initial, config.g)
        }
    }
    .map_err(fail)?;
    let hit = find_time_for_window(&h, &config.window, config.tol).map_err(fail)?;
    Ok(ScalingRecord {
        algorithm,
        n,
        instance: k,
        seed,
        t_star: hit.total_time,
        success_probability: hit.probability,
        steps: hit.steps,
    })
}

/// Runs every `(algorithm, n, instance)` job under `exec`. `on_result` sees
/// each outcome as soon as it completes (in completion order); the returned
/// outcome is sorted and independent of scheduling.
pub fn run_scaling_experiment<F>(config: &SweepConfig, exec: Exec, on_result: F) -> Result<SweepOutcome>
where
    F: Fn(std::result::Result<&ScalingRecord, &InstanceFailure>) + Sync + Send,
{
    if config.n_values.is_empty() || config.algorithms.is_empty() || config.instances_per_n == 0 {
        return Err(Error::Domain(
            "sweep needs widths, algorithms and at least one instance".into(),
        ));
    }
    if let Some(&n) = config
        .n_values
        .iter()
        .find(|&&n| n == 0 || n > crate::database::MAX_BITS)
    {
        return Err(Error::bounds("n", n, format!("1..={}", crate::database::MAX_BITS)));
    }
    config.window.validate()?;

    let mut jobs = Vec::new();
    for &algorithm in &config.algorithms {
        for &n in &config.n_values {
            for k in 0..config.instances_for(n) {
                jobs.push((algorithm, n, k));
            }
        }
    }
    // Largest widths first so the long jobs start early.
    jobs.sort_by_key(|&(a, n, k)| (std::cmp::Reverse(n), a, k));

    let results = exec.map(jobs, |(algorithm, n, k)| {
        let r = run_job(config, algorithm, n, k);
        on_result(r.as_ref());
        r
    });

    let mut outcome = SweepOutcome::default();
    for r in results {
        match r {
            Ok(rec) => outcome.records.push(rec),
            Err(f) => outcome.failures.push(f),
        }
    }
    outcome.records.sort_by_key(|r| (r.algorithm, r.n, r.instance));
    outcome.failures.sort_by_key(|f| (f.algorithm, f.n, f.instance));
    Ok(outcome)
}

/// Least-squares fit of `ln T̄_n = α ln N + c` with `N = 2^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub algorithm: Option<Algorithm>,
    pub alpha: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub n_values: Vec<u32>,
    pub mean_times: Vec<f64>,
}

impl ScalingFit {
    /// Adjacent pairs where the mean time decreases with `n`.
    pub fn inversions(&self) -> usize {
        self.mean_times.windows(2).filter(|w| w[1] < w[0]).count()
    }
}

/// Fits the mean time per width over records of a single algorithm.
pub fn fit_alpha(records: &[ScalingRecord]) -> Result<ScalingFit> {
    let algorithm = records.first().map(|r| r.algorithm);
    if records.iter().any(|r| Some(r.algorithm) != algorithm) {
        return Err(Error::Domain("records mix several algorithms".into()));
    }
    let mut by_n: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for r in records {
        let e = by_n.entry(r.n).or_insert((0.0, 0));
        e.0 += r.t_star;
        e.1 += 1;
    }
    let points: Vec<(u32, f64)> = by_n.into_iter().map(|(n, (sum, c))| (n, sum / c as f64)).collect();
    let mut fit = fit_power_law(&points)?;
    fit.algorithm = algorithm;
    Ok(fit)
}

/// Fits `(n, T̄_n)` pairs directly.
pub fn fit_power_law(points: &[(u32, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 distinct n values, have {}",
            points.len()
        )));
    }
    if let Some((n, t)) = points.iter().find(|(_, t)| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Domain(format!("mean time {t} at n = {n} is not positive")));
    }
    let xs: Vec<f64> = points
        .iter()
        .map(|&(n, _)| f64::from(n) * std::f64::consts::LN_2)
        .collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t.ln()).collect();
    let m = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / m;
    let y_mean = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one n".into()));
    }
    let alpha = sxy / sxx;
    let intercept = y_mean - alpha * x_mean;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - alpha * x - intercept).powi(2))
        .sum();
    let stderr = (ssr / (m - 2.0) / sxx).sqrt();
    Ok(ScalingFit {
        algorithm: None,
        alpha,
        stderr,
        intercept,
        n_values: points.iter().map(|p| p.0).collect(),
        mean_times: points.iter().map(|p| p.1).collect(),
    })
}

/// `ζ(s) = s / (1 - s)`.
pub fn zeta(s: f64) -> f64 {
    s / (1.0 - s)
}

/// Inputs of the Hamming-ball estimator. Only the cutoffs enter the counts;
/// the remaining fields record where they came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeParams {
    /// Hamming radius: `S⁺` holds states with `h(z, f) < m_c`.
    pub m_c: f64,
    /// Energy cutoff: `S⁻` holds states with `E_z < E_c`.
    pub e_c: f64,
    pub omega: Option<f64>,
    /// `m_c = c_m Ω`.
    pub c_m: Option<f64>,
    /// `E_c = c_e / Ω`.
    pub c_e: Option<f64>,
    pub delta: Option<f64>,
    pub zeta_plus: Option<f64>,
    pub zeta_minus: Option<f64>,
    pub epsilon0: Option<f64>,
    pub s_star: Option<f64>,
}

impl PerturbativeParams {
    pub fn from_cutoffs(m_c: f64, e_c: f64) -> Self {
        PerturbativeParams {
            m_c,
            e_c,
            omega: None,
            c_m: None,
            c_e: None,
            delta: None,
            zeta_plus: None,
            zeta_minus: None,
            epsilon0: None,
            s_star: None,
        }
    }

    /// `m_c = 2`, `E_c = ⌈n/4⌉`.
    pub fn default_for(n: u32) -> Self {
        Self::from_cutoffs(2.0, f64::from(n.div_ceil(4)))
    }

    pub fn from_omega(omega: f64, c_m: f64, c_e: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::bounds("omega", omega, "(0, inf)"));
        }
        Ok(PerturbativeParams {
            omega: Some(omega),
            c_m: Some(c_m),
            c_e: Some(c_e),
            ..Self::from_cutoffs(c_m * omega, c_e / omega)
        })
    }

    /// From the small parameters: `ζ± = ζ(s* ± ε0)` and
    /// `Ω = ln(1/δ) / ln ζ⁺`.
    pub fn from_raw(delta: f64, s_star: f64, epsilon0: f64, c_m: f64, c_e: f64) -> Result<Self> {
        if !(0.0 < delta && delta < 1.0) {
            return Err(Error::bounds("delta", delta, "(0, 1)"));
        }
        if !(0.0 < s_star - epsilon0 && s_star + epsilon0 < 1.0 && epsilon0 > 0.0) {
            return Err(Error::Domain(format!(
                "s* ± ε0 = {s_star} ± {epsilon0} must lie inside (0, 1)"
            )));
        }
        let zeta_plus = zeta(s_star + epsilon0);
        if zeta_plus <= 1.0 {
            return Err(Error::Domain(format!("ζ⁺ = {zeta_plus} must exceed 1")));
        }
        let omega = (1.0 / delta).ln() / zeta_plus.ln();
        Ok(PerturbativeParams {
            delta: Some(delta),
            zeta_plus: Some(zeta_plus),
            zeta_minus: Some(zeta(s_star - epsilon0)),
            epsilon0: Some(epsilon0),
            s_star: Some(s_star),
            ..Self::from_omega(omega, c_m, c_e)?
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeEstimate {
    pub n: u32,
    pub m_c: f64,
    pub e_c: f64,
    pub s_plus: u64,
    pub s_minus: u64,
    /// `ln|S⁻| / ln N`.
    pub alpha_estimate: f64,
    /// `|S⁻| / |S⁺|`, proportional to the global-evolution time.
    pub t_global_relative: f64,
    /// `sqrt(|S⁻| / |S⁺|)`, proportional to the local-evolution time.
    pub t_local_relative: f64,
}

pub const MAX_PERTURBATIVE_BITS: u32 = 62;

/// `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let c = (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1));
    u64::try_from(c).expect("C(n, k) fits in u64 for n <= 62")
}

/// `Σ_{i < cutoff} C(n, i)` over integer `i`.
pub fn partial_binomial_sum(n: u32, cutoff: f64) -> u64 {
    (0..=n)
        .take_while(|&i| f64::from(i) < cutoff)
        .map(|i| binomial(n, i))
        .sum()
}

/// Sizes of the Hamming-close set `S⁺` and low-energy set `S⁻` for a
/// bit-sum problem, whose level `i` has degeneracy `C(n, i)`.
pub fn perturbative_cardinalities(n: u32, params: &PerturbativeParams) -> Result<PerturbativeEstimate> {
    if n == 0 || n > MAX_PERTURBATIVE_BITS {
        return Err(Error::bounds("n", n, format!("1..={MAX_PERTURBATIVE_BITS}")));
    }
    let nf = f64::from(n);
    if !(params.m_c > 0.0 && params.m_c <= nf) {
        return Err(Error::bounds("m_c", params.m_c, format!("(0, {n}]")));
    }
    if !(params.e_c > 0.0 && params.e_c <= nf) {
        return Err(Error::bounds("E_c", params.e_c, format!("(0, {n}]")));
    }
    let s_plus = partial_binomial_sum(n, params.m_c);
    let s_minus = partial_binomial_sum(n, params.e_c);
    let ratio = s_minus as f64 / s_plus as f64;
    Ok(PerturbativeEstimate {
        n,
        m_c: params.m_c,
        e_c: params.e_c,
        s_plus,
        s_minus,
        alpha_estimate: (s_minus as f64).ln() / (nf * std::f64::consts::LN_2),
        t_global_relative: ratio,
        t_local_relative: ratio.sqrt(),
    })
}
