//! Instantaneous spectra of `H(s)` and the minimum ground-state gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hamiltonian::SearchHamiltonian;
use crate::lanczos::{lowest_eigenpairs, LanczosOptions};

/// Widest problem solved by dense diagonalisation.
pub const DENSE_MAX_BITS: u32 = 10;
pub const DEFAULT_GRID_POINTS: usize = 201;
/// Gap below which the ground state is treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-12;
/// Width of the final golden-section bracket around `s*`.
pub const S_STAR_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    /// Dense up to [`DENSE_MAX_BITS`], Lanczos above.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumProfile {
    pub s_grid: Vec<f64>,
    /// Lowest `k` eigenvalues at each grid point, ascending.
    pub levels: Vec<Vec<f64>>,
    /// Refined minimum of `E_1 - E_0` (absent when `k < 2`).
    pub min_gap: Option<f64>,
    pub s_star: Option<f64>,
}

impl SpectrumProfile {
    /// `E_1 - E_0` at every grid point.
    pub fn gaps(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l[1] - l[0]).collect()
    }
}

/// Summary of a gap search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub min_gap: f64,
    pub s_star: f64,
    pub grid_points: usize,
    pub refined: bool,
}

/// `s_k = k / (points - 1)`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        p => (0..p).map(|k| k as f64 / (p - 1) as f64).collect(),
    }
}

/// Lowest `k` eigenvalues of `H(s)`, ascending.
pub fn levels_at(h: &SearchHamiltonian, s: f64, k: usize, solver: Solver) -> Result<Vec<f64>> {
    if k == 0 || k > h.dim() {
        return Err(Error::bounds("levels", k, format!("1..={}", h.dim())));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::bounds("s", s, "[0, 1]"));
    }
    let dense = match solver {
        Solver::Auto => h.n() <= DENSE_MAX_BITS,
        Solver::Dense => true,
        Solver::Lanczos => false,
    };
    if dense {
        let mut values: Vec<f64> = h.dense_matrix(s).symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values.truncate(k);
        Ok(values)
    } else {
        let opts = LanczosOptions::default();
        let op = |x: &[f64], y: &mut [f64]| h.apply_unchecked(s, x, y);
        let pairs = lowest_eigenpairs(op, h.dim(), k, &opts).map_err(|e| Error::NonConvergence {
            s,
            residual: e.residual,
        })?;
        Ok(pairs.into_iter().map(|p| p.value).collect())
    }
}

fn gap_at(h: &SearchHamiltonian, s: f64, solver: Solver) -> Result<f64> {
    let l = levels_at(h, s, 2, solver)?;
    Ok(l[1] - l[0])
}

/// Levels on `s_grid`, with grid points evaluated under `exec`, followed by a
/// golden-section refinement of the minimum gap when `k >= 2`.
pub fn instantaneous_spectrum(
    h: &SearchHamiltonian,
    s_grid: &[f64],
    k: usize,
    solver: Solver,
    exec: Exec,
) -> Result<SpectrumProfile> {
    if s_grid.is_empty() {
        return Err(Error::Domain("empty s grid".into()));
    }
    if let Some(&s) = s_grid.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::bounds("s", s, "[0, 1]"));
    }
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("s grid must be strictly increasing".into()));
    }
    let levels = exec
        .map(s_grid.to_vec(), |s| levels_at(h, s, k, solver))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut profile = SpectrumProfile {
        s_grid: s_grid.to_vec(),
        levels,
        min_gap: None,
        s_star: None,
    };
    if k >= 2 {
        let (gap, s_star) = refine_min_gap(h, &profile.s_grid, &profile.gaps(), solver)?;
        profile.min_gap = Some(gap);
        profile.s_star = Some(s_star);
    }
    Ok(profile)
}

/// Golden-section search between the grid neighbours of the coarse minimum.
fn refine_min_gap(h: &SearchHamiltonian, grid: &[f64], gaps: &[f64], solver: Solver) -> Result<(f64, f64)> {
    let i = (0..gaps.len())
        .min_by(|&a, &b| gaps[a].total_cmp(&gaps[b]))
        .expect("non-empty grid");
    let mut best = (gaps[i], grid[i]);
    if gaps.len() >= 3 {
        let mut a = grid[i.saturating_sub(1)];
        let mut b = grid[(i + 1).min(grid.len() - 1)];
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let mut fc = gap_at(h, c, solver)?;
        let mut fd = gap_at(h, d, solver)?;
        while b - a > S_STAR_TOLERANCE {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = gap_at(h, c, solver)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = gap_at(h, d, solver)?;
            }
        }
        for (f, s) in [(fc, c), (fd, d)] {
            if f < best.0 {
                best = (f, s);
            }
        }
    }
    if best.0 < DEGENERACY_GAP {
        return Err(Error::Degeneracy { s: best.1, gap: best.0 });
    }
    Ok(best)
}

/// Minimum gap over `[0, 1]` on the default grid.
pub fn min_gap(h: &SearchHamiltonian, exec: Exec) -> Result<GapSummary> {
    min_gap_on_grid(h, DEFAULT_GRID_POINTS, Solver::Auto, exec)
}

pub fn min_gap_on_grid(h: &SearchHamiltonian, grid_points: usize, solver: Solver, exec: Exec) -> Result<GapSummary> {
    if grid_points < 2 {
        return Err(Error::bounds("grid points", grid_points, ">= 2"));
    }
    let profile = instantaneous_spectrum(h, &uniform_grid(grid_points), 2, solver, exec)?;
    Ok(GapSummary {
        min_gap: profile.min_gap.expect("k = 2"),
        s_star: profile.s_star.expect("k = 2"),
        grid_points,
        refined: grid_points >= 3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::{random_database, Database, SearchTarget};
    use crate::hamiltonian::InitialForm;

    fn binomial(n: u32, k: u32) -> usize {
        (0..k).fold(1usize, |acc, i| acc * (n - i) as usize / (i as usize + 1))
    }

    #[test]
    fn endpoint_spectra() {
        let db = Database::new(3, vec![6, 3, 5, 0, 4, 1, 7, 2]).unwrap();
        let h = SearchHamiltonian::bit_sum(&db, SearchTarget::new(5, 3).unwrap(), 0.5).unwrap();
        let at0 = levels_at(&h, 0.0, 8, Solver::Dense).unwrap();
        let expected0 = [-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5];
        for (a, b) in at0.iter().zip(expected0) {
            assert!((a - b).abs() < 1e-12);
        }
        let at1 = levels_at(&h, 1.0, 8, Solver::Dense).unwrap();
        let expected1 = [0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0];
        for (a, b) in at1.iter().zip(expected1) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((at1[1] - at1[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn s_one_spectrum_has_binomial_multiplicities() {
        for n in 3..=6u32 {
            let db = random_database(n, 77 + u64::from(n)).unwrap();
            let h = SearchHamiltonian::bit_sum(&db, SearchTarget::new(1, n).unwrap(), 0.5).unwrap();
            let levels = levels_at(&h, 1.0, h.dim(), Solver::Dense).unwrap();
            let mut counts = vec![0usize; n as usize + 1];
            for l in levels {
                let r = l.round();
                assert!((l - r).abs() < 1e-10);
                counts[r as usize] += 1;
            }
            for k in 0..=n {
                assert_eq!(counts[k as usize], binomial(n, k));
            }
        }
    }

    #[test]
    fn msas_gap_matches_two_level_formula() {
        let h = SearchHamiltonian::msas(3, 2, InitialForm::UniformProjector, 0.5).unwrap();
        // Two-level oracle: Δ(s) = sqrt(1 - 4 (1 - 1/N) s (1 - s)).
        for s in [0.0, 0.2, 0.5, 0.77, 1.0] {
            let l = levels_at(&h, s, 2, Solver::Dense).unwrap();
            let exact = (1.0 - 4.0 * (1.0 - 0.125) * s * (1.0 - s)).sqrt();
            assert!((l[1] - l[0] - exact).abs() < 1e-12);
        }
        let g = min_gap(&h, Exec::Sequential).unwrap();
        assert!((g.min_gap - 0.125f64.sqrt()).abs() < 1e-8);
        assert!((g.s_star - 0.5).abs() < 1e-4);
        assert!(g.refined && g.grid_points == 201);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        for n in [4u32, 6, 8] {
            let db = random_database(n, u64::from(n)).unwrap();
            let h = SearchHamiltonian::bit_sum(&db, SearchTarget::new(3, n).unwrap(), 0.5).unwrap();
            let hm = SearchHamiltonian::msas(n, 3, InitialForm::UniformProjector, 0.5).unwrap();
            for ham in [&h, &hm] {
                for s in [0.0, 0.35, 0.6, 1.0] {
                    let dense = levels_at(ham, s, 6, Solver::Dense).unwrap();
                    let iter = levels_at(ham, s, 6, Solver::Lanczos).unwrap();
                    for (a, b) in dense.iter().zip(&iter) {
                        assert!((a - b).abs() < 1e-8, "n={n} s={s}: {dense:?} vs {iter:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn parallel_and_sequential_profiles_match() {
        let db = random_database(5, 9).unwrap();
        let h = SearchHamiltonian::bit_sum(&db, SearchTarget::new(7, 5).unwrap(), 0.5).unwrap();
        let grid = uniform_grid(41);
        let a = instantaneous_spectrum(&h, &grid, 4, Solver::Auto, Exec::Sequential).unwrap();
        let b = instantaneous_spectrum(&h, &grid, 4, Solver::Auto, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_arguments() {
        let h = SearchHamiltonian::msas(2, 0, InitialForm::UniformProjector, 0.5).unwrap();
        assert!(levels_at(&h, 0.5, 5, Solver::Dense).is_err());
        assert!(levels_at(&h, 0.5, 0, Solver::Dense).is_err());
        assert!(instantaneous_spectrum(&h, &[0.5, 0.2], 2, Solver::Dense, Exec::Sequential).is_err());
        assert!(instantaneous_spectrum(&h, &[1.5], 2, Solver::Dense, Exec::Sequential).is_err());
    }

    #[test]
    fn degenerate_ground_state_is_reported() {
        use crate::hamiltonian::DiagonalOperator;
        let problem = DiagonalOperator::new(vec![0.0, 0.0, 1.0, 2.0]).unwrap();
        let h = SearchHamiltonian::custom(problem, 0.5, InitialForm::TransverseField).unwrap();
        assert!(matches!(min_gap(&h, Exec::Sequential), Err(Error::Degeneracy { .. })));
    }
}
