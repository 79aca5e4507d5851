//! Lowest eigenpairs of a real symmetric operator given only its matvec.
//!
//! Restarted Lanczos with full reorthogonalisation. Levels are found one at a
//! time and locked; later runs stay orthogonal to the locked vectors, which
//! lets degenerate levels be recovered with their multiplicity.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Required residual `‖Hv - λv‖` for each returned pair.
    pub tol: f64,
    pub max_krylov: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-8,
            max_krylov: 120,
            max_restarts: 400,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Failure to reach the residual tolerance for level `level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotConverged {
    pub level: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Modified Gram-Schmidt, two passes, against both vector sets. Each pass
/// must cover both sets or components along one set leak back in through
/// the other.
fn orthogonalize(v: &mut [f64], locked: &[Vec<f64>], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in locked.iter().chain(basis) {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

/// The `k` lowest eigenpairs of the `dim`-dimensional operator `op`
/// (`op(x, y)` writes `y = H x`), ascending.
pub fn lowest_eigenpairs<F>(op: F, dim: usize, k: usize, opts: &LanczosOptions) -> Result<Vec<EigenPair>, NotConverged>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut pairs = Vec::with_capacity(k);
    let mut hx = vec![0.0; dim];

    for level in 0..k.min(dim) {
        let mut start: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut best_residual = f64::INFINITY;
        let mut converged = None;
        for _ in 0..=opts.max_restarts {
            orthogonalize(&mut start, &locked, &[]);
            let nrm = norm(&start);
            if nrm == 0.0 {
                break;
            }
            start.iter_mut().for_each(|x| *x /= nrm);

            let (theta, ritz) = lanczos_pass(&op, &start, &locked, dim, opts);
            op(&ritz, &mut hx);
            let residual = hx
                .iter()
                .zip(&ritz)
                .map(|(h, x)| (h - theta * x).powi(2))
                .sum::<f64>()
                .sqrt();
            best_residual = best_residual.min(residual);
            if residual <= opts.tol {
                converged = Some(EigenPair {
                    value: theta,
                    vector: ritz,
                    residual,
                });
                break;
            }
            start = ritz;
        }
        match converged {
            Some(pair) => {
                locked.push(pair.vector.clone());
                pairs.push(pair);
            }
            None => {
                return Err(NotConverged {
                    level,
                    residual: best_residual,
                })
            }
        }
    }
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(pairs)
}

/// One Lanczos pass from `start`; returns the lowest Ritz pair.
fn lanczos_pass<F>(op: &F, start: &[f64], locked: &[Vec<f64>], dim: usize, opts: &LanczosOptions) -> (f64, Vec<f64>)
where
    F: Fn(&[f64], &mut [f64]),
{
    let m_max = opts.max_krylov.min(dim - locked.len()).max(1);
    let mut basis: Vec<Vec<f64>> = vec![start.to_vec()];
    let mut alpha = Vec::with_capacity(m_max);
    let mut beta: Vec<f64> = Vec::with_capacity(m_max);
    let mut w = vec![0.0; dim];

    loop {
        let j = basis.len() - 1;
        op(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        let scale = norm(&w).max(a.abs());
        orthogonalize(&mut w, locked, &basis);
        let b = norm(&w);
        // A relative breakdown test: normalising a residual made of rounding
        // noise would produce a vector that is not orthogonal to the basis.
        if basis.len() == m_max || b <= 1e-10 * scale {
            break;
        }
        // Stop early once the lowest Ritz value has an accurate estimate.
        if basis.len().is_multiple_of(10) {
            let (_, y) = lowest_tridiagonal(&alpha, &beta);
            if (b * y[y.len() - 1]).abs() < opts.tol * 1e-2 {
                break;
            }
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }

    let (theta, y) = lowest_tridiagonal(&alpha, &beta);
    let mut ritz = vec![0.0; dim];
    for (q, &c) in basis.iter().zip(&y) {
        axpy(c, q, &mut ritz);
    }
    orthogonalize(&mut ritz, locked, &[]);
    let nrm = norm(&ritz);
    ritz.iter_mut().for_each(|x| *x /= nrm);
    (theta, ritz)
}

fn lowest_tridiagonal(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let idx = (0..m)
        .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .expect("non-empty tridiagonal");
    (
        eig.eigenvalues[idx],
        eig.eigenvectors.column(idx).iter().copied().collect(),
    )
}
