//! Reference calculations built straight from the definitions: dense
//! matrices, eigendecomposition-based propagation and brute-force counting.
//! Nothing here calls into the crate under test.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// `H(s) = (1 - s) H_i + s diag(problem)` in dense form.
#[derive(Debug, Clone)]
pub struct DenseModel {
    pub n: u32,
    pub problem: Vec<f64>,
    pub g: f64,
    /// `I - |u⟩⟨u|` instead of `g Σ σ_x`.
    pub projector_driver: bool,
}

impl DenseModel {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn driver(&self) -> DMatrix<f64> {
        let dim = self.dim();
        if self.projector_driver {
            DMatrix::identity(dim, dim) - DMatrix::from_element(dim, dim, 1.0 / dim as f64)
        } else {
            let mut m = DMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..self.n {
                    m[(i, i ^ (1 << j))] = self.g;
                }
            }
            m
        }
    }

    pub fn matrix(&self, s: f64) -> DMatrix<f64> {
        let mut m = self.driver() * (1.0 - s);
        for (i, d) in self.problem.iter().enumerate() {
            m[(i, i)] += s * d;
        }
        m
    }

    /// Ground state of `H(0)`, phase arbitrary.
    pub fn initial_state(&self) -> Vec<Complex64> {
        let eig = self.matrix(0.0).symmetric_eigen();
        let k = (0..self.dim())
            .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .unwrap();
        eig.eigenvectors
            .column(k)
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect()
    }

    /// Ascending spectrum of `H(s)`.
    pub fn spectrum(&self, s: f64) -> Vec<f64> {
        let mut e: Vec<f64> = self.matrix(s).symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Hamming distances of every stored value to `target`.
pub fn hamming_problem(values: &[u32], target: u32) -> Vec<f64> {
    values.iter().map(|v| f64::from((v ^ target).count_ones())).collect()
}

/// `I - |m⟩⟨m|`.
pub fn marked_problem(n: u32, marked: usize) -> Vec<f64> {
    (0..1usize << n).map(|i| if i == marked { 0.0 } else { 1.0 }).collect()
}

/// `exp(-i H t) ψ` for a fixed real symmetric `H`.
pub fn propagate_exact(h: &DMatrix<f64>, psi: &[Complex64], t: f64) -> Vec<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let c = v.transpose() * DVector::from_column_slice(psi);
    let phased = DVector::from_iterator(
        c.len(),
        c.iter()
            .zip(eig.eigenvalues.iter())
            .map(|(ci, &e)| ci * Complex64::from_polar(1.0, -e * t)),
    );
    (v * phased).iter().copied().collect()
}

/// Linear schedule `s = t/T`, `steps` frozen-midpoint exponentials.
pub fn evolve_midpoint(model: &DenseModel, total_time: f64, steps: usize) -> Vec<Complex64> {
    let dt = total_time / steps as f64;
    let mut psi = model.initial_state();
    for k in 0..steps {
        let s = (k as f64 + 0.5) / steps as f64;
        psi = propagate_exact(&model.matrix(s), &psi, dt);
    }
    psi
}

/// Final basis-state probabilities for the linear schedule. The midpoint
/// rule is second order, so two resolutions are combined by Richardson
/// extrapolation.
pub fn final_probabilities(model: &DenseModel, total_time: f64, steps: usize) -> Vec<f64> {
    let coarse = evolve_midpoint(model, total_time, steps);
    let fine = evolve_midpoint(model, total_time, 2 * steps);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f.norm_sqr() - c.norm_sqr()) / 3.0)
        .collect()
}

/// Number of `x` in `0..2^n` with `weight(x) < cutoff`, by enumeration.
pub fn count_below(n: u32, cutoff: f64, weight: impl Fn(u32) -> u32) -> u64 {
    (0..1u32 << n).filter(|&x| f64::from(weight(x)) < cutoff).count() as u64
}

/// `C(n, k)` by Pascal's triangle.
pub fn pascal(n: u32, k: u32) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row.get(k as usize).copied().unwrap_or(0)
}
