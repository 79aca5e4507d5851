//! Problem, driver and interpolated Hamiltonians.
//!
//! Every operator here is real symmetric. The problem part is diagonal in the
//! computational basis and stored as a vector; the driver is applied
//! matrix-free, either as a transverse field `g Σ_j σ_x^j` (bit flips) or as the
//! projector `I - |u⟩⟨u|` onto the complement of the uniform superposition.

use std::ops::{Add, AddAssign, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::database::{Database, SearchTarget};
use crate::error::{Error, Result};
use crate::evolution::WaveState;

/// Default transverse coupling strength.
pub const DEFAULT_G: f64 = 0.5;

/// Real diagonal of a `2^n × 2^n` operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    diag: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.len() < 2 || !diag.len().is_power_of_two() {
            return Err(Error::Domain(format!(
                "diagonal length {} is not a power of two >= 2",
                diag.len()
            )));
        }
        if let Some(i) = diag.iter().position(|d| !d.is_finite()) {
            return Err(Error::Domain(format!("entry {i} is not finite")));
        }
        Ok(DiagonalOperator { diag })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of qubits, `log2(len)`.
    pub fn n_bits(&self) -> u32 {
        self.diag.len().trailing_zeros()
    }

    /// Entrywise sum.
    pub fn sum(&self, other: &DiagonalOperator) -> Result<DiagonalOperator> {
        if self.len() != other.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                found: other.len(),
            });
        }
        let diag = self.diag.iter().zip(&other.diag).map(|(a, b)| a + b).collect();
        DiagonalOperator::new(diag)
    }

    /// Index of the smallest entry (first one on ties) and its value.
    pub fn argmin(&self) -> (usize, f64) {
        self.diag.iter().copied().enumerate().fold(
            (0, f64::INFINITY),
            |best, (i, d)| if d < best.1 { (i, d) } else { best },
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// `H_p = (D - t)^2` built from the full values. Its spectral width grows as `N^2`.
pub fn problem_hamiltonian_fullvalue(db: &Database, t: SearchTarget) -> Result<DiagonalOperator> {
    check_target(db, t)?;
    let target = f64::from(t.value());
    let diag = db
        .values()
        .iter()
        .map(|&v| {
            let d = f64::from(v) - target;
            d * d
        })
        .collect();
    DiagonalOperator::new(diag)
}

/// Summed bit problem Hamiltonian: entry `i` is the Hamming distance between
/// `v_i` and `t`, so the spectrum is bounded by `n`.
pub fn problem_hamiltonian(db: &Database, t: SearchTarget) -> Result<DiagonalOperator> {
    check_target(db, t)?;
    let diag = db
        .values()
        .iter()
        .map(|&v| f64::from((v ^ t.value()).count_ones()))
        .collect();
    DiagonalOperator::new(diag)
}

fn check_target(db: &Database, t: SearchTarget) -> Result<()> {
    if t.n() != db.n() {
        return Err(Error::Domain(format!(
            "target is {}-bit but database is {}-bit",
            t.n(),
            db.n()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// Sum of per-bit comparisons (Hamming distance to the target).
    BitSum,
    /// Squared difference of full values.
    FullValue,
    /// Marked-state baseline `I - |m⟩⟨m|`.
    Msas { marked: usize },
    /// Caller-supplied diagonal.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialForm {
    #[default]
    TransverseField,
    UniformProjector,
}

/// Element type the Hamiltonian can act on (`f64` for eigensolvers,
/// `Complex64` for time evolution).
pub trait Amplitude:
    Copy + Send + Sync + Zero + Add<Output = Self> + AddAssign + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl<T> Amplitude for T where
    T: Copy + Send + Sync + Zero + Add<Output = T> + AddAssign + Sub<Output = T> + Mul<f64, Output = T>
{
}

/// `H(s) = (1 - s) H_i + s H_p` with a diagonal problem part.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchHamiltonian {
    problem: DiagonalOperator,
    g: f64,
    kind: ProblemKind,
    initial: InitialForm,
}

impl SearchHamiltonian {
    /// Bit-sum problem Hamiltonian with a transverse-field driver.
    pub fn bit_sum(db: &Database, t: SearchTarget, g: f64) -> Result<Self> {
        check_g(g)?;
        Ok(SearchHamiltonian {
            problem: problem_hamiltonian(db, t)?,
            g,
            kind: ProblemKind::BitSum,
            initial: InitialForm::TransverseField,
        })
    }

    /// Full-value problem Hamiltonian with a transverse-field driver.
    pub fn full_value(db: &Database, t: SearchTarget, g: f64) -> Result<Self> {
        check_g(g)?;
        Ok(SearchHamiltonian {
            problem: problem_hamiltonian_fullvalue(db, t)?,
            g,
            kind: ProblemKind::FullValue,
            initial: InitialForm::TransverseField,
        })
    }

    /// Marked-state baseline on `n` qubits. `g` only matters for the
    /// transverse-field driver.
    pub fn msas(n: u32, marked: usize, initial: InitialForm, g: f64) -> Result<Self> {
        if n == 0 || n > crate::database::MAX_BITS {
            return Err(Error::bounds("n", n, format!("1..={}", crate::database::MAX_BITS)));
        }
        let size = 1usize << n;
        if marked >= size {
            return Err(Error::bounds("marked index", marked, format!("0..{size}")));
        }
        check_g(g)?;
        let mut diag = vec![1.0; size];
        diag[marked] = 0.0;
        Ok(SearchHamiltonian {
            problem: DiagonalOperator::new(diag)?,
            g,
            kind: ProblemKind::Msas { marked },
            initial,
        })
    }

    /// Arbitrary diagonal problem part.
    pub fn custom(problem: DiagonalOperator, g: f64, initial: InitialForm) -> Result<Self> {
        check_g(g)?;
        Ok(SearchHamiltonian {
            problem,
            g,
            kind: ProblemKind::Custom,
            initial,
        })
    }

    /// Replaces the driver form.
    pub fn with_initial_form(mut self, initial: InitialForm) -> Self {
        self.initial = initial;
        self
    }

    /// Same Hamiltonian with `c·I` added to the problem part.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        let diag = self.problem.diag().iter().map(|d| d + c).collect();
        Ok(SearchHamiltonian {
            problem: DiagonalOperator::new(diag)?,
            ..self.clone()
        })
    }

    pub fn problem(&self) -> &DiagonalOperator {
        &self.problem
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn initial_form(&self) -> InitialForm {
        self.initial
    }

    pub fn n(&self) -> u32 {
        self.problem.n_bits()
    }

    pub fn dim(&self) -> usize {
        self.problem.len()
    }

    /// Ground state of the driver: `(-1)^{popcount(j)} / √N` for the
    /// transverse field, the uniform superposition for the projector.
    pub fn initial_state(&self) -> WaveState {
        initial_state(self.n(), self.initial)
    }

    /// Upper bound on `‖H(s)‖` over `s ∈ [0, 1]`.
    pub fn norm_bound(&self) -> f64 {
        let driver = match self.initial {
            InitialForm::TransverseField => f64::from(self.n()) * self.g,
            InitialForm::UniformProjector => 1.0,
        };
        driver.max(self.problem.max_abs())
    }

    /// `out = H(s) ψ`, without forming a matrix.
    pub fn apply<T: Amplitude>(&self, s: f64, psi: &[T], out: &mut [T]) -> Result<()> {
        for len in [psi.len(), out.len()] {
            if len != self.dim() {
                return Err(Error::Dimension {
                    expected: self.dim(),
                    found: len,
                });
            }
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::bounds("s", s, "[0, 1]"));
        }
        self.apply_unchecked(s, psi, out);
        Ok(())
    }

    pub(crate) fn apply_unchecked<T: Amplitude>(&self, s: f64, psi: &[T], out: &mut [T]) {
        let diag = self.problem.diag();
        for ((o, &p), &d) in out.iter_mut().zip(psi).zip(diag) {
            *o = p * (s * d);
        }
        let w = 1.0 - s;
        if w == 0.0 {
            return;
        }
        match self.initial {
            InitialForm::TransverseField => {
                let coupling = w * self.g;
                for j in 0..self.n() {
                    let stride = 1usize << j;
                    // Pairs (x, x | stride) with bit j of x clear.
                    for block in (0..psi.len()).step_by(2 * stride) {
                        for x in block..block + stride {
                            let y = x + stride;
                            out[x] += psi[y] * coupling;
                            out[y] += psi[x] * coupling;
                        }
                    }
                }
            }
            InitialForm::UniformProjector => {
                let total = psi.iter().fold(T::zero(), |acc, &p| acc + p);
                let mean = total * (1.0 / psi.len() as f64);
                for (o, &p) in out.iter_mut().zip(psi) {
                    *o += (p - mean) * w;
                }
            }
        }
    }

    /// Dense `H(s)`; meant for `n ≤ 12`.
    pub fn dense_matrix(&self, s: f64) -> DMatrix<f64> {
        let dim = self.dim();
        let w = 1.0 - s;
        let mut m = DMatrix::zeros(dim, dim);
        match self.initial {
            InitialForm::TransverseField => {
                for x in 0..dim {
                    for j in 0..self.n() {
                        m[(x, x ^ (1 << j))] = w * self.g;
                    }
                }
            }
            InitialForm::UniformProjector => {
                let u = w / dim as f64;
                m.fill(-u);
                for x in 0..dim {
                    m[(x, x)] += w;
                }
            }
        }
        for (x, d) in self.problem.diag().iter().enumerate() {
            m[(x, x)] += s * d;
        }
        m
    }
}

fn check_g(g: f64) -> Result<()> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::bounds("g", g, "(0, inf)"));
    }
    Ok(())
}

/// Ground state of the chosen driver on `n` qubits.
pub fn initial_state(n: u32, form: InitialForm) -> WaveState {
    let size = 1usize << n;
    let a = 1.0 / (size as f64).sqrt();
    let amplitudes = (0..size)
        .map(|j| match form {
            InitialForm::TransverseField if j.count_ones() % 2 == 1 => Complex64::new(-a, 0.0),
            _ => Complex64::new(a, 0.0),
        })
        .collect();
    WaveState::from_amplitudes(amplitudes)
}
