//! Simulator for adiabatic search over unsorted databases.
//!
//! A database of `N = 2^n` distinct `n`-bit values is stored in the strength of
//! a diagonal problem Hamiltonian over the `n` index qubits. The system is
//! prepared in the ground state of a transverse-field driver and evolved under
//!
//! ```text
//! H(s) = (1 - s) H_i + s H_p,    s = s(t), s(0) = 0, s(T) = 1
//! ```
//!
//! so that, for slow enough evolution, the final state concentrates on the
//! index whose value matches the target.
//!
//! The crate is organised by stage:
//!
//! * [`database`]: instances, bit operators, JSON persistence.
//! * [`hamiltonian`]: problem/driver construction and matrix-free application.
//! * [`evolution`]: adaptive Runge-Kutta integration of the Schrödinger equation.
//! * [`spectrum`]: instantaneous levels and the minimum gap.
//! * [`analysis`]: time-to-window search, scaling sweeps, exponent fits and the
//!   Hamming-ball complexity estimator.
//!
//! Sweeps and spectrum grids run through [`Exec`], which uses rayon when the
//! `parallel` feature is enabled and a plain loop otherwise.

pub mod analysis;
pub mod database;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod hamiltonian;
pub mod io;
pub mod lanczos;
pub mod spectrum;

pub use analysis::{
    fit_alpha, perturbative_cardinalities, run_scaling_experiment, Algorithm, PerturbativeEstimate, PerturbativeParams,
    ScalingFit, ScalingRecord, SweepConfig, SweepOutcome, WindowSearch,
};
pub use database::{bit_operator, complement, random_database, Database, SearchTarget};
pub use error::{Error, Result};
pub use evolution::{evolve, EvolutionOptions, EvolutionResult, Schedule, WaveState};
pub use exec::Exec;
pub use hamiltonian::{DiagonalOperator, InitialForm, ProblemKind, SearchHamiltonian};
pub use spectrum::{instantaneous_spectrum, min_gap, GapSummary, SpectrumProfile};
