use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside its admissible range.
    #[error("{what} = {value} is out of range ({allowed})")]
    Bounds {
        what: &'static str,
        value: String,
        allowed: String,
    },

    /// An operator or profile argument violated its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data (usually a database file) violated a structural invariant.
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("integration failed at t = {last_good_t}: {reason}")]
    Integration { last_good_t: f64, reason: String },

    #[error("eigensolver did not converge at s = {s} (residual {residual:e})")]
    NonConvergence { s: f64, residual: f64 },

    #[error("degenerate ground state at s = {s} (gap {gap:e})")]
    Degeneracy { s: f64, gap: f64 },

    /// The time search never hit the success window. Carries every
    /// `(T, probability)` probe.
    #[error("success window [{lo}, {hi}] not reached after {} probes", probes.len())]
    SearchFailure { lo: f64, hi: f64, probes: Vec<(f64, f64)> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn bounds(what: &'static str, value: impl ToString, allowed: impl ToString) -> Self {
        Error::Bounds {
            what,
            value: value.to_string(),
            allowed: allowed.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
