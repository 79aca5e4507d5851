//! `adsearch`: run adiabatic database searches, spectra, scaling sweeps and
//! Hamming-ball estimates from the command line.
//!
//! Exit codes: 0 success, 2 best match only (target absent), 3 bad input,
//! 4 argument out of range, 5 numerical failure, 6 insufficient data.

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;

use args::{Cli, Command};

pub const EXIT_OK: u8 = 0;
pub const EXIT_BEST_MATCH: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_RANGE: u8 = 4;
pub const EXIT_NUMERIC: u8 = 5;
pub const EXIT_INSUFFICIENT: u8 = 6;

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<adsearch_core::Error> for Failure {
    fn from(e: adsearch_core::Error) -> Self {
        use adsearch_core::Error as E;
        let code = match &e {
            E::Validation(_) | E::Io { .. } | E::Json { .. } | E::Csv { .. } => EXIT_INPUT,
            E::Bounds { .. } | E::Domain(_) | E::Dimension { .. } => EXIT_RANGE,
            E::Integration { .. } | E::NonConvergence { .. } | E::Degeneracy { .. } | E::SearchFailure { .. } => {
                EXIT_NUMERIC
            }
            E::InsufficientData(_) => EXIT_INSUFFICIENT,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors; usage errors are bad input.
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Search(a) => commands::search(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Scaling(a) => commands::scaling(&a),
        Command::Perturbative(a) => commands::perturbative(&a),
        Command::GenDb(a) => commands::gen_db(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
