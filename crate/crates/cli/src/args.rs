use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "adsearch", version, about = "Adiabatic search in unsorted databases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one search instance and report the success probability.
    Search(SearchArgs),
    /// Tabulate the lowest levels of H(s) and locate the minimum gap.
    Spectrum(SpectrumArgs),
    /// Time-to-window sweep over random instances and power-law fits.
    Scaling(ScalingArgs),
    /// Hamming-ball sizes |S+|, |S-| and the implied exponent.
    Perturbative(PerturbativeArgs),
    /// Write a random permutation database to a JSON file.
    GenDb(GenDbArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Bitsum,
    Fullvalue,
    Msas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialArg {
    /// g Σ σ_x on every qubit.
    Transverse,
    /// I - |u⟩⟨u| with u the uniform superposition.
    Projector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Linear,
    GapAdaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Auto,
    Dense,
    Lanczos,
}

/// Which instance to build: a database file or a random one from `--n/--seed`.
#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Database JSON file, e.g. {"n": 3, "values": [6,3,5,0,4,1,7,2]}.
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Index width for a random database (ignored with --db).
    #[arg(long)]
    pub n: Option<u32>,
    /// Seed for the random database.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Value to search for.
    #[arg(long)]
    pub target: Option<u32>,
    #[arg(long, value_enum, default_value = "bitsum")]
    pub algorithm: AlgorithmArg,
    /// Marked index for msas (defaults to the index holding --target).
    #[arg(long)]
    pub marked: Option<usize>,
    /// Driver Hamiltonian (default: transverse, or projector for msas).
    #[arg(long, value_enum)]
    pub initial: Option<InitialArg>,
    /// Transverse coupling strength.
    #[arg(long, default_value_t = 0.5)]
    pub g: f64,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Total evolution time.
    #[arg(long = "T", default_value_t = 100.0)]
    pub total_time: f64,
    /// Double T (starting from --T) until the success probability reaches this value.
    #[arg(long)]
    pub target_probability: Option<f64>,
    #[arg(long, value_enum, default_value = "linear")]
    pub schedule: ScheduleArg,
    /// Integration error budget.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Number of evenly spaced trajectory samples.
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// Trajectory CSV (t,s,p_0,...,p_{N-1}).
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Long-format trajectory CSV (t,s,index,probability) for plotting.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Result summary JSON (always printed to stdout as well).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Number of lowest levels per grid point (at least 2).
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    /// Uniform grid points on [0, 1].
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub solver: SolverArg,
    /// Spectrum CSV (s,E_0,...,E_{k-1}); printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gap summary JSON; printed to stdout (or stderr when the CSV is) when absent.
    #[arg(long)]
    pub gap_out: Option<PathBuf>,
    /// Long-format CSV (s,level,energy) for plotting.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Worker threads for the grid.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Inclusive width range, e.g. 5..11 (or a single width).
    #[arg(long = "n", default_value = "5..11")]
    pub n_range: String,
    /// Instances per width (capped at 2^n).
    #[arg(long, default_value_t = 20)]
    pub instances: u32,
    /// Comma-separated list of bitsum, msas.
    #[arg(long, default_value = "bitsum,msas")]
    pub algorithms: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub g: f64,
    /// Driver for the msas baseline.
    #[arg(long, value_enum, default_value = "projector")]
    pub msas_initial: InitialArg,
    /// Integration error budget per probe.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// First probed evolution time.
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 0.12)]
    pub window_lo: f64,
    #[arg(long, default_value_t = 0.13)]
    pub window_hi: f64,
    /// Records CSV (algorithm,n,instance,seed,T_star,success_prob,steps).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fit summaries as a JSON array (always printed to stdout as well).
    #[arg(long)]
    pub fit_out: Option<PathBuf>,
    /// Worker threads (1 runs sequentially).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PerturbativeArgs {
    #[arg(long)]
    pub n: u32,
    /// Hamming radius cutoff m_c (default 2).
    #[arg(long)]
    pub mc: Option<f64>,
    /// Energy cutoff E_c (default ceil(n/4)).
    #[arg(long)]
    pub ec: Option<f64>,
    /// Derive cutoffs as m_c = cm·Ω, E_c = ce/Ω.
    #[arg(long, conflicts_with_all = ["mc", "ec"])]
    pub omega: Option<f64>,
    /// Derive Ω = ln(1/δ)/ln ζ(s*+ε0) from δ (needs --eps0).
    #[arg(long, conflicts_with_all = ["mc", "ec", "omega"], requires = "eps0")]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub s_star: f64,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub cm: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ce: f64,
    /// JSON output file (always printed to stdout as well).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenDbArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `a..b` or `a..=b` (both inclusive) or a single width.
pub fn parse_n_range(text: &str) -> Result<Vec<u32>, String> {
    let text = text.trim();
    let parse = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| format!("bad width '{s}' in --n {text}"))
    };
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(text)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty width range {text}"));
    }
    Ok((lo..=hi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_ranges() {
        assert_eq!(parse_n_range("5..9").unwrap(), vec![5, 6, 7, 8, 9]);
        assert_eq!(parse_n_range("5..=6").unwrap(), vec![5, 6]);
        assert_eq!(parse_n_range("5..5").unwrap(), vec![5]);
        assert_eq!(parse_n_range("7").unwrap(), vec![7]);
        assert!(parse_n_range("9..5").is_err());
        assert!(parse_n_range("a..5").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
