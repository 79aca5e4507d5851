use std::path::Path;

use adsearch_core::analysis::{fit_alpha, perturbative_cardinalities, run_scaling_experiment, sweep_instance};
use adsearch_core::evolution::{make_gap_adaptive_schedule, ResultSummary};
use adsearch_core::io::{
    scaling_csv, scaling_row, sig12, spectrum_csv, trajectory_csv, trajectory_long_csv, write_file,
};
use adsearch_core::spectrum::{uniform_grid, Solver};
use adsearch_core::{
    evolve, instantaneous_spectrum, random_database, Algorithm, Database, Error, EvolutionOptions, EvolutionResult,
    Exec, GapSummary, InitialForm, PerturbativeParams, Schedule, SearchHamiltonian, SearchTarget, SweepConfig,
    WindowSearch,
};

use crate::args::{
    parse_n_range, AlgorithmArg, GenDbArgs, InitialArg, InstanceArgs, PerturbativeArgs, ScalingArgs, ScheduleArg,
    SearchArgs, SolverArg, SpectrumArgs,
};
use crate::{Failure, EXIT_BEST_MATCH, EXIT_INPUT, EXIT_INSUFFICIENT, EXIT_NUMERIC, EXIT_OK, EXIT_RANGE};

type CmdResult = Result<u8, Failure>;

/// Doublings tried by `search --target-probability` before giving up.
const MAX_DOUBLINGS: u32 = 30;

impl From<InitialArg> for InitialForm {
    fn from(a: InitialArg) -> Self {
        match a {
            InitialArg::Transverse => InitialForm::TransverseField,
            InitialArg::Projector => InitialForm::UniformProjector,
        }
    }
}

impl From<SolverArg> for Solver {
    fn from(a: SolverArg) -> Self {
        match a {
            SolverArg::Auto => Solver::Auto,
            SolverArg::Dense => Solver::Dense,
            SolverArg::Lanczos => Solver::Lanczos,
        }
    }
}

struct Instance {
    hamiltonian: SearchHamiltonian,
    n: u32,
    target: Option<u32>,
}

fn load_database(args: &InstanceArgs) -> Result<Option<Database>, Failure> {
    match (&args.db, args.n) {
        (Some(path), _) => Ok(Some(Database::load(path)?)),
        (None, Some(n)) => Ok(Some(random_database(n, args.seed)?)),
        (None, None) => Ok(None),
    }
}

fn build_instance(args: &InstanceArgs) -> Result<Instance, Failure> {
    let db = load_database(args)?;
    match args.algorithm {
        AlgorithmArg::Bitsum | AlgorithmArg::Fullvalue => {
            let db = db.ok_or_else(|| Failure::new(EXIT_INPUT, "a database is required: pass --db or --n"))?;
            let value = args
                .target
                .ok_or_else(|| Failure::new(EXIT_INPUT, "--target is required for bitsum and fullvalue"))?;
            let target = SearchTarget::new(value, db.n())?;
            let h = if args.algorithm == AlgorithmArg::Bitsum {
                SearchHamiltonian::bit_sum(&db, target, args.g)?
            } else {
                SearchHamiltonian::full_value(&db, target, args.g)?
            };
            let h = match args.initial {
                Some(form) => h.with_initial_form(form.into()),
                None => h,
            };
            Ok(Instance {
                n: db.n(),
                target: Some(value),
                hamiltonian: h,
            })
        }
        AlgorithmArg::Msas => {
            let n = db
                .as_ref()
                .map(Database::n)
                .or(args.n)
                .ok_or_else(|| Failure::new(EXIT_INPUT, "msas needs a width: pass --n or --db"))?;
            let marked = match (args.marked, &db, args.target) {
                (Some(m), _, _) => m,
                (None, Some(db), Some(value)) => {
                    SearchTarget::new(value, n)?;
                    db.index_of(value).expect("permutation databases hold every value")
                }
                _ => return Err(Failure::new(EXIT_INPUT, "msas needs --marked or --target")),
            };
            let initial = args.initial.map_or(InitialForm::UniformProjector, Into::into);
            let h = SearchHamiltonian::msas(n, marked, initial, args.g)?;
            Ok(Instance {
                n,
                target: args.target,
                hamiltonian: h,
            })
        }
    }
}

fn exec_for(jobs: Option<usize>) -> Exec {
    match jobs {
        Some(1) => Exec::Sequential,
        _ if cfg!(feature = "parallel") => Exec::Parallel,
        _ => Exec::Sequential,
    }
}

/// Runs `f` on a pool of `jobs` threads (the global pool when unset).
fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce(Exec) -> R + Send) -> Result<R, Failure> {
    if jobs == Some(0) {
        return Err(Failure::new(EXIT_RANGE, "--jobs must be at least 1"));
    }
    let exec = exec_for(jobs);
    #[cfg(feature = "parallel")]
    if let Some(threads) = jobs.filter(|&j| j > 1) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot start {threads} worker threads: {e}")))?;
        return Ok(pool.install(|| f(exec)));
    }
    Ok(f(exec))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = path {
        write_file(path, text)?;
    }
    print!("{text}");
    Ok(())
}

fn check_positive(what: &str, value: f64) -> Result<(), Failure> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_RANGE,
            format!("{what} = {value} must be positive and finite"),
        ))
    }
}

fn schedule_for(args: &SearchArgs, h: &SearchHamiltonian, total_time: f64) -> Result<Schedule, Failure> {
    match args.schedule {
        ScheduleArg::Linear => Ok(Schedule::linear(total_time)?),
        ScheduleArg::GapAdaptive => {
            let grid = uniform_grid(adsearch_core::spectrum::DEFAULT_GRID_POINTS);
            let profile = instantaneous_spectrum(h, &grid, 2, Solver::Auto, exec_for(None))?;
            let gaps = profile.gaps();
            // Rescale so the schedule spends exactly `total_time`.
            let natural = make_gap_adaptive_schedule(&grid, &gaps, 1.0, 1.0)?.total_time();
            Ok(make_gap_adaptive_schedule(&grid, &gaps, 1.0, total_time / natural)?)
        }
    }
}

pub fn search(args: &SearchArgs) -> CmdResult {
    check_positive("T", args.total_time)?;
    check_positive("tol", args.tol)?;
    if let Some(p) = args.target_probability {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Failure::new(
                EXIT_RANGE,
                format!("--target-probability {p} must lie in (0, 1]"),
            ));
        }
    }
    let instance = build_instance(&args.instance)?;
    let h = &instance.hamiltonian;
    let opts = EvolutionOptions {
        tol: args.tol,
        sample_count: args.samples,
        ..EvolutionOptions::default()
    };

    let run = |total_time: f64| -> Result<EvolutionResult, Failure> {
        Ok(evolve(h, &schedule_for(args, h, total_time)?, &opts)?)
    };
    let mut total_time = args.total_time;
    let mut result = run(total_time)?;
    if let Some(p) = args.target_probability {
        let mut doublings = 0;
        while result.success_probability < p {
            if doublings == MAX_DOUBLINGS {
                return Err(Failure::new(
                    EXIT_NUMERIC,
                    format!(
                        "success probability {} < {p} at T = {total_time}",
                        result.success_probability
                    ),
                ));
            }
            total_time *= 2.0;
            doublings += 1;
            result = run(total_time)?;
        }
    }

    if let Some(samples) = &result.trajectory {
        if let Some(path) = &args.trajectory {
            write_file(path, &trajectory_csv(samples))?;
        }
        if let Some(path) = &args.plot_data {
            write_file(path, &trajectory_long_csv(samples))?;
        }
    } else if args.trajectory.is_some() || args.plot_data.is_some() {
        eprintln!("note: --samples 0 records no trajectory; no trajectory file written");
    }
    if !result.is_accurate() {
        eprintln!(
            "warning: norm drift {:e} exceeds the accuracy limit; lower --tol",
            result.norm_drift
        );
    }
    emit(
        &to_json(&ResultSummary::new(instance.n, instance.target, &result)),
        args.out.as_deref(),
    )?;
    match result.best_match {
        Some(energy) => {
            eprintln!(
                "target absent: index {} is the best match (problem energy {energy})",
                result.solution_index
            );
            Ok(EXIT_BEST_MATCH)
        }
        None => Ok(EXIT_OK),
    }
}

pub fn spectrum(args: &SpectrumArgs) -> CmdResult {
    if args.grid < 2 {
        return Err(Failure::new(
            EXIT_RANGE,
            format!("--grid {} needs at least 2 points", args.grid),
        ));
    }
    let instance = build_instance(&args.instance)?;
    let h = &instance.hamiltonian;
    let mut levels = args.levels;
    if levels < 2 {
        eprintln!("note: --levels {levels} raised to 2 so the gap is defined");
        levels = 2;
    }
    if levels > h.dim() {
        eprintln!("note: --levels {levels} lowered to the dimension {}", h.dim());
        levels = h.dim();
    }
    let grid = uniform_grid(args.grid);
    let profile = with_jobs(args.jobs, |exec| {
        instantaneous_spectrum(h, &grid, levels, args.solver.into(), exec)
    })??;
    let summary = GapSummary {
        min_gap: profile.min_gap.expect("two or more levels"),
        s_star: profile.s_star.expect("two or more levels"),
        grid_points: args.grid,
        refined: true,
    };
    let gap_json = to_json(&summary);
    let table = spectrum_csv(&profile);

    if let Some(path) = &args.plot_data {
        let mut long = String::from("s,level,energy\n");
        for (s, row) in profile.s_grid.iter().zip(&profile.levels) {
            for (k, e) in row.iter().enumerate() {
                long.push_str(&format!("{},{k},{}\n", sig12(*s), sig12(*e)));
            }
        }
        write_file(path, &long)?;
    }
    match (&args.out, &args.gap_out) {
        (Some(csv), gap) => {
            write_file(csv, &table)?;
            emit(&gap_json, gap.as_deref())?;
        }
        (None, Some(gap)) => {
            write_file(gap, &gap_json)?;
            print!("{table}");
        }
        (None, None) => {
            print!("{table}");
            eprint!("{gap_json}");
        }
    }
    Ok(EXIT_OK)
}

fn parse_algorithms(text: &str) -> Result<Vec<Algorithm>, Failure> {
    let mut out = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let a: Algorithm = part.parse().map_err(|e: String| Failure::new(EXIT_INPUT, e))?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err(Failure::new(EXIT_INPUT, "--algorithms is empty"));
    }
    Ok(out)
}

pub fn scaling(args: &ScalingArgs) -> CmdResult {
    let n_values = parse_n_range(&args.n_range).map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let algorithms = parse_algorithms(&args.algorithms)?;
    if args.instances == 0 {
        return Err(Failure::new(EXIT_RANGE, "--instances must be at least 1"));
    }
    check_positive("g", args.g)?;
    check_positive("tol", args.tol)?;
    check_positive("t0", args.t0)?;
    let config = SweepConfig {
        n_values,
        instances_per_n: args.instances,
        algorithms,
        seed_base: args.seed,
        g: args.g,
        msas_initial: args.msas_initial.into(),
        window: WindowSearch {
            lo: args.window_lo,
            hi: args.window_hi,
            t0: args.t0,
            ..WindowSearch::default()
        },
        tol: args.tol,
    };
    config.window.validate()?;
    // Surface bad widths before any work is scheduled.
    for &n in &config.n_values {
        sweep_instance(config.seed_base, n, 0)?;
        let used = config.instances_for(n);
        if used < config.instances_per_n {
            eprintln!("note: n = {n} has only {used} distinct targets; running {used} instances");
        }
    }

    let outcome = with_jobs(args.jobs, |exec| {
        run_scaling_experiment(&config, exec, |r| match r {
            Ok(record) => eprintln!("{}", scaling_row(record)),
            Err(f) => eprintln!(
                "failed: {} n={} instance={} seed={}: {}",
                f.algorithm, f.n, f.instance, f.seed, f.message
            ),
        })
    })??;

    if let Some(path) = &args.out {
        write_file(path, &scaling_csv(&outcome.records))?;
    }
    let mut fits = Vec::new();
    let mut short = Vec::new();
    for &a in &config.algorithms {
        match fit_alpha(&outcome.records_for(a)) {
            Ok(mut fit) => {
                fit.algorithm = Some(a);
                fits.push(fit);
            }
            Err(Error::InsufficientData(msg)) => short.push(format!("{a}: {msg}")),
            Err(e) => return Err(e.into()),
        }
    }
    emit(&to_json(&fits), args.fit_out.as_deref())?;
    if !short.is_empty() {
        return Err(Failure::new(EXIT_INSUFFICIENT, short.join("; ")));
    }
    if !outcome.failures.is_empty() {
        eprintln!(
            "warning: {} instance(s) failed; fits use the remaining records",
            outcome.failures.len()
        );
    }
    Ok(EXIT_OK)
}

pub fn perturbative(args: &PerturbativeArgs) -> CmdResult {
    let params = if let Some(delta) = args.delta {
        PerturbativeParams::from_raw(
            delta,
            args.s_star,
            args.eps0.expect("clap enforces --eps0"),
            args.cm,
            args.ce,
        )?
    } else if let Some(omega) = args.omega {
        PerturbativeParams::from_omega(omega, args.cm, args.ce)?
    } else {
        let default = PerturbativeParams::default_for(args.n);
        PerturbativeParams::from_cutoffs(args.mc.unwrap_or(default.m_c), args.ec.unwrap_or(default.e_c))
    };
    let estimate = perturbative_cardinalities(args.n, &params)?;
    emit(&to_json(&estimate), args.out.as_deref())?;
    Ok(EXIT_OK)
}

pub fn gen_db(args: &GenDbArgs) -> CmdResult {
    random_database(args.n, args.seed)?.save(&args.out)?;
    Ok(EXIT_OK)
}
