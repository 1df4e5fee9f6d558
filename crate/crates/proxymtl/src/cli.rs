//! Command-line front end: `fit` and `tune` operate on bundle directories,
//! `experiment` runs a named simulation scenario to a results CSV.
//!
//! Exit codes: 0 success, 1 input error (bad arguments, malformed bundle,
//! unknown scenario), 2 solver hit the iteration cap without converging.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use serde::Serialize;

use crate::bundle::{FitConfig, PenaltySpec, StepSize};
use crate::error::{Error, Result};
use crate::experiments::{run_experiment, write_results_csv, ExperimentConfig, ScenarioKind};
use crate::io;
use crate::solver::{fit, fit_path, FitResult};
use crate::tuning::{default_grid, holdout_select, lepski_select};

#[derive(Parser)]
#[command(
    name = "proxymtl",
    version,
    about = "Penalized multi-task regression from summary statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one penalized model on a bundle directory.
    Fit(FitArgs),
    /// Select the penalty level on a bundle directory.
    Tune(TuneArgs),
    /// Run a named simulation scenario and write long-format results CSV.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PenaltyArg {
    /// Row-group ℓ2,1 penalty.
    Sparse,
    /// Nuclear norm penalty.
    Lowrank,
}

impl From<PenaltyArg> for PenaltySpec {
    fn from(p: PenaltyArg) -> PenaltySpec {
        match p {
            PenaltyArg::Sparse => PenaltySpec::GroupSparse,
            PenaltyArg::Lowrank => PenaltySpec::LowRank,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Adaptive pairwise-comparison selection; no labelled data needed.
    Lepski,
    /// Squared-error minimization on a labelled hold-out directory.
    Holdout,
}

#[derive(Args)]
struct FitArgs {
    /// Bundle directory (manifest.json plus per-task CSV files).
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long, value_enum)]
    penalty: PenaltyArg,
    /// Penalty level λ ≥ 0.
    #[arg(long)]
    lambda: f64,
    /// Step size: "auto" (1/L) or a positive number.
    #[arg(long, default_value = "auto")]
    step: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 50_000)]
    max_iters: usize,
    /// Coefficient CSV output; a JSON sidecar is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long, value_enum)]
    penalty: PenaltyArg,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Adaptive selection constant C̄.
    #[arg(long, default_value_t = 1.0)]
    cbar: f64,
    #[arg(long, default_value_t = 10)]
    grid_size: usize,
    /// Smallest grid λ as a fraction of the zero-forcing λ.
    #[arg(long, default_value_t = 0.01)]
    grid_min_ratio: f64,
    /// Hold-out directory with per-task x_Q.csv / y_Q.csv files (required for
    /// --method holdout).
    #[arg(long)]
    holdout: Option<PathBuf>,
    /// JSON report output; the gap matrix or error curve goes to the same path
    /// with a .csv extension.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of: tau-sweep, rho-sweep, misspec-sweep, tuning-compare,
    /// single-vs-multi.
    #[arg(long)]
    scenario: String,
    #[arg(long, value_enum)]
    penalty: PenaltyArg,
    /// Replications (defaults to the config file value or 20).
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed (defaults to the config file value).
    #[arg(long)]
    seed: Option<u64>,
    /// Results CSV output.
    #[arg(long)]
    out: PathBuf,
    /// JSON file overriding any subset of the experiment settings.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Parses arguments and dispatches; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Tune(args) => cmd_tune(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn parse_step(step: &str) -> Result<StepSize> {
    if step == "auto" {
        return Ok(StepSize::Auto);
    }
    let v: f64 = step
        .parse()
        .map_err(|_| Error::InvalidKind(format!("step must be \"auto\" or a number, got \"{step}\"")))?;
    Ok(StepSize::Fixed(v))
}

#[derive(Serialize)]
struct FitSidecar {
    converged: bool,
    iterations: usize,
    lambda: f64,
    objective: f64,
}

fn cmd_fit(args: FitArgs) -> Result<i32> {
    let bundle = io::load_bundle(&args.bundle)?;
    let config = FitConfig {
        step_size: parse_step(&args.step)?,
        max_iters: args.max_iters,
        tol: args.tol,
    };
    let result = fit(&bundle, args.penalty.into(), args.lambda, &config)?;
    io::write_matrix_csv(&args.out, result.coef.values())?;
    let sidecar = FitSidecar {
        converged: result.converged,
        iterations: result.iterations,
        lambda: result.lambda,
        objective: result.objective(),
    };
    io::write_json(&args.out.with_extension("json"), &sidecar)?;
    Ok(if result.converged { 0 } else { 2 })
}

fn load_holdout(dir: &std::path::Path, num_tasks: usize) -> Result<Vec<(Array2<f64>, ndarray::Array1<f64>)>> {
    let mut sets = Vec::with_capacity(num_tasks);
    for q in 0..num_tasks {
        let x = io::read_matrix_csv(&dir.join(format!("x_{q}.csv")))?;
        let y = io::read_vector_csv(&dir.join(format!("y_{q}.csv")))?;
        sets.push((x, y));
    }
    Ok(sets)
}

fn path_converged(path: &[FitResult]) -> bool {
    path.iter().all(|r| r.converged)
}

fn cmd_tune(args: TuneArgs) -> Result<i32> {
    let bundle = io::load_bundle(&args.bundle)?;
    let spec: PenaltySpec = args.penalty.into();
    let grid = default_grid(&bundle, spec, args.grid_size, args.grid_min_ratio)?;
    let path = fit_path(&bundle, spec, &grid, &FitConfig::default())?;
    let csv_out = args.out.with_extension("csv");

    match args.method {
        MethodArg::Lepski => {
            let report = lepski_select(&bundle, &path, args.cbar)?;
            let summary = serde_json::json!({
                "method": "lepski",
                "penalty": spec.label(),
                "cbar": report.cbar,
                "grid": grid,
                "feasible": report.feasible,
                "chosen_index": report.chosen_index,
                "chosen_lambda": report.chosen_lambda,
                "converged": path_converged(&path),
            });
            io::write_json(&args.out, &summary)?;
            io::write_matrix_csv(&csv_out, &report.pairwise_gaps)?;
        }
        MethodArg::Holdout => {
            let dir = args.holdout.as_deref().ok_or_else(|| {
                Error::InvalidKind("--method holdout requires --holdout DIR".into())
            })?;
            let sets = load_holdout(dir, bundle.num_tasks())?;
            let (chosen, errors) = holdout_select(&path, &sets)?;
            let summary = serde_json::json!({
                "method": "holdout",
                "penalty": spec.label(),
                "grid": grid,
                "errors": errors,
                "chosen_index": chosen,
                "chosen_lambda": grid[chosen],
                "converged": path_converged(&path),
            });
            io::write_json(&args.out, &summary)?;
            let mut w = csv::Writer::from_path(&csv_out)
                .map_err(|e| Error::InvalidKind(format!("CSV write: {e}")))?;
            w.write_record(["lambda", "error"])
                .map_err(|e| Error::InvalidKind(format!("CSV write: {e}")))?;
            for (lam, err) in grid.iter().zip(&errors) {
                w.serialize((lam, err))
                    .map_err(|e| Error::InvalidKind(format!("CSV write: {e}")))?;
            }
            w.flush()?;
        }
    }
    Ok(if path_converged(&path) { 0 } else { 2 })
}

fn cmd_experiment(args: ExperimentArgs) -> Result<i32> {
    let kind = ScenarioKind::parse(&args.scenario)?;
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::from_read(e, path))?;
            serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| Error::ParseError {
                path: path.clone(),
                msg: e.to_string(),
            })?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(reps) = args.reps {
        config.reps = reps;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let rows = run_experiment(kind, args.penalty.into(), &config)?;
    let file = std::fs::File::create(&args.out)?;
    write_results_csv(&rows, std::io::BufWriter::new(file))?;
    Ok(0)
}
