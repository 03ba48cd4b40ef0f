//! Experiment CLI: run memory-experiment grids, enumerate failure counts,
//! emit theory curves, and analyze result files.
//!
//! Exit codes: 0 success, 2 configuration or pole violation, 3 enumeration
//! budget exceeded, 4 missing artifact.

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod analyze;
mod artifacts;
mod config;
mod enumerate;
mod predict;
mod results;
mod run;

use config::{EstimatorChoice, ExperimentConfig, Mode, PGrid};
use pecmem::{CodeKind, NoiseKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("p = {p} is at or beyond the pole {pole:.5} for d = {d}; PEC is invalid there")]
    Pole { p: f64, pole: f64, d: usize },
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("missing artifact: {0}")]
    MissingArtifact(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Pole { .. } => 2,
            CliError::Budget(_) => 3,
            CliError::MissingArtifact(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pecmem",
    about = "Memory experiments on repetition/rotated-surface codes with physical-level probabilistic error cancellation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured (code, d, p, noise) grid and write results.
    Run(RunArgs),
    /// Enumerate failure counts D_k into a cached JSON artifact.
    Enumerate(EnumerateArgs),
    /// Emit theory curves for overlay with simulation results.
    Predict(PredictArgs),
    /// Fit slopes, thresholds, overhead, and negativity from results.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config JSON; flags below override its fields.
    #[arg(long)]
    config: std::path::PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<String>,
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    estimator: Option<String>,
    #[arg(long)]
    identity_shots: Option<u64>,
    #[arg(long)]
    superbranch_shots: Option<u64>,
    #[arg(long)]
    naive_shots: Option<u64>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, value_parser = parse_code)]
    code: CodeKind,
    #[arg(long)]
    distance: usize,
    /// Lowest weight to enumerate (defaults to omega).
    #[arg(long)]
    k_min: Option<usize>,
    /// Highest weight to enumerate (defaults to omega + 3).
    #[arg(long)]
    k_max: Option<usize>,
    /// Cap on C(N, k) for exhaustive enumeration.
    #[arg(long, default_value_t = pecmem::analytics::DEFAULT_ENUMERATION_BUDGET)]
    budget: u128,
    /// Fall back to Monte Carlo with this many shots past the budget.
    #[arg(long)]
    monte_carlo: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Failure-count artifact (required for surface codes).
    #[arg(long)]
    counts: Option<std::path::PathBuf>,
    #[arg(long, value_parser = parse_code)]
    code: CodeKind,
    #[arg(long)]
    distance: usize,
    #[arg(long, value_parser = parse_noise)]
    noise: NoiseKind,
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    /// Results file providing sampled superbranch rates for the s-fit.
    #[arg(long)]
    results: Option<std::path::PathBuf>,
    #[arg(long)]
    out: std::path::PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// results.csv or results.json produced by `run`.
    #[arg(long)]
    results: std::path::PathBuf,
    /// Optional JSON report destination.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn parse_code(s: &str) -> Result<CodeKind, String> {
    match s {
        "repetition" => Ok(CodeKind::Repetition),
        "rotated_surface" => Ok(CodeKind::RotatedSurface),
        other => Err(format!("unknown code {other:?}")),
    }
}

fn parse_noise(s: &str) -> Result<NoiseKind, String> {
    match s {
        "bit_flip" => Ok(NoiseKind::BitFlip),
        "depolarizing" => Ok(NoiseKind::Depolarizing),
        other => Err(format!("unknown noise {other:?}")),
    }
}

fn parse_mode(s: &str) -> Result<Mode, CliError> {
    match s {
        "unmitigated" => Ok(Mode::Unmitigated),
        "pec" => Ok(Mode::Pec),
        "both" => Ok(Mode::Both),
        other => Err(CliError::Config(format!("unknown mode {other:?}"))),
    }
}

fn parse_estimator(s: &str) -> Result<EstimatorChoice, CliError> {
    match s {
        "stratified" => Ok(EstimatorChoice::Stratified),
        "naive" => Ok(EstimatorChoice::Naive),
        "both" => Ok(EstimatorChoice::Both),
        other => Err(CliError::Config(format!("unknown estimator {other:?}"))),
    }
}

fn apply_overrides(config: &mut ExperimentConfig, args: &RunArgs) -> Result<(), CliError> {
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(dir) = &args.out_dir {
        config.out_dir = dir.clone();
    }
    if let Some(d) = &args.distances {
        config.distances = d.clone();
    }
    if let Some(p) = &args.p {
        config.p_grid = PGrid::List(p.clone());
    }
    if let Some(mode) = &args.mode {
        config.mode = parse_mode(mode)?;
    }
    if let Some(est) = &args.estimator {
        config.estimator = parse_estimator(est)?;
    }
    if let Some(v) = args.identity_shots {
        config.identity_shots = v;
    }
    if let Some(v) = args.superbranch_shots {
        config.superbranch_shots = v;
    }
    if let Some(v) = args.naive_shots {
        config.naive_shots = v;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let mut config = ExperimentConfig::load(&args.config)?;
            apply_overrides(&mut config, &args)?;
            run::cmd_run_to_files(&config)
        }
        Command::Enumerate(args) => {
            let omega = args.distance.div_ceil(2);
            enumerate::cmd_enumerate(&enumerate::EnumerateRequest {
                code: args.code,
                d: args.distance,
                k_lo: args.k_min.unwrap_or(omega),
                k_hi: args.k_max.unwrap_or(omega + 3),
                budget: args.budget,
                monte_carlo: args.monte_carlo,
                seed: args.seed,
                out: args.out,
            })
        }
        Command::Predict(args) => predict::cmd_predict(&predict::PredictRequest {
            counts: args.counts,
            code: args.code,
            d: args.distance,
            noise: args.noise,
            p_grid: args.p,
            results: args.results,
            out: args.out,
        }),
        Command::Analyze(args) => analyze::cmd_analyze(&args.results, args.out.as_deref()),
    }
}

fn main() {
    // PECMEM_THREADS caps the worker pool; rayon's default otherwise
    if let Ok(threads) = std::env::var("PECMEM_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
