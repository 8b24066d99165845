//! `seqhop`: batch front end for sequential frame retrieval.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod failure;

use failure::Failure;

/// Sequential retrieval of frame sequences with a time-indexed dense associative memory.
#[derive(Debug, Parser)]
#[command(name = "seqhop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Retrieve a frame sequence and report per-frame accuracy.
    Retrieve(RetrieveArgs),
    /// Write a seeded synthetic sequence to disk.
    Synth(SynthArgs),
    /// Tabulate the global-minimum condition and its critical values.
    Stability(StabilityArgs),
    /// Sample the planar energy surface on a grid at chosen times.
    Landscape(LandscapeArgs),
    /// Score a retrieved directory against the originals.
    Eval(EvalArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// TOML file with default values for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// `ppm` or `raw`.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long = "lambda-f", allow_negative_numbers = true)]
    pub lambda_f: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RetrieveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// First frame of the window, counting from 1.
    #[arg(long = "p")]
    pub p: Option<usize>,
    /// Number of frames in the window.
    #[arg(long = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    #[arg(long = "step-size")]
    pub step_size: Option<f64>,
    #[arg(long = "line-search")]
    pub line_search: Option<bool>,
    /// Retrieval counts when the frame MSE is below this.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Consecutive-frame MSE above this counts as a scene change.
    #[arg(long = "scene-threshold")]
    pub scene_threshold: Option<f64>,
    /// Store every optimizer energy trace in the report.
    #[arg(long = "record-traces")]
    pub record_traces: Option<bool>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub channels: Option<usize>,
    #[arg(long)]
    pub drift: Option<f64>,
    /// Comma-separated frame indices that start a new scene.
    #[arg(long, value_delimiter = ',')]
    pub cuts: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated λ values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambdas: Option<Vec<f64>>,
    /// λ_f grid as `start:stop:count`.
    #[arg(long = "lambda-f-range")]
    pub lambda_f_range: Option<String>,
    /// Exponent of the denominator: `2` or `3`.
    #[arg(long)]
    pub variant: Option<String>,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated times at which to sample the surface.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// `resolution` or `x_min,x_max,y_min,y_max,resolution`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Directory of retrieved frames to score against `--input`.
    #[arg(long)]
    pub retrieved: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("SEQHOP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| {
            Failure::config(format!(
                "SEQHOP_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::config(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Retrieve(args) => commands::retrieve(args),
        Command::Synth(args) => commands::synth(args),
        Command::Stability(args) => commands::stability(args),
        Command::Landscape(args) => commands::landscape(args),
        Command::Eval(args) => commands::eval(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                failure::EXIT_CONFIG
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("seqhop: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
