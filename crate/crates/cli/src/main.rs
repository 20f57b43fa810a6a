//! Command-line driver for the multi-modal attack detector.
//!
//! Subcommands: `generate`, `train`, `eval`, `gradcheck`, `ablation`. Every
//! command reads one JSON config (`--config`), is deterministic given that
//! config (timestamps aside), and uses a stable exit-code contract:
//!
//! - 0: success
//! - 2: usage error, invalid config, or missing input
//! - 3: numerical abort (loss became non-finite during training)
//! - 4: verification failure (gradient check out of tolerance)

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fuseids_core::Error;

use crate::config::RunConfig;

/// Failures that map onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// A pipeline error from the core library; exit 3 for a numerical abort,
    /// exit 2 otherwise.
    Core(Error),
    /// Bad configuration or missing input; exit 2.
    Config(String),
    /// A verification command found a real discrepancy; exit 4.
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::NanLoss { .. }) => 3,
            CliError::Core(_) | CliError::Config(_) => 2,
            CliError::Verification(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Config(msg) | CliError::Verification(msg) => f.write_str(msg),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fuseids",
    version,
    about = "Multi-modal cyber-attack detection for industrial control systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides both the training seed and the generator seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OutArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Directory the command writes its artifacts into.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic two-modality dataset (sensor.csv, network.csv, spec.json).
    Generate(OutArgs),
    /// Preprocess, train, and write checkpoint.json, stats.json, loss.csv.
    Train(OutArgs),
    /// Evaluate a checkpoint on the test split and write report.json, report.csv.
    Eval(OutArgs),
    /// Verify analytic gradients against central finite differences.
    Gradcheck(CommonArgs),
    /// Train and evaluate multi, sensor-only, and network-only with one seed.
    Ablation(OutArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => {
            let config = load(&args.common)?;
            commands::cmd_generate(&config, &args.out)
        }
        Command::Train(args) => {
            let config = load(&args.common)?;
            commands::cmd_train(&config, &args.out)
        }
        Command::Eval(args) => {
            let config = load(&args.common)?;
            commands::cmd_eval(&config, &args.out)
        }
        Command::Gradcheck(args) => {
            let config = load(&args)?;
            commands::cmd_gradcheck(&config)
        }
        Command::Ablation(args) => {
            let config = load(&args.common)?;
            commands::cmd_ablation(&config, &args.out)
        }
    }
}

fn load(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&common.config)?;
    config.override_seed(common.seed);
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
