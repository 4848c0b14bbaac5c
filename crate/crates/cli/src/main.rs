use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grover_lab::LabError;

mod commands;
mod config;
mod output;
mod svg;

use config::{CommonArgs, DiscriminateArgs, ParallelArgs};

/// Numerical checks of Grover search and its query lower bound.
#[derive(Parser, Debug)]
#[command(name = "grover-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Success probability per iteration: full simulation against the closed form.
    Simulate(CommonArgs),
    /// Divergence sum of Grover's runs against the crude and improved bounds.
    Bounds(CommonArgs),
    /// Bounds for S parallel oracles, and the split-the-space baseline.
    Parallel {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        extra: ParallelArgs,
    },
    /// Distance sums of Grover's final states and random soundness trials.
    Discriminate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        extra: DiscriminateArgs,
    },
    /// Stop-and-restart strategy against running to the optimum.
    Restart(CommonArgs),
    /// Every verification check, one PASS/FAIL line each.
    VerifyAll(CommonArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(anyhow::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Internal(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Internal(e)
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        // errors caused by the requested parameters are usage errors
        match e {
            LabError::InvalidDimension(_)
            | LabError::MarkedOutOfRange { .. }
            | LabError::ProbabilityOutOfRange { .. }
            | LabError::CapExceeded { .. }
            | LabError::UnevenPartition { .. }
            | LabError::Unreachable { .. } => CliError::Usage(e.to_string()),
            other => CliError::Internal(other.into()),
        }
    }
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Clean,
    Failed(String),
}

fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Simulate(c) => commands::simulate(&config::merge(&c, None, None)?),
        Command::Bounds(c) => commands::bounds(&config::merge(&c, None, None)?),
        Command::Parallel { common, extra } => commands::parallel(&config::merge(&common, Some(&extra), None)?),
        Command::Discriminate { common, extra } => {
            commands::discriminate(&config::merge(&common, None, Some(&extra))?)
        }
        Command::Restart(c) => commands::restart(&config::merge(&c, None, None)?),
        Command::VerifyAll(c) => commands::verify_all(&config::merge(&c, None, None)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Failed(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
