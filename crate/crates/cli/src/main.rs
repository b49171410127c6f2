//! `ambisec` — run seeded experiment sweeps over the ambiguous-security-game
//! solvers, or solve one explicit game file for inspection.

mod config;
mod run;
mod solve;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "ambisec",
    version,
    about = "Security-game simulator under ambiguous beliefs: CEU solver vs \
             Dempster-Shafer and uniform-random baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run a sweep of seeded trials and write results.csv, metrics.json and
    /// manifest.json into the output directory.
    Run(run::RunArgs),
    /// Solve one game description file with every solver and print the
    /// comparison as JSON on stdout.
    Solve(solve::SolveArgs),
}

/// Usage/config problems exit 2, I/O problems exit 3.
pub(crate) enum AppError {
    Usage(String),
    Io(String),
}

impl AppError {
    pub(crate) fn io(context: &str, err: std::io::Error) -> Self {
        AppError::Io(format!("{context}: {err}"))
    }
}

pub(crate) type AppResult<T> = Result<T, AppError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run::cmd_run(args),
        Command::Solve(args) => solve::cmd_solve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
