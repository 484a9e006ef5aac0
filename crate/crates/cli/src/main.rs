//! `qgflow`: simulate coupled quantum flows, run structural checks, decompose generators.

// `!(x > 0)` rejects NaN together with the invalid range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod check;
mod config;
mod decompose;
mod scenario;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Integration(String),
    #[error("{0}")]
    Io(String),
    /// A check or decomposition ran and failed; the payload is the JSON report.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Integration(_) => "integration",
            CliError::Io(_) => "io",
            CliError::Failed(_) => "failed",
        }
    }
}

#[derive(Parser)]
#[command(name = "qgflow", version, about = "Detailed-balance Lindblad flows, GENERIC couplings and their checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write the trajectory as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite and print a JSON report.
    Check {
        suite: Suite,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Decompose the configured generator into building blocks and a tensor coupling.
    Decompose {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    Dbc,
    Cp,
    Nic,
    Identities,
    Gradient,
}

fn threads() -> usize {
    std::env::var("QGFLOW_THREADS").ok().and_then(|v| v.trim().parse().ok()).filter(|&n| n > 0).unwrap_or(1)
}

fn diagnostic(err: &CliError) -> String {
    let msg = serde_json::Value::String(err.to_string());
    format!("{{\"status\":\"error\",\"kind\":\"{}\",\"message\":{msg}}}", err.kind())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads()).build();
    let result = match cli.command {
        Command::Simulate { config, out } => simulate::simulate(&config, &out),
        Command::Check { suite, config, trials, seed, tol } => match pool {
            Ok(pool) => pool.install(|| check::check(suite, &config, trials, seed, tol)),
            Err(e) => Err(CliError::Validation(format!("thread pool: {e}"))),
        },
        Command::Decompose { config, out } => decompose::decompose(&config, &out),
    };
    match result {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(CliError::Failed(report)) => {
            println!("{report}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{}", diagnostic(&e));
            ExitCode::from(match e {
                CliError::Integration(_) => 3,
                _ => 2,
            })
        }
    }
}
