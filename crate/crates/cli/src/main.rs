mod commands;
mod settings;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use settings::Flags;

/// Angular synchronization experiments: generate instances, solve them with
/// the eigenvector, SDP or least squares methods, sweep parameters, and
/// evaluate closed-form predictions.
#[derive(Parser)]
#[command(name = "angsync", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance and its metadata sidecar (<out>.json)
    Generate {
        #[command(flatten)]
        flags: Flags,
    },
    /// Solve an instance file and print a JSON report
    Solve {
        instance: PathBuf,
        /// Metadata with planted angles; defaults to <instance>.json if present
        #[arg(long)]
        truth: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run every method on fresh instances over a grid of p
    Sweep {
        #[command(flatten)]
        flags: Flags,
    },
    /// Write all eigenvalues of the sync matrix as CSV
    Spectrum {
        /// Instance file; without it an instance is generated from the model flags
        instance: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Print the closed-form predictions for (n, m, L, p) as CSV
    Theory {
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    NotConverged(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::NotConverged(m) => f.write_str(m),
        }
    }
}

impl From<angsync::Error> for CliError {
    fn from(e: angsync::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { flags } => commands::generate(&flags.resolve()?),
        Command::Solve { instance, truth, flags } => commands::solve(&instance, truth.as_deref(), &flags.resolve()?),
        Command::Sweep { flags } => sweep::sweep(&flags.resolve()?),
        Command::Spectrum { instance, flags } => commands::spectrum(instance.as_deref(), &flags.resolve()?),
        Command::Theory { flags } => commands::theory(&flags.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
