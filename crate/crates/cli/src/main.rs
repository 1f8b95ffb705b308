//! `muntz`: run Müntz-system experiments from a JSON config and emit
//! JSON or CSV reports.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use muntz::MuntzError;
use serde_json::json;

use config::{Format, Overrides, RunConfig, PRECISION_ENV};

#[derive(Parser)]
#[command(name = "muntz", version, about = "Arbitrary-precision Müntz system experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config and print the resolved domain and exponents
    Validate(Flags),
    /// Gram matrix of a section with its condition estimate
    Gram(Flags),
    /// Distances of one power to the span of the others across sections
    Distances(Flags),
    /// Biorthogonal dual family of a section
    Duals(Flags),
    /// Best approximation of a target function and coefficient convergence
    Expand(Flags),
    /// Christoffel-function Remez constants over sections and radii
    Remez(Flags),
    /// Finite-section moment problem
    Moments(Flags),
    /// Eigen-structure of the diagonal operator and an application demo
    Operator(Flags),
    /// Mixed-system nonsingularity over partitions
    Hereditary(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Target index (1-based)
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated section sizes
    #[arg(long = "N-list", value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Section size
    #[arg(long = "N")]
    section: Option<usize>,
    /// Working precision in bits (overrides config and environment)
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    epsilon: Option<String>,
    /// Radius, or comma-separated radii for `remez`
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<String>>,
    #[arg(long = "grid-points")]
    grid_points: Option<usize>,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug)]
pub struct Failure {
    kind: String,
    message: String,
    code: u8,
}

impl Failure {
    pub fn config(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            kind: kind.to_string(),
            message: message.into(),
            code: 2,
        }
    }
}

impl From<MuntzError> for Failure {
    fn from(e: MuntzError) -> Self {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
            code: if e.is_numerical() { 3 } else { 2 },
        }
    }
}

fn main() -> ExitCode {
    match execute() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", json!({"error": {"kind": f.kind, "message": f.message}}));
            ExitCode::from(f.code)
        }
    }
}

fn execute() -> Result<(), Failure> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => {
            let kind = match e.kind() {
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => "UnknownSubcommand",
                _ => "MalformedArguments",
            };
            return Err(Failure::config(kind, e.render().to_string().trim().trim_start_matches("error: ").to_string()));
        }
    };
    let (name, flags) = match cli.command {
        Command::Validate(f) => ("validate", f),
        Command::Gram(f) => ("gram", f),
        Command::Distances(f) => ("distances", f),
        Command::Duals(f) => ("duals", f),
        Command::Expand(f) => ("expand", f),
        Command::Remez(f) => ("remez", f),
        Command::Moments(f) => ("moments", f),
        Command::Operator(f) => ("operator", f),
        Command::Hereditary(f) => ("hereditary", f),
    };
    let overrides = Overrides {
        n: flags.n,
        section: flags.section,
        n_list: flags.n_list,
        precision: flags.precision,
        epsilon: flags.epsilon,
        rho: flags.rho,
        grid_points: flags.grid_points,
        format: flags.format,
    };
    let cfg = RunConfig::load(&flags.config)?
        .resolve(overrides, std::env::var(PRECISION_ENV).ok())?;
    let out = flags.out.or_else(|| cfg.out.clone());
    let text = commands::dispatch(name, cfg)?;
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| {
            Failure::config("OutputError", format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
