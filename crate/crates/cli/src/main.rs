//! `confine`: spectra, time evolution and boundary-potential checks for
//! confined 1D Schrödinger operators.
//!
//! Data goes to stdout (or a file under `--out-dir`); diagnostics go to
//! stderr. Exit codes: 0 success, 2 configuration error, 3 numerical
//! failure, 4 verification contract failure.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::ScenarioConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) | Self::Io(_) => 3,
            Self::Verification(_) => 4,
        }
    }
}

impl From<confinement::Error> for CliError {
    fn from(e: confinement::Error) -> Self {
        match e {
            confinement::Error::Config(m) => Self::Config(m),
            other => Self::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "confine", version, about)]
struct Cli {
    /// Seed for randomized suites; overrides the one in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write data files here instead of stdout.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest eigenpairs of each block of the confined operator.
    Spectrum { config: PathBuf },
    /// Cayley evolution of a Gaussian packet.
    Evolve { config: PathBuf },
    /// Randomized exact check of the boundary-potential identity.
    VerifyTheorem2 { config: Option<PathBuf> },
    /// Lowest eigenvalues of one block along a ladder of Robin parameters.
    SweepLambda { config: PathBuf },
}

fn emit(out_dir: Option<&Path>, name: &str, data: &str) -> Result<(), CliError> {
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), data)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(data.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let out_dir = cli.out_dir.as_deref();
    match &cli.command {
        Command::Spectrum { config } => {
            let csv = commands::spectrum(&ScenarioConfig::load(config)?)?;
            emit(out_dir, "spectrum.csv", &csv)
        }
        Command::Evolve { config } => {
            let csv = commands::evolve(&ScenarioConfig::load(config)?)?;
            emit(out_dir, "evolve.csv", &csv)
        }
        Command::SweepLambda { config } => {
            let csv = commands::sweep_lambda(&ScenarioConfig::load(config)?)?;
            emit(out_dir, "sweep_lambda.csv", &csv)
        }
        Command::VerifyTheorem2 { config } => {
            let cfg = match config {
                Some(path) => ScenarioConfig::load(path)?,
                None => ScenarioConfig::default(),
            };
            let (json, report) = commands::verify_theorem2(&cfg, cli.seed)?;
            emit(out_dir, "theorem2.json", &json)?;
            if report.contract_holds {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "max on-domain residue {}, min off-domain residue {}, \
                     oracle deviation {:e}, {} regular-part and {} linearity failures",
                    report.max_on_domain_residue,
                    report.min_off_domain_residue_norm.as_deref().unwrap_or("n/a"),
                    report.oracle_max_deviation,
                    report.regular_part_failures,
                    report.linearity_failures,
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::Numerical(String::new()).exit_code(), 3);
        assert_eq!(CliError::Verification(String::new()).exit_code(), 4);
        let e: CliError = confinement::Error::Numerical("no convergence".into()).into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = confinement::Error::Config("bad".into()).into();
        assert_eq!(e.exit_code(), 2);
    }
}
