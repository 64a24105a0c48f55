//! Library side of the `ddsim` binary: JSON scenario configs, one runner per
//! subcommand, and the output manifest.
//!
//! Every run writes its outputs plus `manifest.json` into the output
//! directory. A failed run writes `diagnostics.json` instead. Exit codes are
//! 0 on success, 2 for a bad config, 3 when a truncation guard fails and 1
//! for anything else.

pub mod config;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

pub use run::run;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("{0}")]
    Compute(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            _ => 1,
        }
    }
}

impl From<lindblad::EvolveError> for CliError {
    fn from(e: lindblad::EvolveError) -> Self {
        use lindblad::EvolveError as E;
        match e {
            E::Convergence { .. } => CliError::Convergence(e.to_string()),
            E::InvalidInput(_) | E::Pulse(_) => CliError::Config(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<pulses::PulseError> for CliError {
    fn from(e: pulses::PulseError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<fieldmodel::FieldError> for CliError {
    fn from(e: fieldmodel::FieldError) -> Self {
        use fieldmodel::FieldError as E;
        match e {
            E::InvalidGeometry(_) | E::InvalidInput(_) => CliError::Config(e.to_string()),
            E::SingularPosition { .. } => CliError::Compute(e.to_string()),
        }
    }
}

impl From<chain::ChainError> for CliError {
    fn from(e: chain::ChainError) -> Self {
        use chain::ChainError as E;
        match e {
            E::Evolve(inner) => inner.into(),
            E::InvalidSpec(_) | E::InvalidPair { .. } | E::Pulse(_) => {
                CliError::Config(e.to_string())
            }
            E::Field(inner) => inner.into(),
            E::Degenerate(_) => CliError::Compute(e.to_string()),
        }
    }
}

impl From<benchmarking::BenchError> for CliError {
    fn from(e: benchmarking::BenchError) -> Self {
        use benchmarking::BenchError as E;
        match e {
            E::Evolve(inner) => inner.into(),
            E::InvalidInput(_) | E::Pulse(_) => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ddsim", version, about = "Microwave addressing simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON scenario config; omitted fields take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Base RNG seed (rb only).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Fock truncation; the guard re-runs at twice this.
    #[arg(long, global = true)]
    pub fock_dim: Option<usize>,
    /// Relative integrator tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// `P₀(t)` of a bare sideband pulse with and without heating.
    DecayScan,
    /// `P₀` against the DD phase.
    DdPhaseScan,
    /// Field phase profile and the predicted interaction zone.
    ZoneScan,
    /// Residual displacement error against `Ω_DD/Ω_SB`.
    SuppressionScan,
    /// Pairwise crosstalk over a chain.
    ChainCrosstalk,
    /// Gate infidelity against chain displacement and occupation.
    GateFidelity,
    /// Randomized benchmarking of an embedded pulse.
    Rb,
    /// Field amplitude, phases and Lamb-Dicke parameter along x.
    FieldMap,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::DecayScan => "decay-scan",
            Command::DdPhaseScan => "dd-phase-scan",
            Command::ZoneScan => "zone-scan",
            Command::SuppressionScan => "suppression-scan",
            Command::ChainCrosstalk => "chain-crosstalk",
            Command::GateFidelity => "gate-fidelity",
            Command::Rb => "rb",
            Command::FieldMap => "field-map",
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub fock_dim: Option<usize>,
    pub tol: Option<f64>,
}

/// What a runner hands back for the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    /// Fully resolved config, overrides applied.
    pub config: serde_json::Value,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
    /// Truncation and physicality checks.
    pub guards: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    overrides: Overrides,
    config: &'a serde_json::Value,
    runtime_seconds: f64,
    outputs: &'a [String],
    guards: &'a serde_json::Value,
}

#[derive(Debug, Serialize)]
struct Diagnostics<'a> {
    subcommand: &'static str,
    exit_code: i32,
    error: String,
    overrides: Overrides,
    config: Option<&'a Path>,
}

/// Run `cli` end to end and return the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let overrides = Overrides {
        seed: cli.seed,
        fock_dim: cli.fock_dim,
        tol: cli.tol,
    };
    let start = Instant::now();
    let result = fs::create_dir_all(&cli.out)
        .map_err(CliError::from)
        .and_then(|_| run(cli.command, cli.config.as_deref(), &overrides, &cli.out))
        .and_then(|report| {
            let manifest = Manifest {
                tool: "ddsim",
                version: env!("CARGO_PKG_VERSION"),
                subcommand: cli.command.name(),
                overrides,
                config: &report.config,
                runtime_seconds: start.elapsed().as_secs_f64(),
                outputs: &report.outputs,
                guards: &report.guards,
            };
            fs::write(cli.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
            Ok(())
        });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("ddsim {}: {e}", cli.command.name());
            let diag = Diagnostics {
                subcommand: cli.command.name(),
                exit_code: code,
                error: e.to_string(),
                overrides,
                config: cli.config.as_deref(),
            };
            if let Ok(text) = serde_json::to_string_pretty(&diag) {
                let _ = fs::write(cli.out.join("diagnostics.json"), text);
            }
            code
        }
    }
}
