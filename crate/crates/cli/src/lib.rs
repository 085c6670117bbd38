//! Config-driven experiment runner for the Kitaev VQE simulator.
//!
//! A run reads one TOML config, writes one CSV with a header row (floats with
//! 17 significant digits) and a `<stem>.manifest.toml` echoing the config,
//! package version and seed.

pub mod config;
pub mod experiments;

use thiserror::Error;

pub use config::{parse, validate, Diagnostic, ExperimentConfig};
pub use experiments::{run_experiment, Outputs, Pass};

/// Environment variable overriding the worker-pool size.
pub const THREADS_ENV: &str = "KITAEV_VQE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid config:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("numerical failure: {0}")]
    Numerical(#[from] kitaev_vqe::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit code: 2 for config and output problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}
