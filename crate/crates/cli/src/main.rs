use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kitaev_vqe_cli::{parse, run_experiment, validate, CliError, Pass, THREADS_ENV};

#[derive(Parser)]
#[command(name = "kitaev-vqe", version, about = "VQE experiments for Kitaev spin models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV and manifest.
    Run { config: PathBuf },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Compute only the exact references for an experiment.
    Oracle { config: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = parse(&read(&config)?).map_err(CliError::Config)?;
            let diags = validate(&cfg);
            if !diags.is_empty() {
                return Err(CliError::Invalid(diags));
            }
            println!("{}: ok", config.display());
            Ok(())
        }
        Command::Run { config } => {
            let out = run_experiment(&read(&config)?, &base_dir(&config), Pass::Full)?;
            println!("wrote {}", out.csv.display());
            Ok(())
        }
        Command::Oracle { config } => {
            let out = run_experiment(&read(&config)?, &base_dir(&config), Pass::OracleOnly)?;
            println!("wrote {}", out.csv.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    if let Ok(n) = std::env::var(THREADS_ENV) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("{THREADS_ENV} must be a positive integer, got {n:?}");
                return ExitCode::from(2);
            }
        }
    }
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
