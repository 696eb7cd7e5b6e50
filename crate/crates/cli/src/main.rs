//! `kamtorus`: batch front end for solving and certifying invariant tori.
//!
//! Exit codes: 0 success (converged, pass), 1 certificate or lift failure,
//! 2 solver divergence, 3 configuration or hypothesis error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::RunConfig;

pub const EXIT_CONFIG: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Kam(#[from] kamtorus::KamError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Parser)]
#[command(name = "kamtorus", version, about = "Quasi-Newton solver and KAM certificates for invariant tori")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the starting-torus perturbation; overrides `system.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for grids and sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the quasi-Newton iteration from the starting torus.
    Solve,
    /// Evaluate the KAM condition on a torus artifact.
    Certify {
        #[arg(long)]
        torus: Option<PathBuf>,
    },
    /// Lift a rotational-family 2-torus to the invariant cylinder and 3-torus.
    Lift {
        #[arg(long)]
        torus: Option<PathBuf>,
    },
    /// Sweep couplings with both update rules and scan the initial bite.
    Bench,
    /// Evaluate the constant tables from sigma, mu and the system bounds.
    Constants,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let path = cli.config.ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(&path)?;
    if let Some(out) = cli.out {
        cfg.output.dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.system.seed = seed;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Solve => commands::solve(&cfg),
        Command::Certify { torus } => commands::certify(&cfg, torus.as_deref()),
        Command::Lift { torus } => commands::lift(&cfg, torus.as_deref()),
        Command::Bench => commands::bench(&cfg),
        Command::Constants => commands::constants(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
