//! Command-line interface: figure reproduction, constructions, scans,
//! quantum-bound sweeps, finite-shot simulation and dataset audits.
//!
//! Exit codes: 0 = ran (including "regime not found"); 2 = bad input or
//! configuration; 3 = internal invariant breach.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod manifest;

#[derive(Parser)]
#[command(
    name = "macroreal",
    version,
    about = "Temporal correlators and macrorealism tests for small spin systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (default: all cores; MACROREAL_WORKERS overrides).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Curve/dataset export format.
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    pub format: String,
}

#[derive(Subcommand)]
pub enum Command {
    /// Reproduce a bundled regime preset (figures 2a, 2b, 2c, 3, 4).
    Reproduce {
        /// Preset id: 2a | 2b | 2c | 3 | 4.
        #[arg(long)]
        figure: String,
        /// Override the preset's grid resolution.
        #[arg(long)]
        grid: Option<usize>,
        /// Satisfaction tolerance.
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build the four- or five-level equal-correlator construction.
    Construct {
        /// Hilbert-space dimension of the construction: 4 or 5.
        #[arg(long)]
        n: usize,
        /// Neighbour overlap; defaults to the maximally violating value
        /// (3/8 for n = 5, 1/6 for n = 4).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a scan from a JSON spec file.
    Scan {
        /// Path to a ScanSpec JSON file.
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep random models against a family's quantum bound and search
    /// for its strongest violation.
    Luders {
        /// Condition family: lg2 | lg3 | pi | ho3 | ho4.
        #[arg(long)]
        family: String,
        /// Dimensions to sweep (comma-separated).
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4, 5])]
        dims: Vec<usize>,
        /// Random instances per dimension.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate a finite-shot plan from a JSON file.
    Shots {
        /// Path to a ShotPlan JSON file.
        #[arg(long)]
        plan: PathBuf,
        /// Override the plan's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate every applicable condition family on a dataset file
    /// (.json or .csv).
    Audit {
        /// Path to an MRDataset file.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        /// Write audit.json here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the command recorded in a manifest.
    Replay {
        /// Path to a manifest.json produced by another command.
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = std::env::var("MACROREAL_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .or(cli.workers);
    if let Some(w) = workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: failed to configure {w} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let argv: Vec<String> = std::env::args().collect();
    match commands::dispatch(cli.command, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e
                .downcast_ref::<macroreal::Error>()
                .map(|me| matches!(me, macroreal::Error::Internal { .. }))
                .unwrap_or(false);
            ExitCode::from(if internal { 3 } else { 2 })
        }
    }
}
