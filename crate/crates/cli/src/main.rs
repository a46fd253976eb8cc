//! `srank`: persistence barcodes, stable ranks, distances, classification and
//! spatial-organization indices from the command line.
//!
//! Every command writes its results into `--out` together with a
//! `manifest.json` recording the full configuration. Runs are deterministic in
//! their inputs and `--seed`.

mod commands;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{BarcodeArgs, BaselineArgs, ClassifyArgs, DistArgs, SpatialArgs, StableRankArgs};

/// Environment variable holding the default worker-thread count.
const THREADS_ENV: &str = "SRANK_THREADS";

#[derive(Parser)]
#[command(
    name = "srank",
    version,
    about = "Stable-rank topological data analysis"
)]
struct Cli {
    /// Worker threads [default: $SRANK_THREADS, else all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Persistence barcode of a point cloud or distance matrix
    Barcode(BarcodeArgs),
    /// Stable-rank functions per homological degree
    Stablerank(StableRankArgs),
    /// Distance matrix between stable-rank CSV files
    Dist(DistArgs),
    /// Cross-validated classification of labeled point clouds
    Classify(ClassifyArgs),
    /// Organization indices of a gridded field
    Spatial(SpatialArgs),
    /// Mean persistence CDFs of Poisson point patterns
    PoissonBaseline(BaselineArgs),
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{THREADS_ENV}=`{v}` is not a thread count")),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = thread_count(cli.threads)? {
        anyhow::ensure!(n >= 1, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot start worker threads")?;
    }
    match cli.command {
        Command::Barcode(a) => commands::barcode(&a),
        Command::Stablerank(a) => commands::stablerank(&a),
        Command::Dist(a) => commands::dist(&a),
        Command::Classify(a) => commands::classify(&a),
        Command::Spatial(a) => commands::spatial(&a),
        Command::PoissonBaseline(a) => commands::poisson_baseline(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "{}",
                if first.starts_with("error:") {
                    first.to_string()
                } else {
                    format!("error: {first}")
                }
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
