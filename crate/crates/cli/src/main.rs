//! `qassess` command-line tool.
//!
//! Exit codes: 0 success, 1 model validation errors, 2 I/O or parse
//! failures, 3 internal invariant breaches.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qassess", version, about = "Calibrate, weigh and apply operationalised quality models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Html,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreOrder {
    /// Lower scores are better (grades).
    Ascending,
    /// Higher scores are better.
    Descending,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resolve and check model modules; print diagnostics.
    Validate {
        /// Model files (`*.qm.json`) or directories containing them.
        #[arg(required = true)]
        models: Vec<PathBuf>,
    },
    /// Derive utility thresholds from baseline systems and write a calibrated model revision.
    Calibrate {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        /// CSV with header `system,<measureId>,...`.
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Inject Rank-Order-Centroid weights from a ranking CSV and write a new model revision.
    Weigh {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        /// CSV with header `parentId,childId,rank`.
        #[arg(long)]
        ranking: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assess measurement bundles and write reports.
    Assess {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        /// Measurement bundle JSON; repeat to assess several systems.
        #[arg(long = "bundle", required = true)]
        bundles: Vec<PathBuf>,
        /// Manual results CSV `instrumentId,value`; overrides tool values.
        #[arg(long)]
        manual: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        format: ReportFormat,
        /// Fixed report timestamp (UTC ISO-8601) instead of the current time.
        #[arg(long)]
        timestamp: Option<String>,
    },
    /// Tabulate grades across reports and compute improvement percentages.
    Compare {
        /// Report directories (containing report.json) or report files.
        #[arg(long, num_args = 1.., required = true)]
        reports: Vec<PathBuf>,
        /// Factor whose grade is compared; defaults to the single root factor.
        #[arg(long)]
        factor: Option<String>,
    },
    /// Spearman rank correlation of two score or rank columns.
    RankCorrelate {
        /// CSV `item,scoreA,scoreB` or `item,rankA,rankB`.
        csv: PathBuf,
        #[arg(long, value_enum, default_value = "ascending")]
        order: ScoreOrder,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code.into(),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code.into()
        }
    }
}
