use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "stigma-olg",
    version,
    about = "Equilibria and simulations of the stigma OLG Prisoner's Dilemma"
)]
pub struct Cli {
    /// TOML file with default values; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads for sweeps and replications.
    #[arg(long, global = true, env = "STIGMA_OLG_THREADS")]
    pub threads: Option<usize>,

    /// Leave the timestamp out of emitted records.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate the equilibria at one parameter point.
    Solve(SolveArgs),
    /// Solve a grid of honest fractions and write CSV rows.
    Sweep(SweepArgs),
    /// Run the population simulator and compare it with theory.
    Simulate(SimulateArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Select {
    Min,
    Max,
    Interior,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub pi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub pi_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub pi_max: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub pi_steps: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write the figure branches as JSON.
    #[arg(long, value_name = "PATH")]
    pub figure_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub pi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Agents per group per generation.
    #[arg(long)]
    pub cohort: Option<usize>,
    #[arg(long)]
    pub periods: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, conflicts_with = "cutoff")]
    pub select: Option<Select>,
    #[arg(long, allow_negative_numbers = true)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// JSON destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced grids and cohorts (default).
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    /// Full-size acceptance runs.
    #[arg(long)]
    pub full: bool,
}
