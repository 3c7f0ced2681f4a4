//! Optional TOML defaults merged under command-line flags.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::args::{Format, Select, SimulateArgs, SolveArgs, SweepArgs};
use crate::CliError;

/// Every key a config file may set. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub pi: Option<f64>,
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    pub format: Option<Format>,
    pub pi_min: Option<f64>,
    pub pi_max: Option<f64>,
    pub pi_steps: Option<usize>,
    pub cohort: Option<usize>,
    pub periods: Option<usize>,
    pub burn_in: Option<usize>,
    pub seed: Option<u64>,
    pub select: Option<Select>,
    pub cutoff: Option<f64>,
    pub replications: Option<usize>,
    pub threads: Option<usize>,
    pub no_timestamp: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

fn required<T>(name: &str, flag: Option<T>, file: Option<T>) -> Result<T, CliError> {
    flag.or(file)
        .ok_or_else(|| CliError::Usage(format!("missing required value: --{}", name.replace('_', "-"))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub pi: f64,
    pub b: f64,
    pub alpha: f64,
    pub format: Format,
}

impl SolveConfig {
    pub fn merge(args: &SolveArgs, file: &FileConfig) -> Result<Self, CliError> {
        Ok(Self {
            pi: required("pi", args.pi, file.pi)?,
            b: required("b", args.b, file.b)?,
            alpha: args.alpha.or(file.alpha).unwrap_or(0.0),
            format: args.format.or(file.format).unwrap_or(Format::Json),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub b: f64,
    pub alpha: f64,
    pub pi_min: f64,
    pub pi_max: f64,
    pub pi_steps: usize,
    pub threads: usize,
}

impl SweepConfig {
    pub fn merge(args: &SweepArgs, file: &FileConfig, threads: usize) -> Result<Self, CliError> {
        Ok(Self {
            b: required("b", args.b, file.b)?,
            alpha: args.alpha.or(file.alpha).unwrap_or(0.0),
            pi_min: args.pi_min.or(file.pi_min).unwrap_or(0.0),
            pi_max: args.pi_max.or(file.pi_max).unwrap_or(1.0),
            pi_steps: args.pi_steps.or(file.pi_steps).unwrap_or(101),
            threads,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub pi: f64,
    pub b: f64,
    pub alpha: f64,
    pub cohort: usize,
    pub periods: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub select: Option<Select>,
    pub cutoff: Option<f64>,
    pub replications: usize,
    pub threads: usize,
}

impl SimulateConfig {
    pub fn merge(args: &SimulateArgs, file: &FileConfig, threads: usize) -> Result<Self, CliError> {
        // A flag of either kind displaces both strategy keys from the file.
        let (select, cutoff) = if args.select.is_some() || args.cutoff.is_some() {
            (args.select, args.cutoff)
        } else {
            (file.select, file.cutoff)
        };
        if select.is_some() && cutoff.is_some() {
            return Err(CliError::Usage("select and cutoff are mutually exclusive".into()));
        }
        Ok(Self {
            pi: required("pi", args.pi, file.pi)?,
            b: required("b", args.b, file.b)?,
            alpha: args.alpha.or(file.alpha).unwrap_or(0.0),
            cohort: args.cohort.or(file.cohort).unwrap_or(10_000),
            periods: args.periods.or(file.periods).unwrap_or(50),
            burn_in: args.burn_in.or(file.burn_in).unwrap_or(2),
            seed: args.seed.or(file.seed).unwrap_or(0),
            select: if cutoff.is_none() {
                Some(select.unwrap_or(Select::Interior))
            } else {
                None
            },
            cutoff,
            replications: args.replications.or(file.replications).unwrap_or(1),
            threads,
        })
    }
}
