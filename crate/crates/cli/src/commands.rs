use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use stigma_olg::simulator::{compare_to_theory, run_replications, SelectionPolicy, SimConfig, SimStats, StrategySpec};
use stigma_olg::statics::{figure_data, linspace, sweep_with_threads};
use stigma_olg::Params;

use crate::acceptance::{self, Mode};
use crate::args::{Format, Select, SimulateArgs, SolveArgs, SweepArgs, VerifyArgs};
use crate::config::{SimulateConfig, SolveConfig, SweepConfig};
use crate::output::{sweep_csv, GridSpec, OutputRecord, Payload, Provenance, SimulationPayload};
use crate::{CliError, Context};

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(path) => write_file(path, text),
        None => out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

pub(crate) fn solve(args: &SolveArgs, ctx: &Context, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = SolveConfig::merge(args, &ctx.file)?;
    Params::new(cfg.pi, cfg.b, cfg.alpha).map_err(usage)?;
    let row = sweep_with_threads(cfg.b, cfg.alpha, &[cfg.pi], 1)
        .map_err(usage)?
        .remove(0);
    let text = match cfg.format {
        Format::Csv => sweep_csv(std::slice::from_ref(&row)),
        Format::Json => {
            let provenance = Provenance::new(None, None, ctx.timestamp);
            OutputRecord::new("solve", &cfg, Payload::Solve(row), provenance).to_json()
        }
    };
    emit(&text, None, out)?;
    Ok(0)
}

fn grid(cfg: &SweepConfig) -> Result<Vec<f64>, CliError> {
    let (lo, hi, n) = (cfg.pi_min, cfg.pi_max, cfg.pi_steps);
    if n == 0 {
        return Err(usage("pi-steps must be at least 1"));
    }
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
        return Err(usage(format!("pi-min and pi-max must lie in [0, 1] (got {lo}, {hi})")));
    }
    if n > 1 && lo >= hi {
        return Err(usage(format!("pi-min must be below pi-max (got {lo}, {hi})")));
    }
    Ok(linspace(lo, hi, n))
}

pub(crate) fn sweep(args: &SweepArgs, ctx: &Context, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = SweepConfig::merge(args, &ctx.file, ctx.threads)?;
    Params::new(0.0, cfg.b, cfg.alpha).map_err(usage)?;
    let pis = grid(&cfg)?;
    if args.figure_out.is_some() && cfg.alpha != 0.0 {
        return Err(usage("figure output is defined for alpha = 0 only"));
    }
    let rows = sweep_with_threads(cfg.b, cfg.alpha, &pis, cfg.threads).map_err(usage)?;
    let spec = GridSpec {
        pi_min: cfg.pi_min,
        pi_max: cfg.pi_max,
        pi_steps: cfg.pi_steps,
    };
    emit(&sweep_csv(&rows), args.out.as_deref(), out)?;
    if let Some(path) = &args.out {
        let provenance = Provenance::new(None, Some(spec.clone()), ctx.timestamp);
        let record = OutputRecord::new("sweep", &cfg, Payload::Sweep(rows), provenance);
        write_file(
            &PathBuf::from(format!("{}.meta.json", path.display())),
            &record.to_json(),
        )?;
    }
    if let Some(path) = &args.figure_out {
        let figure = figure_data(cfg.b, &pis).map_err(usage)?;
        let provenance = Provenance::new(None, Some(spec), ctx.timestamp);
        write_file(
            path,
            &OutputRecord::new("sweep", &cfg, Payload::Figure(figure), provenance).to_json(),
        )?;
    }
    Ok(0)
}

pub(crate) fn simulate(
    args: &SimulateArgs,
    ctx: &Context,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let cfg = SimulateConfig::merge(args, &ctx.file, ctx.threads)?;
    if cfg.replications == 0 {
        return Err(usage("replications must be at least 1"));
    }
    let strategy = match (cfg.select, cfg.cutoff) {
        (_, Some(c)) => StrategySpec::Cutoff(c),
        (Some(Select::Min), None) => StrategySpec::Select(SelectionPolicy::MinEquilibrium),
        (Some(Select::Max), None) => StrategySpec::Select(SelectionPolicy::MaxEquilibrium),
        (_, None) => StrategySpec::Select(SelectionPolicy::InteriorIfExists),
    };
    let config = SimConfig {
        params: Params::new(cfg.pi, cfg.b, cfg.alpha).map_err(usage)?,
        cohort_size: cfg.cohort,
        periods: cfg.periods,
        burn_in: cfg.burn_in,
        seed: cfg.seed,
        strategy,
    };
    config.validate().map_err(usage)?;
    let cutoff = config.resolve_cutoff().map_err(usage)?;
    // Later steps compare against the resolved cutoff.
    let config = SimConfig {
        strategy: StrategySpec::Cutoff(cutoff),
        ..config
    };
    let mut runs = run_replications(&config, cfg.replications, cfg.threads).map_err(usage)?;
    let stats = if runs.len() == 1 {
        runs.remove(0)
    } else {
        SimStats::pooled(&runs).expect("at least one replication")
    };
    let (report, error) = match compare_to_theory(&stats, &config) {
        Ok(report) => (Some(report), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let pass = report.as_ref().is_some_and(|r| r.all_pass());
    if let Some(e) = &error {
        let _ = writeln!(err, "no theory comparison: {e}");
    }
    for line in report.iter().flat_map(|r| r.failures()) {
        let _ = writeln!(
            err,
            "FAIL {}: empirical {} vs theory {} (z = {:.2})",
            line.name,
            line.empirical,
            line.theory,
            line.z_score()
        );
    }
    let payload = SimulationPayload {
        cutoff,
        replications: cfg.replications,
        stats,
        report,
        error,
    };
    let provenance = Provenance::new(Some(cfg.seed), None, ctx.timestamp);
    let record = OutputRecord::new("simulate", &cfg, Payload::Simulate(Box::new(payload)), provenance);
    emit(&record.to_json(), args.out.as_deref(), out)?;
    Ok(if pass { 0 } else { 1 })
}

pub(crate) fn verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let mode = if args.full { Mode::Full } else { Mode::Quick };
    let outcomes = acceptance::run_all(mode);
    let io = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    for o in &outcomes {
        writeln!(out, "{}", o.line()).map_err(io)?;
    }
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.pass)
        .map(|o| format!("{} ({})", o.id, o.name))
        .collect();
    if failed.is_empty() {
        writeln!(out, "all {} criteria pass", outcomes.len()).map_err(io)?;
        Ok(0)
    } else {
        let _ = writeln!(err, "failing criteria: {}", failed.join(", "));
        Ok(1)
    }
}
