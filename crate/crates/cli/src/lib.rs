//! Command-line front end: `solve`, `sweep`, `simulate` and `verify`.

pub mod acceptance;
pub mod args;
mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command};
use config::FileConfig;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or parameters.
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

/// Global settings shared by every subcommand.
pub(crate) struct Context {
    pub file: FileConfig,
    pub threads: usize,
    pub timestamp: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let threads = cli.threads.or(file.threads).unwrap_or(1);
    if threads == 0 {
        return Err(CliError::Usage("threads must be at least 1".into()));
    }
    let timestamp = !(cli.no_timestamp || file.no_timestamp == Some(true));
    let ctx = Context {
        file,
        threads,
        timestamp,
    };
    match cli.command {
        Command::Solve(a) => commands::solve(&a, &ctx, out),
        Command::Sweep(a) => commands::sweep(&a, &ctx, out),
        Command::Simulate(a) => commands::simulate(&a, &ctx, out, err),
        Command::Verify(a) => commands::verify(&a, out, err),
    }
}
