//! Command-line front end for `pompeiu-core`: zero-sphere scans, defect
//! sweeps, the identity suite, and a merged report.
//!
//! Exit codes: 0 success, 1 identity-suite failure, 2 configuration or
//! input error.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book {}

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{RunArgs, RunConfig, DEFECT_DEFAULTS, SCAN_DEFAULTS, VERIFY_DEFAULTS};

/// Caps worker threads when set to a positive integer.
pub const THREADS_ENV: &str = "POMPEIU_LAB_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] pompeiu_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(name = "pompeiu-lab", version, about = "Numerical laboratory for the Pompeiu problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan m(k) = max_α |χ̃(kα)| for zero spheres; writes scan.csv and scan_summary.json.
    Scan(RunArgs),
    /// Sweep the over-determined defect over k; writes defect.csv and defect_summary.json.
    Defect(RunArgs),
    /// Run the identity suite; writes identities.json.
    Verify(RunArgs),
    /// Merge prior outputs into report.txt.
    Report {
        /// Directory holding prior outputs.
        dir: Option<PathBuf>,
        /// Same as DIR.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Scan(a) => commands::cmd_scan(&RunConfig::resolve(a, SCAN_DEFAULTS)?, out).map(|_| EXIT_OK),
        Command::Defect(a) => commands::cmd_defect(&RunConfig::resolve(a, DEFECT_DEFAULTS)?, out).map(|_| EXIT_OK),
        Command::Verify(a) => {
            let ok = commands::cmd_verify(&RunConfig::resolve(a, VERIFY_DEFAULTS)?, out)?;
            Ok(if ok { EXIT_OK } else { EXIT_SUITE_FAILED })
        }
        Command::Report { dir, out: flag } => {
            let dir = dir.or(flag).unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUT));
            let text = report::cmd_report(&dir)?;
            write!(out, "{text}").ok();
            Ok(EXIT_OK)
        }
    }
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = thread_cap().and_then(|cap| match cap {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            let command = cli.command;
            let (r, buf) = pool.install(move || {
                // Output is buffered so the pool's workers never touch `out`.
                let mut buf = Vec::new();
                let r = execute(command, &mut buf);
                (r, buf)
            });
            let _ = out.write_all(&buf);
            r
        }
        None => execute(cli.command, out),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
