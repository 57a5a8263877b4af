//! Command-line front end: configuration, dispatch and persisted outputs.

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::{execute, Outcome};
pub use config::{Cli, Command, RunConfig, SEED_ENV};
pub use error::CliError;

/// Parses `argv`, runs it and returns the process exit code.
///
/// 0 on success, 1 on validation errors (including bad flags), 2 on resource
/// errors and 3 on statistical failures under `--strict`.
pub fn main_with<I, T>(argv: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let run = RunConfig::resolve(cli, std::env::var(SEED_ENV).ok()).and_then(|cfg| {
        let outcome = execute(&cfg)?;
        Ok((cfg.strict, outcome))
    });
    match run {
        Ok((strict, outcome)) => {
            let _ = writeln!(stdout, "{}", outcome.line);
            for w in &outcome.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            for f in &outcome.failures {
                let _ = writeln!(stderr, "check failed: {f}");
            }
            if strict && !outcome.failures.is_empty() {
                3
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let CliError::Validation(_) = e {
                let _ = writeln!(stderr, "run `wedge-fpp --help` for usage");
            }
            e.exit_code()
        }
    }
}
