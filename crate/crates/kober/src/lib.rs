//! Command-line front end of `kober-core`: evaluation, verification
//! suites and tables.
//!
//! Exit status: 0 when every case passes, 1 when a case fails, 2 on usage
//! or domain errors.

pub mod commands;
pub mod config;
pub mod error;
pub mod func;
pub mod num;
pub mod report;
pub mod runner;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;

use config::RunConfig;
use error::CliError;

/// Runs the program on `argv` (program name first) and returns the exit
/// status. Reports go to `stdout` unless `--out` is given; they are written
/// only once the command has finished.
pub fn run<I, T>(argv: I, env_seed: Option<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::from_args(argv, env_seed) {
        Ok(c) => c,
        Err(CliError::Help(text)) => {
            let _ = write!(stdout, "{text}");
            return 0;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let outcome = match commands::execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    if let Some(s) = &outcome.summary {
        let _ = writeln!(stderr, "{s}");
    }
    match &cfg.out {
        Some(path) => {
            if let Err(source) = std::fs::write(path, &outcome.text) {
                let _ = writeln!(stderr, "error: {}", CliError::Io { path: path.clone(), source });
                return 2;
            }
        }
        None => {
            let _ = stdout.write_all(outcome.text.as_bytes());
        }
    }
    outcome.code
}
