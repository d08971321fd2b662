//! File formats, parallel drivers and the `lightcone` command line on top of
//! `lightcone-core`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
mod error;
pub mod formats;
pub mod parallel;

use std::ffi::OsString;

use clap::Parser;

pub use error::CliError;

/// Environment variable setting the worker thread count.
pub const THREADS_ENV: &str = "LIGHTCONE_THREADS";

/// Result of one invocation: exit code plus what goes to stdout and stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first), runs the command and writes
/// `--output` if given. Exit codes: 0 success, 1 domain failure, 2 usage.
pub fn invoke(args: Vec<OsString>) -> Invocation {
    let fail = |e: CliError| Invocation { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") };
    let args = match cli::expand_config(args) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let parsed = match cli::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Invocation { code, stdout: text, stderr: String::new() }
            } else {
                Invocation { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let outcome = match commands::run(&parsed.command) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let stderr = if outcome.ok { String::new() } else { "error: verification failed\n".to_string() };
    let code = if outcome.ok { 0 } else { 1 };
    match &parsed.output {
        Some(path) => match std::fs::write(path, &outcome.text) {
            Ok(()) => Invocation { code, stdout: String::new(), stderr },
            Err(e) => fail(CliError::io(path, e)),
        },
        None => Invocation { code, stdout: outcome.text, stderr },
    }
}
