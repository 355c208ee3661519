//! Command-line front end: argument parsing, JSON reports and the acceptance checks.

pub mod commands;
pub mod json;
pub mod parse;
pub mod verify;

use clap::Parser;
use serde_json::json;

use commands::{Cli, Command};
use lempert::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoBracket(_) | Error::TailNotReached { .. } | Error::Numerical(_) => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotInterior { .. } => "not_interior",
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::CoincidentNodes => "coincident_nodes",
        Error::InvalidPoleSet(_) => "invalid_pole_set",
        Error::Precondition(_) => "precondition",
        Error::NoBracket(_) => "no_bracket",
        Error::TailNotReached { .. } => "tail_not_reached",
        Error::CapOverflow(_) => "cap_overflow",
        Error::Numerical(_) => "numerical",
    }
}

fn failure(code: i32, kind: &str, message: String) -> Outcome {
    let doc = json!({"error": {"kind": kind, "message": message}});
    Outcome {
        code,
        stdout: String::new(),
        stderr: json::to_string_pretty(&doc) + "\n",
    }
}

/// Runs the command line `args` (program name first) without touching the process streams.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                failure(EXIT_VALIDATION, "usage", text)
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let started = std::time::Instant::now();
    let result = match &cli.command {
        Command::Eval(a) => commands::eval(a).map(|doc| (doc, a.csv)),
        Command::Lemma4(a) => commands::lemma4(a).map(|doc| (doc, false)),
        Command::Bidisc(a) => commands::bidisc(a).map(|doc| (doc, false)),
        Command::Bounds(a) => commands::bounds(a).map(|doc| (doc, false)),
        Command::Counterexample(a) => commands::counterexample(a).map(|doc| (doc, false)),
        Command::Verify(a) => return verify::command(a),
    };
    match result {
        Ok((mut doc, csv)) => {
            let stdout = if csv {
                commands::eval_csv(&doc)
            } else {
                doc["runtime_ms"] = json!(started.elapsed().as_secs_f64() * 1e3);
                json::to_string_pretty(&doc) + "\n"
            };
            Outcome {
                code: EXIT_OK,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => failure(exit_code(&e), error_kind(&e), e.to_string()),
    }
}
