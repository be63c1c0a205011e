//! `metrokit` command-line front end.
//!
//! Exit status: 0 on success, 2 on usage errors and unknown reproduction cases,
//! 1 on computation errors (reported as `{"error": kind, "message": text}`) and
//! on reproduction runs with failing assertions.

mod args;
mod commands;
mod output;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;
use commands::Failure;

const THREADS_VAR: &str = "METROKIT_THREADS";

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| format!("{THREADS_VAR} must be a positive integer, got '{value}'"))?;
    if threads == 0 {
        return Err(format!("{THREADS_VAR} must be a positive integer, got '{value}'"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), std::io::Error> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn error_json(kind: &str, message: &str) -> String {
    let mut s = metrokit::io::to_json_string(&json!({ "error": kind, "message": message }));
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(2);
    }
    let Cli { command, format, out, seed } = cli;
    match commands::run(command, seed) {
        Ok(outcome) => match emit(&outcome.report.render(format), out.as_deref()) {
            Ok(()) if outcome.success => ExitCode::SUCCESS,
            Ok(()) => ExitCode::from(1),
            Err(e) => {
                print!("{}", error_json("Io", &e.to_string()));
                ExitCode::from(1)
            }
        },
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            print!("{}", error_json(e.kind(), &e.to_string()));
            ExitCode::from(1)
        }
    }
}
