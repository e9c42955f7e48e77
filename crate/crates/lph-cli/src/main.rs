//! `lph`: tables and reports from the lph library as CSV or JSON.
//!
//! Exit codes: 0 on success, 1 on numerical or I/O errors, 2 when
//! `--expect-satisfied` meets a violated or divergent verdict, 64 on usage
//! errors.

mod cli;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Format};
use commands::Failure;

const EXIT_ERROR: u8 = 1;
const EXIT_VERDICT: u8 = 2;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match commands::run(&cli) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let text = match cli.format {
        Format::Json => out.to_json(),
        Format::Csv => out.table.to_csv(),
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = output::write_atomic(path, &text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(EXIT_ERROR);
            }
        }
        None => print!("{text}"),
    }
    eprintln!("{}", out.summary);
    if out.verdict_failed {
        ExitCode::from(EXIT_VERDICT)
    } else {
        ExitCode::SUCCESS
    }
}
