// SPDX-License-Identifier: Apache-2.0
//! `fbl`: command-line front end.
//!
//! Exit status: 0 on success, 1 when `--strict` and a condition failed,
//! 2 on usage or configuration errors.

mod args;
mod commands;
mod config;
mod emit;

use clap::Parser;
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let report = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &report.text),
        None => std::io::stdout().lock().write_all(report.text.as_bytes()),
    };
    if let Err(e) = written {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return ExitCode::SUCCESS;
        }
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    if report.strict && !report.ok {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
