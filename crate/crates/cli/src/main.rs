//! `phoeg`: enumeration, invariant stores, hulls, obstructions and
//! transformation metagraphs from the command line.
//!
//! Data goes to standard output (or `--output`), diagnostics to standard
//! error. Exit status is 0 on success, 1 on domain errors and 2 on usage
//! errors.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k as usize).build_global() {
            eprintln!("phoeg: cannot start {k} workers: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("phoeg: {e:#}");
            if e.downcast_ref::<output::UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
