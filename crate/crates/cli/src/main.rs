//! `dustlab`: certified parallel-set areas of planar Cantor dusts.
//!
//! Exit status: 0 certified pass, 1 inconclusive or runtime failure,
//! 2 certified failure, 64 usage error.

mod args;
mod commands;
mod report;
mod svg;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Failure;
use dustlab_core::Verdict;

const EXIT_USAGE: u8 = 64;

fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::CertifiedHolds => 0,
        Verdict::Inconclusive => 1,
        Verdict::CertifiedFails => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("usage error: --workers must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match &cli.command {
        Command::Scan(a) => commands::scan(a),
        Command::Volume(a) => commands::volume(a),
        Command::Oscillate(a) => commands::oscillate(a),
        Command::Pluriphase(a) => commands::pluriphase(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Render(a) => commands::render(a),
    };
    match outcome {
        Ok(v) => ExitCode::from(exit_code(v)),
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(match f {
                Failure::Usage(_) => EXIT_USAGE,
                Failure::Runtime(_) => 1,
            })
        }
    }
}
