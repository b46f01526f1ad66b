mod args;
mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Predict(a) => commands::predict(a),
        Command::Ingest(a) => commands::ingest(a),
        Command::Distribution(a) => commands::distribution(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
