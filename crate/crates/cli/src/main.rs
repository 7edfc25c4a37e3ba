use std::process::ExitCode;

use clap::Parser;
use tscalc_cli::app::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tscalc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
