use std::process::ExitCode;

use clap::Parser;
use fastast_cli::config::{Cli, ExperimentConfig};
use fastast_cli::EXIT_CONFIG;

fn main() -> ExitCode {
    let config = match ExperimentConfig::try_from(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("fastast: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match fastast_cli::run(&config) {
        Ok(summary) => {
            if summary.aborted > 0 {
                eprintln!("fastast: {} solve(s) did not converge", summary.aborted);
            }
            summary.exit_code()
        }
        Err(e) => {
            eprintln!("fastast: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
