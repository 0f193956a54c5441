//! `wade`: command-line runs of the super-profit oil price model.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Superprofit(a) => commands::superprofit(a),
        Command::Optimal(a) => commands::optimal(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Winwin(a) => commands::winwin(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
