mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// A failure and the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an unreadable spec: exit 2.
    Usage(String),
    /// Runtime failure, including Failed records after a grid run: exit 1.
    Failure(String),
    /// The results store has no records at the requested cell: exit 3.
    NoMatch(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenGrid(a) => commands::gen_grid(a),
        Command::RunGrid(a) => commands::run_grid(a),
        Command::Datasheet(a) => commands::datasheet(a),
        Command::Synth(a) => commands::synth(a),
        Command::Learn(a) => commands::learn(a),
        Command::Inspect(a) => commands::inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, message) = match e {
                CliError::Failure(m) => (1, m),
                CliError::Usage(m) => (2, m),
                CliError::NoMatch(m) => (3, m),
            };
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
