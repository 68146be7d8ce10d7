mod commands;
mod options;

use clap::Parser;
use options::{Cli, Command};
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<staircase::experiment::ExperimentError> for CliError {
    fn from(e: staircase::experiment::ExperimentError) -> Self {
        use staircase::experiment::ExperimentError as E;
        match e {
            E::Io(_) | E::Csv(_) | E::Json(_) | E::Malformed(_) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Check(c) => commands::check(c),
        Command::Run(c) => commands::run(c),
        Command::Sweep(c) => commands::sweep(c),
        Command::Plotdata(p) => commands::plotdata(p),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("staircase: {e}");
            ExitCode::from(e.code())
        }
    }
}
