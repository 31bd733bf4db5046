//! `tomokit` command-line front end.
//!
//! Exit status: 0 on success, 2 for invalid configuration or input, 3 when a
//! solver stops without meeting its tolerance.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl From<tomokit::Error> for CliError {
    fn from(e: tomokit::Error) -> Self {
        match e {
            tomokit::Error::RankDeficient { .. } | tomokit::Error::ZeroRow => Self::Numerical(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("tomokit: {}", one_line(&msg));
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("tomokit: {}", one_line(&msg));
            ExitCode::from(3)
        }
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}
