mod args;
mod commands;
mod config;
mod output;

use std::fmt::Display;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Exit status and message of a command that did not succeed.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const USAGE: u8 = 2;
    pub const THRESHOLD: u8 = 3;

    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: Self::USAGE,
            message: message.into(),
        }
    }

    pub fn io(e: impl Display) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<besq_core::Error> for Failure {
    fn from(e: besq_core::Error) -> Self {
        use besq_core::Error as E;
        let code = match e {
            E::Domain { .. } | E::InvalidGrid(_) | E::GridCoverage { .. } | E::Config(_) | E::Parse(_) => Self::USAGE,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("besq: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
