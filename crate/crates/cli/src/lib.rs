//! Library side of the `exptaylor` binary: argument parsing, command
//! dispatch and output formatting, kept here so it can be tested in-process.

pub mod args;
mod commands;
mod render;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 1;
    pub const DOMAIN: i32 = 2;
    pub const CHECK_FAILED: i32 = 3;
}

/// Everything a run would print, plus its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: exit::OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome { code: exit::VALIDATION, stdout: String::new(), stderr: text },
            };
        }
    };
    commands::dispatch(cli.command)
}
