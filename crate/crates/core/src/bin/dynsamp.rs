use std::process::ExitCode;

use clap::Parser;
use dynsamp::cli::{execute, Cli};

fn main() -> ExitCode {
    execute(&Cli::parse())
}
