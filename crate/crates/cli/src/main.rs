use std::process::ExitCode;

use clap::Parser;
use rsos_cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
