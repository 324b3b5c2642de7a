use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = chronoq_cli::Cli::parse();
    ExitCode::from(chronoq_cli::execute(&cli))
}
