mod args;
mod commands;
mod data;
mod failure;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use failure::{exit_code, EXIT_USAGE};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    // Echo the invocation without the binary's install path.
    let echo: Vec<String> = std::iter::once("rankver".to_string())
        .chain(argv.iter().skip(1).cloned())
        .collect();
    match commands::run_command(cli.command, &echo) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
