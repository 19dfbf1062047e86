use std::process::ExitCode;

use clap::Parser;

use mdrlab::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mdrlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
