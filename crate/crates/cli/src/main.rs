use std::process::ExitCode;

use clap::Parser;
use skewcirc_cli::error::exit;
use skewcirc_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::INPUT_ERROR)
        }
    }
}
