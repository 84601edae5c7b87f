use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = evoswitch_cli::Cli::parse();
    match evoswitch_cli::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("evoswitch: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
