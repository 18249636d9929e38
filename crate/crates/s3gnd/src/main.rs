use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = s3gnd::cli::Cli::parse();
    match s3gnd::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(s3gnd::cli::exit_code(&e))
        }
    }
}
