use std::process::ExitCode;

use clap::Parser;
use env_logger::Env;
use gaussdec_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(Env::new().filter_or("GAUSSDEC_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gaussdec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
