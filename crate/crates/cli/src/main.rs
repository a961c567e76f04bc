use std::process::ExitCode;

use covboost_cli::{run, CliError};

fn main() -> ExitCode {
    match run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                // already rendered by clap
                CliError::Usage(msg) if msg.starts_with("error:") => eprint!("{msg}"),
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
