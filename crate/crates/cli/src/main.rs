use std::process::ExitCode;

use peierls_cli::CliError;

fn main() -> ExitCode {
    match peierls_cli::run(std::env::args_os().skip(1)) {
        Ok(_) => ExitCode::SUCCESS,
        Err(CliError::Info(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("peierls: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
