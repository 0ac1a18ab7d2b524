mod emit;
mod opts;
mod run;

use std::process::ExitCode;

fn main() -> ExitCode {
    match run::dispatch() {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
