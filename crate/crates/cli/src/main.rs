use std::io;
use std::process::ExitCode;

use clap::Parser;
use tddc_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli, &mut io::stdout().lock(), &mut io::stderr().lock()) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("tddc: {}", failure.message());
            failure.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
