use std::process::ExitCode;

use clap::Parser;
use smilewing_cli::{execute, exit_code, Cli};

fn main() -> ExitCode {
    let filters = std::env::var("SMILEWING_LOG").unwrap_or_else(|_| "warn".to_string());
    env_logger::Builder::new().parse_filters(&filters).init();
    let cli = Cli::parse();
    let result = execute(&cli);
    match &result {
        Ok(o) => print!("{}", o.text),
        Err(e) => eprintln!("smilewing: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
