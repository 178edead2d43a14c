//! Command-line front end: wing classification, smile and tail curves, and
//! verification of a configured model.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod registry;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_classify, cmd_smile, cmd_tails, Outcome, ReportRow, Run};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
pub use verify::{cmd_verify, Check, Status};

#[derive(Debug, Parser)]
#[command(name = "smilewing", version, about = "Implied-volatility wing asymptotics from moment generating functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical exponents, criteria, predicted and fitted wing slopes.
    Classify(CommonArgs),
    /// Total implied variance per maturity with slope lines.
    Smile(CommonArgs),
    /// Log-tail ratios per maturity and side.
    Tails(CommonArgs),
    /// Run the invariant suite; exit 1 if any check fails.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, overriding `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Maturity in years; repeat to override `maturities`.
    #[arg(long = "maturity")]
    pub maturities: Vec<f64>,
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Classify(a) | Command::Smile(a) | Command::Tails(a) | Command::Verify(a) => a,
        }
    }
}

/// Runs a parsed command and returns its outcome.
pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let a = cli.command.args();
    let run = Run::load(&a.config, a.out.clone(), &a.maturities)?;
    match cli.command {
        Command::Classify(_) => cmd_classify(&run).map(|(_, o)| o),
        Command::Smile(_) => cmd_smile(&run),
        Command::Tails(_) => cmd_tails(&run),
        Command::Verify(_) => cmd_verify(&run).map(|(_, o)| o),
    }
}

/// Process exit code: 0 ok, 1 failed verification, 2 configuration error,
/// 3 numerical failure.
pub fn exit_code(result: &CliResult<Outcome>) -> i32 {
    match result {
        Ok(o) if o.passed => 0,
        Ok(_) => 1,
        Err(e) => e.exit_code(),
    }
}
