use std::fmt;

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or unusable paths (exit 2).
    Config(String),
    /// A numerical routine failed (exit 3).
    Numerical { op: String, detail: String },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn numerical(op: impl Into<String>, err: impl fmt::Display) -> Self {
        CliError::Numerical {
            op: op.into(),
            detail: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical { op, detail } => write!(f, "numerical failure in {op}: {detail}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
