use std::fmt;

/// Failures with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or out-of-range numeric input (exit 2).
    Numeric(String),
    /// The output path cannot be written (exit 3).
    Output(String),
    /// A verification check failed (exit 1).
    Failed(String),
    /// The computation itself failed, e.g. a time outside the lifespan (exit 4).
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Output(_) => 3,
            CliError::Other(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Numeric(m) => write!(f, "invalid numeric input: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
            CliError::Failed(m) => write!(f, "verification failed: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<nlw_duffing::Error> for CliError {
    fn from(e: nlw_duffing::Error) -> Self {
        match e {
            nlw_duffing::Error::Parameter(m) => CliError::Numeric(m),
            other => CliError::Other(other.to_string()),
        }
    }
}
