use thiserror::Error;

/// Failures of a CLI run, each mapped to a fixed exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failed: {0}")]
    Solver(gfrac::Error),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Verify(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<gfrac::Error> for CliError {
    fn from(e: gfrac::Error) -> Self {
        use gfrac::Error as E;
        match e {
            E::InvalidParameter(_) | E::Precondition(_) | E::Parse(_) => CliError::Config(e.to_string()),
            E::Io(io) => CliError::Io(io),
            other => CliError::Solver(other),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
