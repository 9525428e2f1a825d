use thiserror::Error;

/// Failures of a CLI command, each mapped to a distinct exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{origin}:{line}: {msg}")]
    Parse { origin: String, line: usize, msg: String },

    #[error("validation: {0}")]
    Validation(String),

    #[error("cell failure: {0}")]
    Cell(String),

    #[error("{0}")]
    Budget(flagcode::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Validation(_) => 3,
            CliError::Cell(_) => 4,
            CliError::Budget(_) => 5,
        }
    }

    pub(crate) fn parse(origin: &str, line: usize, msg: impl Into<String>) -> Self {
        CliError::Parse { origin: origin.to_string(), line, msg: msg.into() }
    }
}

impl From<flagcode::Error> for CliError {
    fn from(e: flagcode::Error) -> Self {
        match e {
            flagcode::Error::Cell(msg) => CliError::Cell(msg),
            e @ flagcode::Error::Budget { .. } => CliError::Budget(e),
            flagcode::Error::InvalidField(msg) => CliError::Usage(format!("invalid field: {msg}")),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
