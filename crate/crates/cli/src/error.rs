use thiserror::Error;

/// Failure of a scenario run, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("numerical error in {stage}: {message}")]
    Numerical { stage: String, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { path: path.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Library errors raised while building from field `path` are config errors;
    /// numerical ones keep their stage.
    pub fn from_core(path: &str, stage: &str, err: quadphase::Error) -> Self {
        match err {
            quadphase::Error::InvalidInput(m) => CliError::config(path, m),
            quadphase::Error::Numerical { stage, detail } => {
                CliError::Numerical { stage: stage.to_string(), message: detail }
            }
            other => CliError::Numerical { stage: stage.to_string(), message: other.to_string() },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
