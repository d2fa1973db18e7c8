use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The central gravity model was evaluated at the origin.
    #[error("gravity model evaluated at the singular point rho = 0")]
    Singularity,
    /// A numerical stage produced a non-finite value or failed to converge.
    #[error("numerical failure in {stage}: {detail}")]
    Numerical { stage: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn numerical(stage: &'static str, detail: impl Into<String>) -> Error {
    Error::Numerical {
        stage,
        detail: detail.into(),
    }
}
