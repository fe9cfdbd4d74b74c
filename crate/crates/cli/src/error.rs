use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] monocurv_core::Error),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error("conjecture scan found violations: {0}")]
    Violation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// 2 for bad input, 3 for a failed internal cross-check, 4 for a
    /// conjecture violation.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::CrossCheck(_) => 3,
            Error::Violation(_) => 4,
            _ => 2,
        }
    }
}
