use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("sample exceeded the cap of {cap} moves")]
    CappedSample { cap: usize },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("no convergence: {0}")]
    NotConverged(String),
}

impl Error {
    /// Short machine-readable kind, used by structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Capacity(_) => "capacity",
            Error::CappedSample { .. } => "capped_sample",
            Error::Verification(_) => "verification",
            Error::Singular(_) => "singular",
            Error::NotConverged(_) => "not_converged",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
