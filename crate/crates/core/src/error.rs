use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} did not converge after {iterations} steps")]
    NonConvergence { what: &'static str, iterations: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("invalid spin channel: {0}")]
    InvalidChannel(String),
    #[error("grid too small: n = {0} (need a power of two >= 8)")]
    GridTooSmall(usize),
    #[error("fit failure: {0}")]
    FitFailure(String),
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::FitFailure(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
