use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("invalid chain complex: {0}")]
    InvalidComplex(String),
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("fault detected: {0}")]
    DetectedFault(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource limit exceeded: {0}")]
    Limit(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
