use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A point is not in the open domain (outside, or on the boundary).
    #[error("point {point} is not inside domain `{domain}`")]
    OutsideDomain { domain: String, point: String },

    /// Invalid parameters or a violated construction invariant.
    #[error("validation error at `{field}`: {message}")]
    Validation { field: String, message: String },

    /// The domain/map spec document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Rejection sampling ran out of budget.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// The query points are not connected in the grid graph at this level.
    #[error("resolution error at level {level}: {message}")]
    Resolution { level: u32, message: String },

    /// A path left its domain or broke the path invariants.
    #[error("path error: {0}")]
    Path(String),

    /// A map sent a point outside its declared target, or its inverse disagrees.
    #[error("map consistency error: {0}")]
    MapConsistency(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn resolution(level: u32, message: impl Into<String>) -> Self {
        Error::Resolution {
            level,
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
