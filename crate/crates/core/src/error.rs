use thiserror::Error;

/// Errors raised by the exact kernels and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A floor or comparison of an irrational quantity could not be decided
    /// at the working precision.
    #[error("precision guard: {0}")]
    Precision(String),

    #[error("cap exceeded: {0}")]
    Cap(String),

    #[error("range error: {0}")]
    Range(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the `dsx` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::UndefinedRatio(_) | Error::Config(_) | Error::Json(_) => 2,
            Error::Precision(_) => 3,
            Error::Cap(_) | Error::Range(_) => 4,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
