use std::path::PathBuf;

/// Errors raised by the simulator.
///
/// Structural findings (broken invariants, conformance violations) are
/// returned as data and never show up here.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rd curves do not overlap in quality ({anchor_lo:.3}..{anchor_hi:.3} dB vs {test_lo:.3}..{test_hi:.3} dB)")]
    NoOverlap {
        anchor_lo: f64,
        anchor_hi: f64,
        test_lo: f64,
        test_hi: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable name used in CLI messages.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::NoOverlap { .. } => "no-overlap",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// Domain findings are 1, bad input is 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoOverlap { .. } => 1,
            _ => 2,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
