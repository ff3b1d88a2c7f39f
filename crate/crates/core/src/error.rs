use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site {site} is outside a lattice of {len} sites")]
    InvalidSite { site: usize, len: usize },

    #[error("height {0} is out of range (expected 1 or 2)")]
    HeightOutOfRange(u8),

    #[error("expected {expected} heights, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("a lattice needs at least 3 sites, got {0}")]
    LatticeTooSmall(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("statistic undefined: {0}")]
    Undefined(String),

    #[error("configuration is not wrap-safe: {0}")]
    NotWrapSafe(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("toppling did not stabilize within {cap} topplings")]
    ToppleCap { cap: usize },

    #[error("lattice of {n} sites is too large for {what} (limit {limit})")]
    TooLarge { n: usize, limit: usize, what: &'static str },

    #[error("chain is reducible")]
    Reducible,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("t = {t} is outside the trusted series window (t < {limit})")]
    OutsideWindow { t: f64, limit: f64 },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("config: {0}")]
    ConfigMissing(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad user input, as opposed to failures while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidSite { .. }
                | Error::HeightOutOfRange(_)
                | Error::LengthMismatch { .. }
                | Error::LatticeTooSmall(_)
                | Error::InvalidParameter(_)
                | Error::TooLarge { .. }
                | Error::OutsideWindow { .. }
                | Error::Config { .. }
                | Error::ConfigMissing(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
