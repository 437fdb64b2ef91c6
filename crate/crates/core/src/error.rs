//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("too few extrema to build envelopes ({maxima} maxima, {minima} minima)")]
    TooFewExtrema { maxima: usize, minima: usize },

    #[error("no IMF carries a significant low-frequency component")]
    NoModeFound,

    #[error("no admissible mode-shape window: {0}")]
    NoAdmissibleWindow(String),

    #[error("modal targets are infeasible: {0}")]
    InfeasibleTarget(String),

    #[error("integration unstable at t = {t:.4} s: story {story} drift {drift:.3e} m")]
    Unstable { t: f64, story: usize, drift: f64 },

    #[error("feature matrix is rank-deficient at ridge = 0; train with a nonzero ridge")]
    RankDeficient,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("training window too short: {0}")]
    WindowTooShort(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },

    #[error("{}: content hash mismatch (recorded {recorded}, found {found})", path.display())]
    HashMismatch {
        path: PathBuf,
        recorded: String,
        found: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
