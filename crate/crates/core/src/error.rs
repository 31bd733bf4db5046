use thiserror::Error;

/// Errors raised by the reconstruction toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unknown phantom `{0}` (expected shepp-logan, thorax or unit-ball)")]
    UnknownPhantom(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("matrix is rank deficient at column {column} (|r_kk| = {value:e})")]
    RankDeficient { column: usize, value: f64 },

    #[error("row has zero norm; projection is undefined")]
    ZeroRow,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
