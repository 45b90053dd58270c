use thiserror::Error;

/// Errors raised by geometry, quadrature and certificate operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ambient mismatch: complex dimension {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("complex dimension must be at least 2, got {0}")]
    InvalidAmbient(usize),

    #[error("direction is not a unit vector (|x| = {norm})")]
    NonUnit { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("radial function below positivity floor: {value:e}")]
    Degenerate { value: f64 },

    #[error("tabulated body queried off its node set")]
    OffTable,

    #[error("unsupported sphere dimension {0} (supported: 2, 4, 6, 8)")]
    UnsupportedDimension(usize),

    #[error("operator needs {entries} entries, cap is {cap}")]
    MemoryCap { entries: usize, cap: usize },

    #[error("bisection bracket failure: {0}")]
    Bracket(String),

    #[error("empty dictionary")]
    EmptyDictionary,

    #[error("membership not certified (residual_rel = {residual_rel:e}, tol = {tol:e})")]
    NotCertified { residual_rel: f64, tol: f64 },

    #[error("degenerate measure: maximal section measure is zero")]
    ZeroSection,

    #[error("all-zero profiles")]
    ZeroProfiles,

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
