use thiserror::Error;

/// Errors raised by the laboratory.
///
/// Contract violations are returned rather than panicking so that batch
/// scenarios can report them as machine-readable errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("point {0:?} lies outside the map domain")]
    OutsideDomain(Vec<f64>),

    #[error("branch point: preimages coalesce at {0:?}")]
    BranchPoint(Vec<f64>),

    #[error("degenerate Jacobian (det = {det:e}) at {at:?}")]
    DegenerateJacobian { at: Vec<f64>, det: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
