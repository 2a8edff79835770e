use crate::models::Model;
use crate::symbolic::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimension n = {0}; need n >= 2")]
    InvalidDimension(usize),

    #[error("generator {0} is out of range for this dimension")]
    GeneratorOutOfRange(String),

    #[error("unknown generator name {0:?}")]
    UnknownGenerator(String),

    #[error("matrix is not in so(n,1): residual {0:e}")]
    NotInAlgebra(f64),

    #[error("matrix is not in SO0(n,1): {0}")]
    NotInGroup(String),

    #[error("invalid {model} point: {reason}")]
    InvalidPoint { model: Model, reason: String },

    #[error("expected a {expected} point, got a {got} point")]
    WrongModel { expected: Model, got: Model },

    #[error("operation is undefined at the chart point at infinity")]
    AtInfinity,

    #[error("geodesic endpoints coincide")]
    CoincidentEndpoints,

    #[error("point is not on the boundary sphere (|p| = {0})")]
    NotOnBoundary(f64),

    #[error("invalid reparametrization: {0}")]
    InvalidReparam(String),

    #[error("reparametrization inverse failed for log-value {0}")]
    InverseFailed(f64),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("rational arithmetic overflow")]
    Overflow,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate sample spread: {0:.2} decades (need at least 2)")]
    DegenerateSpread(f64),

    #[error("singular at the boundary y = 0")]
    SingularAtBoundary,

    #[error("unknown tolerance {0:?}")]
    UnknownTolerance(String),

    #[error("tolerance {name} must be > 0, got {value}")]
    NonPositiveTolerance { name: String, value: f64 },
}
