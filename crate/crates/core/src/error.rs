use thiserror::Error;

/// Errors raised by the curvature engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument must be strictly positive (got {0})")]
    NonPositive(f64),

    #[error("{0:?} is not a built-in metric kind")]
    NotBuiltin(crate::mcfun::MetricKind),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension too small: need at least {min}, found {found}")]
    DimensionTooSmall { min: usize, found: usize },

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("state is not normalized (trace {0})")]
    NotNormalized(f64),

    #[error("tangent vector is not traceless (trace {0:e})")]
    NotTraceless(f64),

    #[error("vectors are not orthogonal (relative inner product {0:e})")]
    NotOrthogonal(f64),

    #[error("zero tangent vector")]
    ZeroVector,

    #[error("metric coefficient matrix is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("companion polynomial evaluation is numerically singular")]
    SingularCompanion,

    #[error("spectra have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("spectra have different sums ({0} vs {1})")]
    SumMismatch(f64, f64),

    #[error("expected x < y (got x = {0}, y = {1})")]
    OrderViolation(f64, f64),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("mixing parameter {0} outside [0, 1]")]
    InvalidMixing(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonPositive(x))
    }
}
