use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The body's support data violates positivity, symmetry or convexity.
    #[error("body definition error: {0}")]
    BodyDefinition(String),

    #[error("body is not strictly convex: {0}; use a smooth approximation such as an lp-ball with finite p")]
    NotStrictlyConvex(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A slice or line lies inside the zero set.
    #[error("infinite count: {0}")]
    InfiniteCount(String),

    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("spectrum certificate failed after {attempts} attempt(s): gauge max {gauge_max}")]
    CertificateFailed { gauge_max: f64, attempts: usize },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::BodyDefinition(_) => "body_definition",
            Error::NotStrictlyConvex(_) => "not_strictly_convex",
            Error::Unsupported(_) => "unsupported",
            Error::InfiniteCount(_) => "infinite_count",
            Error::ResolutionTooCoarse(_) => "resolution_too_coarse",
            Error::CertificateFailed { .. } => "certificate_failed",
            Error::Internal(_) => "internal",
        }
    }
}

pub(crate) fn ensure_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
