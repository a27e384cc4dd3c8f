use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("point {0} lies on the slit or a partition boundary")]
    SlitBoundary(Complex64),

    #[error("point {0} is numerically at a critical value")]
    NearCritical(Complex64),

    #[error("ray {address} crashes into a critical point near potential t = {t}")]
    RayCrash { address: String, t: f64 },

    #[error("ray tracing needs potential >= {needed} at the seed level but reached {t} (increase depth)")]
    InsufficientDepth { t: f64, needed: f64 },

    #[error("landing points disagree: internal ray at {internal}, dynamic ray at {dynamic}")]
    LandingMismatch {
        internal: Complex64,
        dynamic: Complex64,
    },

    #[error("orbit point {0} lies on the puzzle graph; switch to another ray pair")]
    GraphCollision(Complex64),

    #[error("preimage curve failed to close: gap {gap:.3e} near {at}")]
    Refinement { gap: f64, at: Complex64 },

    #[error("M = {m} too small: R is not compactly contained in the ellipse (try M >= {suggested})")]
    MTooSmall { m: f64, suggested: f64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("numerical inconsistency: {0}")]
    Inconsistent(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line tool: 2 for bad input or an
    /// unmet precondition, 3 for a failed numerical certification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::Precondition(_)
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::SlitBoundary(_)
            | Error::InsufficientDepth { .. }
            | Error::MTooSmall { .. } => 2,
            _ => 3,
        }
    }
}
