use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude vector is empty")]
    EmptyState,

    #[error("amplitude vector has zero norm")]
    ZeroNorm,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("input is not normalized (squared norm {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid moments: {0}")]
    InvalidMoments(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("measurement element {index} is invalid: {reason}")]
    InvalidElement { index: usize, reason: String },

    #[error("measurement elements do not sum to identity (max deviation {deviation:e})")]
    Incomplete { deviation: f64 },

    #[error("target mean {target} is infeasible: {reason}")]
    Infeasible { target: f64, reason: String },

    #[error("truncation cap {cap} reached with tail mass {tail_mass:e}")]
    TruncationCap { cap: usize, tail_mass: f64 },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::TruncationCap { .. }
        )
    }
}
