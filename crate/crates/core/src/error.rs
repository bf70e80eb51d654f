use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("resource limit exceeded: {what} requested {requested}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("growth bound violated at n={n}: w_n={w_n} outside [{lower}, {upper}]")]
    GrowthBound {
        n: u32,
        w_n: usize,
        lower: f64,
        upper: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unsupported graph {graph} for {operation}")]
    UnsupportedGraph { graph: String, operation: &'static str },

    #[error(
        "covariance matrix is not positive definite: leading minor {leading_minor} fails, \
         smallest eigenvalue {min_eigenvalue:.3e}"
    )]
    NotPositiveDefinite {
        leading_minor: usize,
        min_eigenvalue: f64,
    },

    #[error("kernel is not a contraction: spectrum spans [{min:.6}, {max:.6}]")]
    KernelNotContraction { min: f64, max: f64 },

    #[error("duplicate points in {0}")]
    DuplicatePoints(&'static str),

    #[error("point sets overlap")]
    Overlap,

    #[error("point is outside the window")]
    OutsideWindow,

    #[error("missing sub-moment for sites {sites:?} with powers {powers:?}")]
    MissingSubSpec { sites: Vec<usize>, powers: Vec<u32> },

    #[error("too few replicates: need at least {needed}, got {got}")]
    TooFewReplicates { needed: usize, got: usize },

    #[error("sample has zero variance")]
    ZeroVariance,

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("window margin violated: {0}")]
    MarginViolated(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("at n={n}, replicate {replicate}: {source}")]
    Replicate {
        n: u32,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Validation problems (bad input) as opposed to runtime or resource failures.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidParameter { .. }
            | Error::UnsupportedGraph { .. }
            | Error::DuplicatePoints(_)
            | Error::Overlap
            | Error::OutsideWindow
            | Error::Parse { .. }
            | Error::Config { .. }
            | Error::DegenerateGrid(_)
            | Error::MarginViolated(_)
            | Error::TooFewReplicates { .. } => true,
            Error::Replicate { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
