use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operands live on different spaces (n_max {left} vs {right})")]
    SpaceMismatch { left: usize, right: usize },

    #[error("f1({n}, eta) has no sign change for eta in [{lo}, {hi}]")]
    NoSignChange { n: usize, lo: f64, hi: f64 },

    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("truncation n_max = {n_max} is too small; need at least {required}")]
    TruncationTooSmall { n_max: usize, required: usize },

    #[error("integration step too large: drift {drift:.3e} exceeds {limit:.1e}")]
    StepTooLarge { drift: f64, limit: f64 },

    #[error("density matrix lost positivity (smallest eigenvalue {min_eigenvalue:.3e})")]
    PositivityLoss { min_eigenvalue: f64 },

    #[error("eigendecomposition returned non-finite values")]
    NonFiniteEigen,

    #[error("no f1 zero below n_max = {n_max} for eta = {eta}")]
    NoBarrier { eta: f64, n_max: usize },

    #[error("{}", fmt_schema(.key, .message))]
    Schema {
        key: Option<String>,
        message: String,
    },

    #[error("unsupported schema_version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error(
        "truncation convergence failed: observables moved by {change:.3e} (limit {limit:.1e})"
    )]
    Convergence { change: f64, limit: f64 },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_schema(key: &Option<String>, message: &str) -> String {
    match key {
        Some(k) => format!("schema error at `{k}`: {message}"),
        None => format!("schema error: {message}"),
    }
}

/// Broad classes used to pick process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Schema,
    Numerical,
    Convergence,
    Other,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Schema { .. } | Error::SchemaVersion { .. } => ErrorClass::Schema,
            Error::NotHermitian { .. }
            | Error::StepTooLarge { .. }
            | Error::PositivityLoss { .. }
            | Error::NonFiniteEigen => ErrorClass::Numerical,
            Error::Convergence { .. } => ErrorClass::Convergence,
            _ => ErrorClass::Other,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
