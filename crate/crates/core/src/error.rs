use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (defect {defect:.3e} > {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("element is not positive (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("range inclusion fails: T X = T' has no solution (defect {defect:.3e})")]
    NoSolution { defect: f64 },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("family is not tight for the given operator: {0}")]
    NotTight(String),

    #[error("family is not a dual for the given operator (defect {defect:.3e})")]
    DualityFailed { defect: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("synthesis operators are not orthogonal (‖T_Υ T_Φ*‖ = {defect:.3e})")]
    NotOrthogonal { defect: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("unsupported theorem kind: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
