use thiserror::Error;

/// Errors raised by the numerical kernel, the module model and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence | Error::NotPsd { .. } | Error::NotHermitian { .. }
        )
    }
}
