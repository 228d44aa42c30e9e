use std::path::Path;

/// Errors produced by the library.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Not enough samples to estimate the requested quantity.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An iterative routine failed to converge within its bound.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// No threshold achieves the requested rate on the given spectrum.
    #[error("infeasible rate: {0}")]
    InfeasibleRate(String),

    /// A linear system is singular (and regularization does not apply).
    #[error("singular matrix: {0}")]
    Singular(String),

    /// The training data carries no usable signal (zero covariance).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Matrix/vector dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A data or model file violates its container format.
    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    /// Underlying I/O failure, annotated with the path involved.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn format(path: &Path, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.display().to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
