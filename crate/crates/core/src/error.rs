use thiserror::Error;

/// Errors raised by the numerical kernels and the ensemble machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func} did not converge within {terms} terms")]
    Convergence { func: &'static str, terms: usize },

    #[error("quadrature failed for index j={index}: {detail}")]
    Quadrature { index: usize, detail: String },

    #[error("{0} is not available for this potential")]
    Unsupported(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
