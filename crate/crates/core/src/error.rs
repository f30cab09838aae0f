use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial has terms outside the analytic cone (negative exponents)")]
    NotAnalytic,

    #[error("exact arithmetic required but a floating coefficient was found")]
    NotExact,

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("quadrature did not converge: best estimate {value} with error bound {error}")]
    Nonconvergence { value: f64, error: f64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
