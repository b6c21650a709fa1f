use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A divergence is +∞ because the reference puts zero mass where the
    /// other argument does not. Kept apart from ordinary overflow.
    #[error("infinite divergence: {0}")]
    InfiniteDivergence(String),

    #[error("undefined value: {0}")]
    Undefined(String),

    #[error("power iteration did not converge after {iters} iterations (last estimate {last})")]
    Convergence { iters: usize, last: f64 },

    #[error("truncated posterior is degenerate: acceptance rate {rate:.3e} below 1e-3")]
    TruncationDegenerate { rate: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate risk: {0}")]
    DegenerateRisk(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
