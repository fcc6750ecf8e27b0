use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last sup-norm delta {delta:e})")]
    NoConvergence { iterations: usize, delta: f64 },

    #[error("quadrature did not converge within budget (last estimate {last})")]
    QuadratureBudget { last: f64 },

    #[error("empty sample set")]
    EmptySamples,
}

pub type Result<T> = std::result::Result<T, Error>;
