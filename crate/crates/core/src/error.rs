use thiserror::Error;

/// Errors raised by density evaluation, sampling, solvers and the verification suite.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("grid does not cover [0, {needed}] (ends at {ends_at})")]
    GridCoverage { needed: f64, ends_at: f64 },

    #[error("statistical test input: {0}")]
    TestInput(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("parse: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T: num_traits::ToPrimitive>(what: &'static str, value: T) -> Error {
    Error::Domain {
        what,
        value: value.to_f64().unwrap_or(f64::NAN),
    }
}
