use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample size n = {n} is below the minimum of {min}")]
    SampleTooSmall { n: usize, min: usize },

    #[error("band pair requires k > m, got m = {m}, k = {k}")]
    InvalidBandPair { m: usize, k: usize },

    #[error("bandwidth grid is empty")]
    EmptyGrid,

    #[error("functional/kernel pairing is not integrable: {0}")]
    NonIntegrable(String),

    #[error("quadrature did not converge with {nodes} nodes (relative change {change:e})")]
    QuadratureNotConverged { nodes: usize, change: f64 },

    #[error("point x0 = {x0} lies outside the density domain of the jump measure")]
    OutsideDensityDomain { x0: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("{failed} of {total} replications failed, above the 1% abort threshold")]
    TooManyFailures { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
