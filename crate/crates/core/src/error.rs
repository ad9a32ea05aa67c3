use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field has nonzero mean (|c0| = {mean:e}, ||f|| = {norm:e})")]
    NonzeroMean { mean: f64, norm: f64 },

    #[error("vector field is not divergence-free (||div|| / ||f|| = {ratio:e})")]
    NotDivergenceFree { ratio: f64 },

    #[error("non-finite spectral coefficient at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("grid size {0} must be a power of two and at least 8")]
    InvalidGridSize(usize),

    #[error("fields live on different grids ({0} vs {1})")]
    GridMismatch(usize, usize),

    #[error("parameter choice inconsistent with regime: {0}")]
    RegimeMismatch(String),

    #[error("need at least two diagnostic samples, got {0}")]
    InsufficientSamples(usize),

    #[error("exponent p = {0} must be an even integer >= 2")]
    OddP(f64),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("denominator vanishes")]
    ZeroDenominator,

    #[error("Hölder exponents do not match: {0}")]
    ExponentMismatch(String),

    #[error("invalid initial condition: {0}")]
    BadSpec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("checkpoint header is corrupt or missing magic bytes")]
    CorruptHeader,

    #[error("checkpoint version {found} not supported (expected {expected})")]
    VersionMismatch { found: u8, expected: u8 },

    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
