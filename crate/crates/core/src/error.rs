use thiserror::Error;

/// Errors raised anywhere in the decoding pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract error: {0}")]
    Contract(String),
    #[error("split error: {0}")]
    Split(String),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("channel validation failed: {0}")]
    Validation(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("syndrome has zero probability under the noise model")]
    ZeroProbability,
    #[error("diamond-norm optimizer did not converge (best lower bound {best_lower_bound})")]
    NoConvergence { best_lower_bound: f64 },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
