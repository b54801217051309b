use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range (highest allowed {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("{what} = {value} is outside the admissible domain ({reason})")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature construction failed: {0}")]
    Construction(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("unsupported discretization variant: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("eigenvalue iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("system is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("solution blew up at t = {time} in stage {stage}")]
    BlowUp { time: f64, stage: usize },

    #[error("singular matrix")]
    Singular,
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
