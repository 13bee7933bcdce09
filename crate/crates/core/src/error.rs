use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma function at non-positive integer {0}")]
    GammaPole(i64),
    #[error("riemann zeta evaluated at its pole s = 1")]
    ZetaPole,
    #[error("zeta function evaluated on its pole from source {0}")]
    Pole(String),
    #[error("outside the supported domain: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("shift {shift} does not fit in a window of dimension {dim}")]
    WindowTooSmall { shift: i64, dim: usize },
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("directional limits disagree: {0}")]
    InconsistentLimits(String),
    #[error("value is singular here: {0}")]
    Singular(String),
    #[error("linear program failed: {0}")]
    Solver(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
