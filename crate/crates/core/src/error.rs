use thiserror::Error;

/// Errors raised anywhere in the confined-hydrogen pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("1F1({a}, {b}, {x}) did not converge within {terms} terms")]
    HypergeometricNonConvergence { a: f64, b: f64, x: f64, terms: usize },

    #[error("spherical Bessel order {0} is not supported (0..=4)")]
    UnsupportedOrder(usize),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("grid of {points} points cannot resolve {expected} radial nodes")]
    Resolution { points: usize, expected: usize },

    #[error("energy not converged under refinement: last estimates {previous} and {last}")]
    Convergence { previous: f64, last: f64 },

    #[error("wrong eigen-branch: expected {expected} nodes, found {found}")]
    WrongBranch { expected: usize, found: usize },

    #[error("quadrature did not converge; worst panel [{lo}, {hi}] changed by {delta:e}")]
    Quadrature { lo: f64, hi: f64, delta: f64 },

    #[error("momentum cutoff {p_max} too small (tail mass {tail_mass:e}); try p_max >= {suggested}")]
    CutoffTooSmall {
        p_max: f64,
        tail_mass: f64,
        suggested: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
