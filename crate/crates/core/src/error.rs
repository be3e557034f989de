use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix dimension {0}; dimension must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("correlation {0} outside [-1, 1]")]
    InvalidCorrelation(f64),

    #[error("correlation {0} is degenerate; need |rho| < 1")]
    DegenerateCorrelation(f64),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("{what} = {value} is outside the domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("dimension m = {0} is not supported by exact quadrature (m <= 3); use the Monte Carlo estimator")]
    UnsupportedDimension(usize),

    #[error("exponent is not concave at the peak: second derivative {0} >= 0")]
    NonConcavePeak(f64),

    #[error("quadrature did not reach the requested accuracy: estimate {estimate}, error {error}")]
    AccuracyNotMet { estimate: f64, error: f64 },

    #[error("exhaustive search over n = {n} matrices exceeds the cap of {cap}; use heuristic mode")]
    SearchTooLarge { n: usize, cap: usize },

    #[error("empty ensemble")]
    EmptyEnsemble,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        expected,
    }
}
