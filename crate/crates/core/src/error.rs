use thiserror::Error;

/// Errors raised by the spectral-gap toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what} of size {size} exceeds the limit {limit}; {hint}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
        hint: &'static str,
    },

    #[error("eigensolver did not converge after {iterations} iterations (best Ritz values {best:?})")]
    NotConverged {
        iterations: usize,
        best: Vec<f64>,
        residuals: Vec<f64>,
    },

    #[error("ground state not annihilated: lowest eigenvalue {lowest:e} exceeds zero threshold {threshold:e}")]
    GroundStateNotAnnihilated { lowest: f64, threshold: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("interface phase unsolvable for mu = {mu} on window {window}; enlarge the window")]
    EnlargeWindow { mu: f64, window: usize },

    #[error("R too small for this q: 4J^2 R q^(2R) = {value} >= 1")]
    TailBoundInvalid { value: f64 },

    #[error("first excitation is infinitely degenerate for two_j = {two_j}, n = {n}; curvature is infinite")]
    InfiniteDegeneracy { two_j: u32, n: u32 },

    #[error("integer overflow while counting configurations")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
