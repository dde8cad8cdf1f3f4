//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building shapes, evaluating
/// densities, or fitting models.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or configuration dimensions are inconsistent with the call.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A matrix required to be symmetric positive definite is not.
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// The Helmertized configuration has rank below `min(N-1, K)`.
    #[error("rank-deficient configuration: {0}")]
    RankDeficient(String),

    /// The multivariate gamma function was evaluated at a pole.
    #[error("multivariate gamma pole: Gamma_{n}({a}) hits a nonpositive-integer argument")]
    GammaPole { n: usize, a: f64 },

    /// A radial integral with exponent <= -1 diverges at the origin.
    #[error("divergent radial integral: exponent {exponent} <= -1")]
    DivergentIntegral { exponent: f64 },

    /// A scalar argument left its admissible range.
    #[error("argument out of range: {0}")]
    OutOfRange(String),

    /// An iterative routine exhausted its budget without meeting its
    /// stopping rule.
    #[error("failed to converge: {0}")]
    Nonconvergence(String),

    /// A density or likelihood evaluated to a nonpositive value, so its
    /// logarithm is undefined (usually a truncation artifact).
    #[error("nonpositive density: {0}")]
    NonpositiveDensity(String),

    /// Landmark data could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Landmark data parsed but violates a dataset invariant.
    #[error("invalid dataset: {0}")]
    InvalidData(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
