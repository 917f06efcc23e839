//! Error type shared across the crate.

use thiserror::Error;

/// Unified error type for solver, transform, and I/O failures.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// A precondition on the wedge configuration or on a field
    /// (tangency, divergence-freeness, decay, ...) is violated.
    #[error("admissibility violation: {0}")]
    Admissibility(String),
    /// A Mellin line or mode hits (or comes too close to) a pole of one of
    /// the closed-form kernels.
    #[error("resonance: {0}")]
    Resonance(String),
    /// A field does not decay at the radial grid ends, so a transform line
    /// lies outside the convergence strip.
    #[error("insufficient decay: {0}")]
    Decay(String),
    /// NaN or infinity encountered.
    #[error("non-finite value: {0}")]
    NonFinite(String),
    /// An iterative procedure failed to converge; carries diagnostics.
    #[error("no convergence: {0}")]
    Convergence(String),
    /// Bad argument combination (wrong line abscissa, arity mismatch, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
