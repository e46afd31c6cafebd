//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by the numerical laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// A group specification failed validation (series/rank range, center order).
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    /// A parameter is outside the mathematical domain of an operation.
    #[error("parameter out of range: {0}")]
    Domain(String),

    /// The dense structure-constant tensor would exceed the memory guard.
    #[error("algebra dimension {dim_alg} exceeds the dense-tensor guard of {max}")]
    SizeGuard { dim_alg: usize, max: usize },

    /// A structure constant came out with a non-negligible imaginary part,
    /// which means the input basis is not a real basis of a compact algebra.
    #[error("structure constant c[{i}][{j}][{k}] has imaginary part {imag:.3e} (tolerance 1e-12)")]
    BasisCorruption {
        i: usize,
        j: usize,
        k: usize,
        imag: f64,
    },

    /// The Killing matrix is not proportional to the identity, so the input
    /// algebra is not simple and the chi coefficient is undefined.
    #[error("Killing matrix deviates from -chi*I by {spread:.3e} (tolerance {tol:.1e}); input algebra is not simple")]
    NotSimple { spread: f64, tol: f64 },

    /// Not enough data to run a diagnostic (for example a trend test needs
    /// at least three family members per epsilon).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Quadrature grid too coarse for the oscillation of the integrand.
    #[error("resolution too low: {got} quadrature points, need at least {needed} for n = {n}")]
    Resolution { got: usize, needed: usize, n: u32 },

    /// A rescaling was requested on a family whose Ricci input is not
    /// bounded below by a positive constant.
    #[error("non-positive Ricci input {value} at index {index}; rescaling criterion inapplicable")]
    NonPositiveRicci { index: usize, value: f64 },

    /// File I/O failure while writing or reading a sample dump.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A binary sample dump had a malformed or foreign header.
    #[error("malformed sample dump: {0}")]
    MalformedDump(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
