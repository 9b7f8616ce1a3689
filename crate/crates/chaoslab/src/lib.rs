//! Numerical laboratory for heavy-tailed quadratic chaos and restricted
//! isometries.
//!
//! The crate bundles the pieces needed to study second-order chaos
//! `ξᵀAξ` driven by α-subexponential scalar sources (`1 ≤ α ≤ 2`), the
//! mixed-norm deviation bounds that control such chaos, and their
//! consequences for structured random measurement operators:
//!
//! - [`stream`]: deterministic hierarchical RNG streams (seed + label path).
//! - [`samplers`]: symmetric Weibull and power-exponential sources,
//!   standardization, and empirical Orlicz `ψ_α` norms.
//! - [`structured`]: FFT-backed partial circulant and Gabor synthesis
//!   operators, their `V_x` companions, and dense ensembles.
//! - [`norms`]: exact and interval-certified matrix norms (`ℓ_p(ℓ_2)`,
//!   `ℓ_p → ℓ_q` operator norms).
//! - [`chaos`]: Monte Carlo chaos sampling, moment/tail estimators, and
//!   Hanson–Wright-type bound evaluation.
//! - [`chaining`]: covering-number models, Dudley-type entropy integrals,
//!   and sample-complexity predictions.
//! - [`rip`]: restricted isometry constants, exact and Monte Carlo, with
//!   success-probability scans over the number of measurements.
//! - [`recovery`]: ADMM basis pursuit and phase-transition experiments.
//! - [`report`]: deterministic CSV/JSON artifact emission with
//!   content-hashed run manifests.
//!
//! Every stochastic routine takes an explicit [`stream::RngStream`]; results
//! are bitwise reproducible for a fixed master seed regardless of thread
//! count. Data-parallel loops are gated behind the default `parallel`
//! feature and fall back to sequential equivalents when it is disabled.

pub mod chaining;
pub mod chaos;
pub mod norms;
pub mod par;
pub mod recovery;
pub mod report;
pub mod rip;
pub mod samplers;
pub mod stream;
pub mod structured;

pub use nalgebra;
pub use num_complex;

/// Errors shared across the crate's numerical modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its documented domain (shape, size, exponent…).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An exhaustive enumeration would exceed its configured budget.
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    /// An internal cross-check failed (e.g. FFT imaginary residue too large).
    #[error("internal consistency check failed: {0}")]
    ConsistencyCheck(String),

    /// Underlying I/O failure while reading or writing artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
