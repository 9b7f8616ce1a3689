//! Structured random measurement operators and their companions.
//!
//! The operators here share one normalization convention: for a properly
//! standardized generating source, `E ‖Φx‖₂² = ‖x‖₂²` for every fixed
//! vector `x`. Concretely:
//!
//! - [`PartialCirculantOp`]: `Φ = (1/√m) R_Ω H_z`, where `H_z` is the full
//!   circulant matrix `(H_z)_{j,k} = z_{(j−k) mod n}` and `R_Ω` restricts to
//!   the row subset `Ω` (ascending order). Applied via FFT in
//!   `O(n log n)`.
//! - [`GaborOp`]: the `m × m²` synthesis matrix of the full time-frequency
//!   shift system `π(k, l) = M^l T^k` generated by a window `h ∈ ℂ^m`;
//!   isotropy holds for `h = η/√m` with standardized `η`. Applied via
//!   per-shift FFTs in `O(m² log m)`.
//! - [`build_vx_circulant`] / [`build_vx_gabor`]: the linear companions
//!   `V_x` satisfying the exchange identities `V_x z = Φ_z x` and
//!   `V_x η = Ψ_h x` (`h = η/√m`), which recast suprema over signals as
//!   chaos in the generating randomness. Both satisfy `‖V_x‖_F = ‖x‖₂`.
//! - [`DenseOp`]: explicit matrices, including i.i.d. ensembles with
//!   entries `ξ_ij/√m`.
//!
//! All modular index arithmetic is zero-based: `j ⊖ k = (j − k) mod n`.

mod circulant;
mod dense;
mod export;
mod fft;
mod gabor;
mod vx;

pub use circulant::{PartialCirculantOp, PartialCirculantSpec};
pub use dense::{AnyOp, DenseOp, EnsembleKind, EnsembleSpec};
pub use export::{read_dense_csv, write_dense_csv};
pub use fft::{circular_convolve, circular_cross_correlate, fft_forward, fft_inverse};
pub use gabor::{time_frequency_shift, GaborOp, GaborSpec};
pub use vx::{build_vx_circulant, build_vx_gabor};

use crate::Result;
use nalgebra::{ComplexField, DMatrix, DVector};

/// Cyclic difference `(j − k) mod n` for zero-based indices `j, k < n`.
#[inline]
pub(crate) fn cyclic_sub(j: usize, k: usize, n: usize) -> usize {
    debug_assert!(j < n && k < n);
    (j + n - k) % n
}

/// A linear measurement map `Φ: 𝔽^n → 𝔽^m` with fast apply/adjoint paths.
///
/// Implementations must be thread-safe; `apply`/`adjoint` return an error
/// on dimension mismatch, while `column` panics on an out-of-range index
/// (callers iterate over `0..cols()`).
pub trait MeasurementOp<T: ComplexField<RealField = f64>>: Send + Sync {
    /// Number of measurements `m`.
    fn rows(&self) -> usize;
    /// Ambient dimension `n`.
    fn cols(&self) -> usize;
    /// `Φ x`.
    fn apply(&self, x: &DVector<T>) -> Result<DVector<T>>;
    /// `Φ* y` (conjugate transpose).
    fn adjoint(&self, y: &DVector<T>) -> Result<DVector<T>>;

    /// The `j`-th column of `Φ` as a dense vector.
    fn column(&self, j: usize) -> DVector<T> {
        assert!(j < self.cols(), "column index out of range");
        let mut e = DVector::zeros(self.cols());
        e[j] = T::one();
        self.apply(&e).expect("unit vector has matching dimension")
    }

    /// Dense materialization, column by column.
    fn to_dense(&self) -> DMatrix<T> {
        let cols: Vec<DVector<T>> = (0..self.cols()).map(|j| self.column(j)).collect();
        DMatrix::from_columns(&cols)
    }
}
