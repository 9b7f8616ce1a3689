//! Partial circulant measurement operators.

use super::fft::{circular_convolve, circular_cross_correlate};
use super::{cyclic_sub, MeasurementOp};
use crate::stream::RngStream;
use crate::{Error, Result};
use nalgebra::DVector;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// Shape of a partial circulant operator: ambient dimension `n` and the
/// retained row subset `Ω ⊆ {0, …, n−1}` (stored ascending).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialCirculantSpec {
    pub n: usize,
    pub omega: Vec<usize>,
}

impl PartialCirculantSpec {
    /// Validates the row subset: nonempty, in range, duplicate-free.
    /// The subset is normalized to ascending order.
    pub fn new(n: usize, mut omega: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "partial circulant: ambient dimension must be positive".into(),
            ));
        }
        if omega.is_empty() {
            return Err(Error::InvalidParameter(
                "partial circulant: row subset must be nonempty".into(),
            ));
        }
        if let Some(&bad) = omega.iter().find(|&&w| w >= n) {
            return Err(Error::InvalidParameter(format!(
                "partial circulant: row index {bad} out of range for n = {n}"
            )));
        }
        omega.sort_unstable();
        if omega.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(
                "partial circulant: row subset contains duplicates".into(),
            ));
        }
        Ok(PartialCirculantSpec { n, omega })
    }

    /// Uniformly random `m`-subset of `{0, …, n−1}`, ascending.
    pub fn random(n: usize, m: usize, stream: &RngStream) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidParameter(format!(
                "partial circulant: need 1 ≤ m ≤ n, got m = {m}, n = {n}"
            )));
        }
        let mut rng = stream.rng();
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        all.truncate(m);
        PartialCirculantSpec::new(n, all)
    }

    pub fn m(&self) -> usize {
        self.omega.len()
    }
}

/// `Φ = (1/√m) R_Ω H_z` for a generating vector `z ∈ ℝ^n`, applied via FFT.
#[derive(Clone, Debug)]
pub struct PartialCirculantOp {
    z: DVector<f64>,
    spec: PartialCirculantSpec,
    scale: f64,
}

impl PartialCirculantOp {
    pub fn new(z: DVector<f64>, spec: PartialCirculantSpec) -> Result<Self> {
        if z.len() != spec.n {
            return Err(Error::DimensionMismatch(format!(
                "partial circulant: generator length {} vs ambient dimension {}",
                z.len(),
                spec.n
            )));
        }
        let scale = 1.0 / (spec.m() as f64).sqrt();
        Ok(PartialCirculantOp { z, spec, scale })
    }

    pub fn generator(&self) -> &DVector<f64> {
        &self.z
    }

    pub fn spec(&self) -> &PartialCirculantSpec {
        &self.spec
    }
}

impl MeasurementOp<f64> for PartialCirculantOp {
    fn rows(&self) -> usize {
        self.spec.m()
    }

    fn cols(&self) -> usize {
        self.spec.n
    }

    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.spec.n {
            return Err(Error::DimensionMismatch(format!(
                "partial circulant apply: input length {} vs {}",
                x.len(),
                self.spec.n
            )));
        }
        let full = circular_convolve(&self.z, x)?;
        Ok(DVector::from_iterator(
            self.spec.m(),
            self.spec.omega.iter().map(|&w| self.scale * full[w]),
        ))
    }

    fn adjoint(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        if y.len() != self.spec.m() {
            return Err(Error::DimensionMismatch(format!(
                "partial circulant adjoint: input length {} vs {}",
                y.len(),
                self.spec.m()
            )));
        }
        // Scatter y back to the full index set, then apply H_zᵀ.
        let mut padded = DVector::zeros(self.spec.n);
        for (i, &w) in self.spec.omega.iter().enumerate() {
            padded[w] = y[i];
        }
        Ok(circular_cross_correlate(&self.z, &padded)? * self.scale)
    }

    fn column(&self, j: usize) -> DVector<f64> {
        assert!(j < self.spec.n, "column index out of range");
        DVector::from_iterator(
            self.spec.m(),
            self.spec
                .omega
                .iter()
                .map(|&w| self.scale * self.z[cyclic_sub(w, j, self.spec.n)]),
        )
    }
}
