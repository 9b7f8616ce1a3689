//! Gabor synthesis operators generated by time-frequency shifts.
//!
//! For a window `h ∈ ℂ^m`, the cyclic shift `T` and modulation `M` act as
//! `(Th)_j = h_{(j−1) mod m}` and `(Mh)_j = e^{2πij/m} h_j`. The system
//! `π(k, l) = M^l T^k`, `0 ≤ k, l < m`, is orthogonal in the Frobenius
//! inner product (`tr(π(λ)* π(λ')) = m δ_{λλ'}`), and the synthesis matrix
//! `Ψ_h ∈ ℂ^{m × m²}` has columns `π(k, l) h` indexed by `λ = k·m + l`
//! (shift-major).

use super::fft::{fft_forward, fft_inverse};
use super::{cyclic_sub, MeasurementOp};
use crate::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Shape of a Gabor synthesis operator: window length `m` (so `n = m²`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaborSpec {
    pub m: usize,
}

impl GaborSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "gabor: window length must be positive".into(),
            ));
        }
        Ok(GaborSpec { m })
    }

    pub fn n(&self) -> usize {
        self.m * self.m
    }

    /// Column index of the shift pair `(k, l)`.
    pub fn lambda(&self, k: usize, l: usize) -> usize {
        debug_assert!(k < self.m && l < self.m);
        k * self.m + l
    }

    /// Inverse of [`lambda`](GaborSpec::lambda).
    pub fn shift_pair(&self, lambda: usize) -> (usize, usize) {
        debug_assert!(lambda < self.n());
        (lambda / self.m, lambda % self.m)
    }
}

/// `π(k, l) h` computed directly in `O(m)`.
pub fn time_frequency_shift(h: &DVector<Complex<f64>>, k: usize, l: usize) -> DVector<Complex<f64>> {
    let m = h.len();
    DVector::from_fn(m, |j, _| {
        let phase = TAU * (l as f64) * (j as f64) / m as f64;
        Complex::from_polar(1.0, phase) * h[cyclic_sub(j, k, m)]
    })
}

/// Gabor synthesis operator `Ψ_h: ℂ^{m²} → ℂ^m`.
#[derive(Clone, Debug)]
pub struct GaborOp {
    h: DVector<Complex<f64>>,
    spec: GaborSpec,
}

impl GaborOp {
    pub fn new(h: DVector<Complex<f64>>) -> Result<Self> {
        let spec = GaborSpec::new(h.len())?;
        Ok(GaborOp { h, spec })
    }

    /// Window with the isotropy normalization `h = η/√m` applied to a real
    /// standardized generator `η`.
    pub fn from_real_generator(eta: &DVector<f64>) -> Result<Self> {
        let m = eta.len();
        let scale = 1.0 / (m as f64).sqrt();
        GaborOp::new(DVector::from_iterator(
            m,
            eta.iter().map(|&v| Complex::new(v * scale, 0.0)),
        ))
    }

    pub fn window(&self) -> &DVector<Complex<f64>> {
        &self.h
    }

    pub fn spec(&self) -> &GaborSpec {
        &self.spec
    }
}

impl MeasurementOp<Complex<f64>> for GaborOp {
    fn rows(&self) -> usize {
        self.spec.m
    }

    fn cols(&self) -> usize {
        self.spec.n()
    }

    /// `Ψ_h x = Σ_{k,l} x_{km+l} · M^l T^k h`, grouped by shift `k`: the
    /// inner modulation sum `g_k(j) = Σ_l x_{km+l} e^{+2πilj/m}` is an
    /// unnormalized inverse DFT, so the whole apply costs `m` FFTs.
    fn apply(&self, x: &DVector<Complex<f64>>) -> Result<DVector<Complex<f64>>> {
        let m = self.spec.m;
        if x.len() != self.spec.n() {
            return Err(Error::DimensionMismatch(format!(
                "gabor apply: input length {} vs {}",
                x.len(),
                self.spec.n()
            )));
        }
        let mut out = DVector::zeros(m);
        let mut buf = vec![Complex::default(); m];
        for k in 0..m {
            for l in 0..m {
                buf[l] = x[k * m + l];
            }
            fft_inverse(&mut buf)?;
            // fft_inverse scales by 1/m; the modulation sum wants the raw sum.
            for j in 0..m {
                out[j] += buf[j] * m as f64 * self.h[cyclic_sub(j, k, m)];
            }
        }
        Ok(out)
    }

    /// `(Ψ_h^* y)_{km+l} = Σ_j conj(h_{(j−k) mod m}) y_j e^{−2πilj/m}`: a
    /// forward DFT of the windowed sequence for each shift `k`.
    fn adjoint(&self, y: &DVector<Complex<f64>>) -> Result<DVector<Complex<f64>>> {
        let m = self.spec.m;
        if y.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "gabor adjoint: input length {} vs {m}",
                y.len()
            )));
        }
        let mut out = DVector::zeros(self.spec.n());
        let mut buf = vec![Complex::default(); m];
        for k in 0..m {
            for j in 0..m {
                buf[j] = self.h[cyclic_sub(j, k, m)].conj() * y[j];
            }
            fft_forward(&mut buf)?;
            for l in 0..m {
                out[k * m + l] = buf[l];
            }
        }
        Ok(out)
    }

    fn column(&self, lambda: usize) -> DVector<Complex<f64>> {
        assert!(lambda < self.cols(), "column index out of range");
        let (k, l) = self.spec.shift_pair(lambda);
        time_frequency_shift(&self.h, k, l)
    }
}
