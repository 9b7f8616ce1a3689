//! FFT kernels: planner cache, self-test, and cyclic convolution.
//!
//! rustfft conventions: the forward transform is `X_k = Σ_j x_j e^{−2πijk/n}`
//! and the inverse is unnormalized, so [`fft_inverse`] divides by `n`.
//! A round-trip identity is verified once per process before any transform
//! is used; cyclic convolutions of real inputs additionally check that the
//! imaginary residue stays below `1e−9 · ‖z‖₂ ‖x‖₂` and fail loudly
//! otherwise.

use crate::{Error, Result};
use nalgebra::DVector;
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type PlanCache = Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>;

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft planner lock poisoned");
    let (planner, map) = &mut *guard;
    map.entry((len, forward))
        .or_insert_with(|| {
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// One-time FFT self-test: a length-16 round trip must reproduce the input
/// to near machine precision, otherwise every transform call fails.
fn self_test() -> Result<()> {
    static CHECKED: OnceLock<std::result::Result<(), String>> = OnceLock::new();
    CHECKED
        .get_or_init(|| {
            let xs: Vec<Complex<f64>> = (0..16)
                .map(|j| Complex::new((j as f64 * 0.7).sin(), (j as f64 * 1.3).cos()))
                .collect();
            let mut buf = xs.clone();
            plan(16, true).process(&mut buf);
            plan(16, false).process(&mut buf);
            let err = xs
                .iter()
                .zip(&buf)
                .map(|(a, b)| (a - b / 16.0).norm())
                .fold(0.0, f64::max);
            if err < 1e-12 {
                Ok(())
            } else {
                Err(format!("fft round-trip residual {err:.3e} exceeds 1e-12"))
            }
        })
        .clone()
        .map_err(Error::ConsistencyCheck)
}

/// In-place forward DFT.
pub fn fft_forward(buf: &mut [Complex<f64>]) -> Result<()> {
    self_test()?;
    plan(buf.len(), true).process(buf);
    Ok(())
}

/// In-place inverse DFT, normalized by `1/n`.
pub fn fft_inverse(buf: &mut [Complex<f64>]) -> Result<()> {
    self_test()?;
    plan(buf.len(), false).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    Ok(())
}

fn to_complex(xs: &DVector<f64>) -> Vec<Complex<f64>> {
    xs.iter().map(|&v| Complex::new(v, 0.0)).collect()
}

/// Extract the real part, enforcing the imaginary-residue budget
/// `|Im| ≤ 1e−9 · scale` pointwise.
fn real_part_checked(buf: &[Complex<f64>], scale: f64, what: &str) -> Result<DVector<f64>> {
    let worst = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if worst > 1e-9 * scale {
        return Err(Error::ConsistencyCheck(format!(
            "{what}: imaginary residue {worst:.3e} exceeds 1e-9 × {scale:.3e}"
        )));
    }
    Ok(DVector::from_iterator(buf.len(), buf.iter().map(|c| c.re)))
}

/// Cyclic convolution `(z ∗ x)_j = Σ_k z_{(j−k) mod n} x_k` via FFT.
pub fn circular_convolve(z: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    if z.len() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "circular_convolve: lengths {} vs {}",
            z.len(),
            x.len()
        )));
    }
    if z.is_empty() {
        return Err(Error::InvalidParameter("circular_convolve: empty input".into()));
    }
    let mut zf = to_complex(z);
    let mut xf = to_complex(x);
    fft_forward(&mut zf)?;
    fft_forward(&mut xf)?;
    for (a, b) in zf.iter_mut().zip(&xf) {
        *a *= b;
    }
    fft_inverse(&mut zf)?;
    real_part_checked(&zf, z.norm() * x.norm(), "circular_convolve")
}

/// Cyclic cross-correlation `w_k = Σ_j z_{(j−k) mod n} v_j`, the transpose
/// of convolution-by-`z`; computed as `IFFT(conj(ẑ) ∘ v̂)`.
pub fn circular_cross_correlate(z: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
    if z.len() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "circular_cross_correlate: lengths {} vs {}",
            z.len(),
            v.len()
        )));
    }
    if z.is_empty() {
        return Err(Error::InvalidParameter(
            "circular_cross_correlate: empty input".into(),
        ));
    }
    let mut zf = to_complex(z);
    let mut vf = to_complex(v);
    fft_forward(&mut zf)?;
    fft_forward(&mut vf)?;
    for (a, b) in zf.iter_mut().zip(&vf) {
        *a = a.conj() * b;
    }
    fft_inverse(&mut zf)?;
    real_part_checked(&zf, z.norm() * v.norm(), "circular_cross_correlate")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_identity_with_unit_impulse() {
        let n = 9;
        let mut e0 = DVector::zeros(n);
        e0[0] = 1.0;
        let x = DVector::from_fn(n, |i, _| (i as f64 + 1.0).sqrt());
        let y = circular_convolve(&e0, &x).unwrap();
        assert!((&y - &x).norm() < 1e-12);
    }

    #[test]
    fn cross_correlation_is_convolution_transpose() {
        // <z * x, v> == <x, corr(z, v)> for random-ish small inputs.
        let n = 12;
        let z = DVector::from_fn(n, |i, _| ((i * 7 + 3) % 5) as f64 - 2.0);
        let x = DVector::from_fn(n, |i, _| ((i * 11 + 1) % 7) as f64 * 0.5);
        let v = DVector::from_fn(n, |i, _| ((i * 5 + 2) % 9) as f64 - 4.0);
        let lhs = circular_convolve(&z, &x).unwrap().dot(&v);
        let rhs = x.dot(&circular_cross_correlate(&z, &v).unwrap());
        assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
    }
}
