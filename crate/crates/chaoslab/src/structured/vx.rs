//! `V_x` companion matrices: the linear maps in the generating randomness
//! that realize measurement of a *fixed* signal `x`.
//!
//! Exchange identities (tested to 1e−10):
//!
//! - circulant: `V_x z = Φ_z x` for every generator `z`, where `V_x` has
//!   entries `(V_x)_{i,k} = x_{(ω_i − k) mod n} / √m`;
//! - Gabor: `V_x η = Ψ_h x` for `h = η/√m`, where
//!   `V_x = (1/√m) Σ_λ x_λ π(λ)`.
//!
//! Both constructions satisfy `‖V_x‖_F = ‖x‖₂` exactly, which is what
//! lets suprema of measurement deviations over a signal class be studied
//! as a chaos process indexed by the family `{V_x}`.

use super::gabor::GaborSpec;
use super::{cyclic_sub, PartialCirculantSpec};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use std::f64::consts::TAU;

/// Dense `m × n` companion of the partial circulant operator.
pub fn build_vx_circulant(x: &DVector<f64>, spec: &PartialCirculantSpec) -> Result<DMatrix<f64>> {
    if x.len() != spec.n {
        return Err(Error::DimensionMismatch(format!(
            "vx circulant: signal length {} vs ambient dimension {}",
            x.len(),
            spec.n
        )));
    }
    let m = spec.m();
    let scale = 1.0 / (m as f64).sqrt();
    Ok(DMatrix::from_fn(m, spec.n, |i, k| {
        scale * x[cyclic_sub(spec.omega[i], k, spec.n)]
    }))
}

/// Dense `m × m` companion of the Gabor synthesis operator:
/// `V_x = (1/√m) Σ_λ x_λ π(λ)`.
pub fn build_vx_gabor(x: &DVector<Complex<f64>>, spec: &GaborSpec) -> Result<DMatrix<Complex<f64>>> {
    let m = spec.m;
    if x.len() != spec.n() {
        return Err(Error::DimensionMismatch(format!(
            "vx gabor: signal length {} vs m² = {}",
            x.len(),
            spec.n()
        )));
    }
    let scale = 1.0 / (m as f64).sqrt();
    let mut out = DMatrix::<Complex<f64>>::zeros(m, m);
    // π(k, l) has entries e^{2πi l j/m} at positions (j, (j−k) mod m).
    for k in 0..m {
        for l in 0..m {
            let xl = x[spec.lambda(k, l)];
            if xl == Complex::default() {
                continue;
            }
            for j in 0..m {
                let phase = Complex::from_polar(1.0, TAU * (l as f64) * (j as f64) / m as f64);
                out[(j, cyclic_sub(j, k, m))] += scale * xl * phase;
            }
        }
    }
    Ok(out)
}
