//! Matrix norms: exact closed forms where available, certified intervals
//! elsewhere.
//!
//! For a matrix `A ∈ 𝔽^{m×n}` (real or complex) the module computes
//!
//! - `‖A‖_F` (Frobenius), `‖A‖_max = max_{ij} |a_ij|`, and the row-norm
//!   aggregates `‖A‖_{ℓ_p(ℓ_2)} = (Σ_i ‖row_i‖₂^p)^{1/p}` — all exact;
//! - the spectral norm `‖A‖_{2→2}`, by full SVD up to a size cutoff and
//!   by power iteration on `A*A` beyond it;
//! - operator norms `‖A‖_{2→q}` (`q ∈ [2, ∞]`) and dual pairs
//!   `‖A‖_{α→α*}` (`α ∈ [1, 2]`, `α* = α/(α−1)`), which are NP-hard in
//!   general and therefore reported as [`NormInterval`]s: the lower end is
//!   the best value found by multi-restart alternating ascent (a valid
//!   lower bound, since it evaluates the objective at feasible points),
//!   the upper end comes from interpolation:
//!   `‖A‖_{2→q} ≤ ‖A‖_{2→2}^{2/q} ‖A‖_{2→∞}^{1−2/q}` and
//!   `‖A‖_{α→α*} ≤ ‖A‖_{2→α*}`.
//!
//! Special cases collapse to exact values: `q = 2` (spectral), `q = ∞`
//! (max row ℓ₂ norm), and `α = 1` (`‖A‖_{1→∞} = max |a_ij|`, with the
//! `α* = ∞` convention that all `ℓ_{α*}` norms become max-norms).

use crate::par::{indexed_map, pairwise_sum};
use crate::samplers::AlphaShape;
use crate::stream::RngStream;
use crate::{Error, Result};
use nalgebra::{ComplexField, DMatrix, DVector};
use serde::Serialize;

/// Size cutoff below which the spectral norm uses a full SVD.
pub const SVD_CUTOFF: usize = 512;
/// Relative convergence tolerance for power iteration.
pub const POWER_TOL: f64 = 1e-10;
/// Iteration cap for power iteration.
pub const POWER_MAX_ITERS: u32 = 10_000;
/// Relative improvement threshold that stops the alternating ascent.
pub const ASCENT_TOL: f64 = 1e-8;
/// Iteration cap per ascent restart.
pub const ASCENT_MAX_ITERS: u32 = 500;
/// Default number of ascent restarts.
pub const DEFAULT_RESTARTS: u32 = 50;

/// How a [`NormInterval`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMethod {
    /// Closed form; `lo == hi`.
    Exact,
    /// Lower end by randomized alternating ascent, upper end by norm
    /// interpolation.
    AscentInterpolation,
}

/// A certified enclosure `lo ≤ ‖A‖ ≤ hi`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormInterval {
    pub lo: f64,
    pub hi: f64,
    pub method: IntervalMethod,
}

impl NormInterval {
    fn exact(v: f64) -> Self {
        NormInterval {
            lo: v,
            hi: v,
            method: IntervalMethod::Exact,
        }
    }

    /// Midpoint, a convenient point estimate.
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Spectral norm estimate with its convergence status.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SpectralEstimate {
    pub value: f64,
    /// False only when power iteration hit its cap; the value is then the
    /// best iterate rather than a certified norm.
    pub converged: bool,
    pub iterations: u32,
}

/// The exactly computable norms of a matrix.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExactNorms {
    /// `‖A‖_F`.
    pub frobenius: f64,
    /// `max_{ij} |a_ij|`, which equals the operator norm `ℓ_1 → ℓ_∞`.
    pub max_abs_entry: f64,
    /// `max_i ‖row_i‖₂`, which equals the operator norm `ℓ_2 → ℓ_∞`.
    pub max_row_l2: f64,
}

/// Moduli of one row.
fn row_moduli<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, i: usize) -> Vec<f64> {
    (0..a.ncols()).map(|j| a[(i, j)].clone().modulus()).collect()
}

/// Exact norms in one pass.
pub fn exact_norms<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> ExactNorms {
    let mut sq = Vec::with_capacity(a.nrows() * a.ncols());
    let mut max_entry = 0.0f64;
    let mut max_row = 0.0f64;
    for i in 0..a.nrows() {
        let mut row_sq = Vec::with_capacity(a.ncols());
        for j in 0..a.ncols() {
            let m = a[(i, j)].clone().modulus();
            max_entry = max_entry.max(m);
            row_sq.push(m * m);
        }
        max_row = max_row.max(pairwise_sum(&row_sq).sqrt());
        sq.extend(row_sq);
    }
    ExactNorms {
        frobenius: pairwise_sum(&sq).sqrt(),
        max_abs_entry: max_entry,
        max_row_l2: max_row,
    }
}

/// `ℓ_q` norm of a vector, `q ∈ [1, ∞]`; entries enter by absolute value,
/// and the maximum is factored out for numerical stability at large `q`.
pub fn lq_norm(entries: &[f64], q: f64) -> f64 {
    let vmax = entries.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if vmax == 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return vmax;
    }
    let sum = pairwise_sum(
        &entries
            .iter()
            .map(|&v| (v.abs() / vmax).powf(q))
            .collect::<Vec<_>>(),
    );
    vmax * sum.powf(1.0 / q)
}

/// Row-aggregate norm `‖A‖_{ℓ_p(ℓ_2)} = (Σ_i ‖row_i‖₂^p)^{1/p}`, `p ∈ [1, ∞]`.
pub fn lp_l2_norm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lp_l2_norm: exponent must satisfy p ≥ 1, got {p}"
        )));
    }
    let row_norms: Vec<f64> = (0..a.nrows())
        .map(|i| {
            let sq: Vec<f64> = row_moduli(a, i).iter().map(|&v| v * v).collect();
            pairwise_sum(&sq).sqrt()
        })
        .collect();
    Ok(lq_norm(&row_norms, p))
}

/// Deterministic strictly-positive start vector for power iteration
/// (no RNG stream needed; splitmix64 keyed by the dimensions).
fn deterministic_unit_vector(len: usize, key: u64) -> DVector<f64> {
    let mut state = key ^ 0x9e37_79b9_7f4a_7c15;
    let mut next = || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    let mut v = DVector::from_fn(len, |_, _| 0.5 + (next() >> 11) as f64 / (1u64 << 53) as f64);
    let norm = v.norm();
    v /= norm;
    v
}

/// Spectral norm `‖A‖_{2→2}`: full SVD when `min(m, n) ≤ SVD_CUTOFF`,
/// otherwise power iteration on `A*A` (relative tolerance `POWER_TOL`,
/// at most `POWER_MAX_ITERS` iterations).
pub fn spectral_norm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> SpectralEstimate {
    if a.nrows().min(a.ncols()) <= SVD_CUTOFF {
        let sv = a.clone().svd(false, false).singular_values;
        let value = sv.iter().fold(0.0f64, |m, &s| m.max(s));
        return SpectralEstimate {
            value,
            converged: true,
            iterations: 0,
        };
    }
    let v0 = deterministic_unit_vector(a.ncols(), ((a.nrows() as u64) << 32) | a.ncols() as u64);
    let mut v = v0.map(|x| T::from_real(x));
    let mut sigma = 0.0f64;
    let at = a.adjoint();
    for it in 1..=POWER_MAX_ITERS {
        let av = a * &v;
        let new_sigma = av.norm();
        if new_sigma == 0.0 {
            return SpectralEstimate {
                value: 0.0,
                converged: true,
                iterations: it,
            };
        }
        let mut w = &at * av;
        let wn = w.norm();
        w /= T::from_real(wn);
        let delta = (new_sigma - sigma).abs();
        v = w;
        sigma = new_sigma;
        if delta <= POWER_TOL * sigma && it > 1 {
            return SpectralEstimate {
                value: sigma,
                converged: true,
                iterations: it,
            };
        }
    }
    SpectralEstimate {
        value: sigma,
        converged: false,
        iterations: POWER_MAX_ITERS,
    }
}

/// Monotone-ascent state shared by the two interval routines: maximize
/// `Re ⟨y, Ax⟩` by exact alternating linear maximization over the two unit
/// balls. Every iterate is feasible, so the best objective is a certified
/// lower bound on the operator norm.
struct Ascent<'a, T: ComplexField<RealField = f64>> {
    a: &'a DMatrix<T>,
    /// Cached `A*`.
    at: DMatrix<T>,
    /// Exponent of the ball for `x` (`p ∈ [1, 2]` here).
    p: f64,
    /// Output norm exponent `q ∈ [2, ∞]`.
    q: f64,
}

impl<'a, T: ComplexField<RealField = f64>> Ascent<'a, T> {
    /// Align a vector against `target` inside the `ℓ_p` unit ball:
    /// returns the maximizer of `Re⟨x, target⟩` with `‖x‖_p = 1`.
    /// `p = 1` concentrates on a max-modulus coordinate (lowest index wins
    /// ties, deterministically); `p = 2` is plain normalization.
    fn align(target: &DVector<T>, p: f64) -> Option<DVector<T>> {
        let n = target.len();
        let moduli: Vec<f64> = (0..n).map(|i| target[i].clone().modulus()).collect();
        let vmax = moduli.iter().fold(0.0f64, |m, &v| m.max(v));
        if vmax == 0.0 {
            return None;
        }
        let phase = |i: usize| {
            let m = moduli[i];
            if m == 0.0 {
                T::one()
            } else {
                target[i].clone().unscale(m)
            }
        };
        if p == 1.0 {
            let i_star = moduli
                .iter()
                .position(|&v| v == vmax)
                .expect("max exists for nonzero vector");
            let mut x = DVector::zeros(n);
            x[i_star] = phase(i_star);
            return Some(x);
        }
        // |x_i| ∝ (|t_i|/t_max)^{p*−1} with p* = p/(p−1); normalize in ℓ_p.
        let expo = 1.0 / (p - 1.0);
        let mags: Vec<f64> = moduli.iter().map(|&v| (v / vmax).powf(expo)).collect();
        let scale = lq_norm(&mags, p);
        Some(DVector::from_fn(n, |i, _| {
            phase(i).scale(mags[i] / scale)
        }))
    }

    /// `‖Ax‖_q` for feasible `x` (the certified objective).
    fn objective(&self, x: &DVector<T>) -> f64 {
        let ax = self.a * x;
        let moduli: Vec<f64> = (0..ax.len()).map(|i| ax[i].clone().modulus()).collect();
        lq_norm(&moduli, self.q)
    }

    /// Run the ascent from `x0` until relative improvement drops below
    /// `ASCENT_TOL`; returns the best objective seen.
    fn run(&self, x0: DVector<T>) -> f64 {
        let mut x = x0;
        let mut best = self.objective(&x);
        for _ in 0..ASCENT_MAX_ITERS {
            let ax = self.a * &x;
            // y-step: maximize Re⟨y, Ax⟩ over ‖y‖_{q*} ≤ 1 (q* dual to q);
            // the aligned y in the q*-ball has |y| ∝ |Ax|^{q−1}.
            let y = match self.dual_align(&ax) {
                Some(y) => y,
                None => break, // Ax = 0: restart contributes nothing further
            };
            // x-step: maximize against A*y in the ℓ_p ball.
            let c = &self.at * y;
            let new_x = match Self::align(&c, self.p) {
                Some(x) => x,
                None => break,
            };
            x = new_x;
            let val = self.objective(&x);
            if val <= best * (1.0 + ASCENT_TOL) {
                best = best.max(val);
                break;
            }
            best = val;
        }
        best
    }

    /// Maximizer of `Re⟨y, v⟩` over the dual ball `‖y‖_{q*} ≤ 1`, i.e. the
    /// subgradient of `‖v‖_q`: `|y_i| ∝ (|v_i|/v_max)^{q−1}` for finite q,
    /// a max-modulus basis vector for `q = ∞`.
    fn dual_align(&self, v: &DVector<T>) -> Option<DVector<T>> {
        let n = v.len();
        let moduli: Vec<f64> = (0..n).map(|i| v[i].clone().modulus()).collect();
        let vmax = moduli.iter().fold(0.0f64, |m, &v| m.max(v));
        if vmax == 0.0 {
            return None;
        }
        let phase = |i: usize| {
            let m = moduli[i];
            if m == 0.0 {
                T::one()
            } else {
                v[i].clone().unscale(m)
            }
        };
        if self.q.is_infinite() {
            let i_star = moduli.iter().position(|&m| m == vmax)?;
            let mut y = DVector::zeros(n);
            y[i_star] = phase(i_star);
            return Some(y);
        }
        let mags: Vec<f64> = moduli.iter().map(|&m| (m / vmax).powf(self.q - 1.0)).collect();
        // Normalize in the dual exponent q* = q/(q−1).
        let qstar = self.q / (self.q - 1.0);
        let scale = lq_norm(&mags, qstar);
        Some(DVector::from_fn(n, |i, _| phase(i).scale(mags[i] / scale)))
    }
}

fn ascent_lower_bound<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    p: f64,
    q: f64,
    restarts: u32,
    stream: &RngStream,
) -> f64 {
    let ascent = Ascent {
        a,
        at: a.adjoint(),
        p,
        q,
    };
    let n = a.ncols();
    // Restart 0 is deterministic: the best single basis vector.
    let best_basis = (0..n)
        .map(|j| {
            let col: Vec<f64> = (0..a.nrows()).map(|i| a[(i, j)].clone().modulus()).collect();
            (j, lq_norm(&col, q))
        })
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(j, _)| j)
        .unwrap_or(0);
    let runs: Vec<f64> = indexed_map(restarts.max(1) as usize, |r| {
        let x0: DVector<T> = if r == 0 {
            let mut e = DVector::zeros(n);
            e[best_basis] = T::one();
            e
        } else {
            let mut rng = stream.child("ascent-restart").child(r).rng();
            let raw = DVector::<f64>::from_fn(n, |_, _| {
                rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
            });
            let x = raw.map(|v| T::from_real(v));
            // Project the random direction onto the ℓ_p sphere.
            Ascent::<T>::align(&x, p).unwrap_or_else(|| {
                let mut e: DVector<T> = DVector::zeros(n);
                e[0] = T::one();
                e
            })
        };
        ascent.run(x0)
    });
    runs.into_iter().fold(0.0, f64::max)
}

/// Upper bound for `‖A‖_{2→q}` alone (the interval's hi endpoint): exact
/// at `q ∈ {2, ∞}`, otherwise the Riesz–Thorin interpolation
/// `min(‖A‖_{2→2}, ‖A‖_{2→2}^{2/q} ‖A‖_{2→∞}^{1−2/q})`. Deterministic and
/// cheap — no ascent restarts.
pub fn mixed_norm_upper<T: ComplexField<RealField = f64>>(a: &DMatrix<T>, q: f64) -> Result<f64> {
    if !(q >= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "mixed_norm_upper: need q ≥ 2, got {q}"
        )));
    }
    let exact = exact_norms(a);
    if q.is_infinite() {
        return Ok(exact.max_row_l2);
    }
    let spectral = spectral_norm(a).value;
    if q == 2.0 {
        return Ok(spectral);
    }
    Ok(spectral.min(spectral.powf(2.0 / q) * exact.max_row_l2.powf(1.0 - 2.0 / q)))
}

/// Upper bound for `‖A‖_{α→α*}` alone: exact at `α ∈ {1, 2}`, otherwise
/// the containment bound `‖A‖_{α→α*} ≤ ‖A‖_{2→α*}` evaluated via
/// [`mixed_norm_upper`].
pub fn dual_pair_norm_upper<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    alpha: AlphaShape,
) -> Result<f64> {
    let al = alpha.alpha();
    if al == 1.0 {
        return Ok(exact_norms(a).max_abs_entry);
    }
    if al == 2.0 {
        return Ok(spectral_norm(a).value);
    }
    mixed_norm_upper(a, alpha.conjugate())
}

/// Interval for the operator norm `‖A‖_{2→q}`, `q ∈ [2, ∞]`.
///
/// `q = 2` and `q = ∞` are exact; otherwise the lower end is the best of
/// `restarts` alternating-ascent runs and the upper end is
/// [`mixed_norm_upper`].
pub fn mixed_norm_interval<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    q: f64,
    restarts: u32,
    stream: &RngStream,
) -> Result<NormInterval> {
    let hi = mixed_norm_upper(a, q)?;
    if q == 2.0 || q.is_infinite() {
        return Ok(NormInterval::exact(hi));
    }
    let lo = ascent_lower_bound(a, 2.0, q, restarts, stream).min(hi);
    Ok(NormInterval {
        lo,
        hi,
        method: IntervalMethod::AscentInterpolation,
    })
}

/// Interval for the dual-pair operator norm `‖A‖_{α→α*}`.
///
/// `α = 1` gives the exact max-entry norm `‖A‖_{1→∞}`; `α = 2` the
/// spectral norm. In between, the lower end is multi-restart ascent over
/// the `ℓ_α` ball and the upper end is the containment bound
/// `‖A‖_{α→α*} ≤ hi(‖A‖_{2→α*})`.
pub fn dual_pair_norm_interval<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    alpha: AlphaShape,
    restarts: u32,
    stream: &RngStream,
) -> Result<NormInterval> {
    let al = alpha.alpha();
    let hi = dual_pair_norm_upper(a, alpha)?;
    if al == 1.0 || al == 2.0 {
        return Ok(NormInterval::exact(hi));
    }
    let astar = alpha.conjugate();
    let lo = ascent_lower_bound(a, al, astar, restarts, stream).min(hi);
    Ok(NormInterval {
        lo,
        hi,
        method: IntervalMethod::AscentInterpolation,
    })
}
