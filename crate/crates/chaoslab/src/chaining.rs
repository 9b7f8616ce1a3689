//! Covering-number models, Dudley-type entropy integrals, and
//! sample-complexity predictions.
//!
//! A [`CoverModel`] is an upper bound `u ↦ log N(u)` on the metric entropy
//! of an index set at scale `u` (natural logs, clamped at ≥ 0, scaled by a
//! tunable constant `c_cov`). Models include volumetric bounds for sparse
//! and Euclidean balls, the specialized bounds for circulant and Gabor
//! measurement families under the spectral metric, and empirical bounds
//! from greedy nets on finite point sets.
//!
//! The entropy functional `γ_α` is never computed exactly; it is bounded
//! above through the Dudley-type integral
//! `γ_α ≲ ∫₀^{u_max} (log N(u))^{1/α} du`, evaluated by a pinned
//! deterministic quadrature: 512 log-spaced trapezoid nodes on
//! `[u_max·1e−8, u_max]` plus a 64-node Gauss–Laguerre rule for the
//! remaining `u → 0` tail (substituting `u = u_min e^{−v}` turns the tail
//! into an `e^{−v}`-weighted integral on `[0, ∞)`).

use crate::samplers::AlphaShape;
use crate::{Error, Result};
use nalgebra::DMatrix;
use serde::Serialize;
use std::sync::OnceLock;

/// Log-covering-number models (natural logarithm).
#[derive(Clone, Debug, Serialize)]
pub enum CoverKind {
    /// `s`-sparse vectors in the unit ball of `ℝ^n` (volumetric bound):
    /// `s ln(en/s) + s ln(1 + 2/u)`.
    SparseBall { s: usize, n: usize },
    /// Unit Euclidean ball of `ℝ^n`: `n ln(1 + 2/u)`.
    EuclideanBall { n: usize },
    /// Companion family `{V_x}` of a partial circulant ensemble under the
    /// spectral metric: `(s/m)(ln n / u)²` for `u ≥ 1/√m`, and
    /// `s ln(en/(su))` below that scale.
    CirculantFamily { s: usize, n: usize, m: usize },
    /// Companion family of a Gabor ensemble (`n = m²`):
    /// `min{ s(ln(em²/s) + ln(3√(s/m)/u)), (s/m)(ln m/u)² }`.
    GaborFamily { s: usize, m: usize },
    /// Greedy-net entropy of an explicit finite metric space.
    Empirical(EmpiricalCover),
}

/// A covering model together with its leading constant.
#[derive(Clone, Debug, Serialize)]
pub struct CoverModel {
    pub kind: CoverKind,
    /// Multiplier in front of the model formula (default 1).
    pub c_cov: f64,
}

impl CoverModel {
    pub fn new(kind: CoverKind) -> Self {
        CoverModel { kind, c_cov: 1.0 }
    }

    pub fn with_constant(kind: CoverKind, c_cov: f64) -> Result<Self> {
        if !(c_cov > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cover model constant must be positive, got {c_cov}"
            )));
        }
        Ok(CoverModel { kind, c_cov })
    }

    /// Evaluate `c_cov · log N(u)`, clamped at ≥ 0. Errors for `u ≤ 0`.
    pub fn log_cover(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "log_cover: scale must be positive, got {u}"
            )));
        }
        let raw = match &self.kind {
            CoverKind::SparseBall { s, n } => {
                let (s, n) = (*s as f64, *n as f64);
                s * (std::f64::consts::E * n / s).ln() + s * (1.0 + 2.0 / u).ln()
            }
            CoverKind::EuclideanBall { n } => *n as f64 * (1.0 + 2.0 / u).ln(),
            CoverKind::CirculantFamily { s, n, m } => {
                let (s, n, m) = (*s as f64, *n as f64, *m as f64);
                if u >= 1.0 / m.sqrt() {
                    (s / m) * (n.ln() / u).powi(2)
                } else {
                    s * (std::f64::consts::E * n / (s * u)).ln()
                }
            }
            CoverKind::GaborFamily { s, m } => {
                let (s, m) = (*s as f64, *m as f64);
                let coarse = s * ((std::f64::consts::E * m * m / s).ln()
                    + (3.0 * (s / m).sqrt() / u).ln());
                let fine = (s / m) * (m.ln() / u).powi(2);
                coarse.min(fine)
            }
            CoverKind::Empirical(cover) => (cover.net_size(u) as f64).ln(),
        };
        Ok((self.c_cov * raw).max(0.0))
    }

    /// Scales where the model formula jumps between branches. The Dudley
    /// quadrature splits its grid at these points; a trapezoid rule that
    /// straddles a jump loses an order of accuracy and stops converging
    /// under grid refinement.
    fn branch_cuts(&self) -> Vec<f64> {
        match &self.kind {
            CoverKind::CirculantFamily { m, .. } => vec![1.0 / (*m as f64).sqrt()],
            _ => Vec::new(),
        }
    }
}

/// Finite metric space given by its pairwise distance matrix.
#[derive(Clone, Debug)]
pub struct EmpiricalCover {
    dist: DMatrix<f64>,
}

// Manifests only need a fingerprint of the space, not the full matrix.
impl Serialize for EmpiricalCover {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("EmpiricalCover", 2)?;
        st.serialize_field("points", &self.len())?;
        st.serialize_field("diameter", &self.diameter())?;
        st.end()
    }
}

impl EmpiricalCover {
    /// Validates the distance matrix: square, zero diagonal, symmetric to
    /// 1e−9, nonnegative.
    pub fn from_distance_matrix(dist: DMatrix<f64>) -> Result<Self> {
        let n = dist.nrows();
        if n == 0 || dist.ncols() != n {
            return Err(Error::InvalidParameter(
                "empirical cover: distance matrix must be square and nonempty".into(),
            ));
        }
        let scale = dist.amax().max(1.0);
        for i in 0..n {
            if dist[(i, i)].abs() > 1e-12 * scale {
                return Err(Error::InvalidParameter(
                    "empirical cover: diagonal must be zero".into(),
                ));
            }
            for j in 0..n {
                let d = dist[(i, j)];
                if !(d >= 0.0) {
                    return Err(Error::InvalidParameter(
                        "empirical cover: distances must be nonnegative".into(),
                    ));
                }
                if (d - dist[(j, i)]).abs() > 1e-9 * scale {
                    return Err(Error::InvalidParameter(
                        "empirical cover: distance matrix must be symmetric".into(),
                    ));
                }
            }
        }
        Ok(EmpiricalCover { dist })
    }

    pub fn len(&self) -> usize {
        self.dist.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.nrows() == 0
    }

    /// Largest pairwise distance; a natural `u_max` for Dudley integrals.
    pub fn diameter(&self) -> f64 {
        self.dist.amax()
    }

    /// Size of the greedy net at radius `u`.
    pub fn net_size(&self, u: f64) -> usize {
        greedy_net(&self.dist, u).len()
    }
}

/// Farthest-point greedy net on a finite metric space.
///
/// Starts from index 0 and repeatedly adds the point farthest from the
/// current net (ties broken by the lowest index) until every point lies
/// within `u` of some center. The result is simultaneously a `u`-cover
/// and a `u`-packing, so its size is sandwiched between the covering
/// numbers at `u` and `u/2`.
pub fn greedy_net(dist: &DMatrix<f64>, u: f64) -> Vec<usize> {
    let n = dist.nrows();
    assert!(n > 0 && dist.ncols() == n, "greedy_net requires a square nonempty matrix");
    let mut centers = vec![0usize];
    let mut to_net: Vec<f64> = (0..n).map(|i| dist[(i, 0)]).collect();
    loop {
        let mut far_idx = 0usize;
        let mut far_d = f64::NEG_INFINITY;
        for (i, &d) in to_net.iter().enumerate() {
            if d > far_d {
                far_d = d;
                far_idx = i;
            }
        }
        if far_d <= u {
            return centers;
        }
        centers.push(far_idx);
        for i in 0..n {
            to_net[i] = to_net[i].min(dist[(i, far_idx)]);
        }
    }
}

/// 64-node Gauss–Laguerre rule (weight `e^{−v}` on `[0, ∞)`), computed
/// once via the Golub–Welsch eigen-decomposition of the Jacobi matrix.
fn gauss_laguerre_64() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = 64;
        let mut j = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            j[(k, k)] = (2 * k + 1) as f64;
            if k + 1 < n {
                j[(k, k + 1)] = (k + 1) as f64;
                j[(k + 1, k)] = (k + 1) as f64;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(j);
        let mut rule: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let node = eig.eigenvalues[i];
                let w = eig.eigenvectors[(0, i)].powi(2); // μ₀ = ∫e^{−v}dv = 1
                (node, w)
            })
            .collect();
        rule.sort_by(|a, b| a.0.total_cmp(&b.0));
        rule
    })
}

/// Number of trapezoid nodes in the pinned Dudley quadrature.
pub const DUDLEY_NODES: usize = 512;

/// Dudley-type entropy integral `∫₀^{u_max} (log N(u))^{1/α} du` with the
/// pinned node count.
pub fn dudley_gamma(model: &CoverModel, alpha: AlphaShape, u_max: f64) -> Result<f64> {
    dudley_gamma_nodes(model, alpha, u_max, DUDLEY_NODES)
}

/// Same integral with an explicit trapezoid node count (used by the grid
/// self-convergence checks).
pub fn dudley_gamma_nodes(
    model: &CoverModel,
    alpha: AlphaShape,
    u_max: f64,
    nodes: usize,
) -> Result<f64> {
    if !(u_max > 0.0 && u_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dudley_gamma: u_max must be positive and finite, got {u_max}"
        )));
    }
    if nodes < 2 {
        return Err(Error::InvalidParameter(
            "dudley_gamma: need at least two quadrature nodes".into(),
        ));
    }
    let inv_alpha = 1.0 / alpha.alpha();
    let g = |u: f64| -> Result<f64> { Ok(model.log_cover(u)?.powf(inv_alpha)) };

    let u_min = u_max * 1e-8;
    // Tail ∫₀^{u_min}: substitute u = u_min e^{−v}, dv-weight e^{−v}.
    let mut tail = 0.0;
    for &(v, w) in gauss_laguerre_64() {
        tail += w * g(u_min * (-v).exp())?;
    }
    tail *= u_min;

    // Main part over [u_min, u_max]: substitute u = e^t so the grid is
    // uniform in log scale, split at branch cuts so each segment sees a
    // smooth integrand, and apply composite Simpson per segment. At a cut
    // the right branch owns the point itself; the left segment evaluates
    // its one-sided limit via a relative inward nudge.
    let mut cuts: Vec<f64> = vec![u_min];
    for b in model.branch_cuts() {
        if b > u_min && b < u_max {
            cuts.push(b);
        }
    }
    cuts.push(u_max);
    cuts.sort_by(f64::total_cmp);

    let total_span = (u_max / u_min).ln();
    let mut main = 0.0;
    for seg in cuts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let span = (hi / lo).ln();
        // Even number of Simpson intervals, at least 8, pro-rated by span.
        let mut intervals = ((nodes as f64 * span / total_span).round() as usize).max(8);
        if intervals % 2 == 1 {
            intervals += 1;
        }
        let is_cut_hi = hi < u_max;
        let (t_lo, h) = (lo.ln(), span / intervals as f64);
        let mut seg_sum = 0.0;
        for k in 0..=intervals {
            let u = if k == intervals { hi } else { (t_lo + k as f64 * h).exp() };
            let eval_u = if k == intervals && is_cut_hi {
                hi * (1.0 - 1e-12)
            } else {
                u
            };
            let weight = if k == 0 || k == intervals {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            // d(u)/dt = u under the log substitution.
            seg_sum += weight * g(eval_u)? * u;
        }
        main += seg_sum * h / 3.0;
    }
    Ok(tail + main)
}

fn ln_floored(x: f64) -> f64 {
    x.ln().max(1.0)
}

/// Closed-form entropy bound `γ_α` for circulant-type families:
/// `C · √(s/m) · ln s · ln n` at `α = 2` and
/// `C · s^{1/α}/√m · (ln n)^{2/α}` for `α < 2`, logs floored at 1.
pub fn closed_form_gamma(alpha: AlphaShape, s: usize, n: usize, m: usize, c: f64) -> f64 {
    let (sf, nf, mf) = (s as f64, n as f64, m as f64);
    let a = alpha.alpha();
    if a == 2.0 {
        c * (sf / mf).sqrt() * ln_floored(sf) * ln_floored(nf)
    } else {
        c * sf.powf(1.0 / a) / mf.sqrt() * ln_floored(nf).powf(2.0 / a)
    }
}

/// Sample-complexity prediction for sparse restricted isometries.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleComplexity {
    /// `max{ s^{2/α} (ln n)^{4/α}, s (ln s)² (ln n)² }`, logs floored at 1.
    pub f1: f64,
    /// `max{ s^{(2−α)/2} (ln n)², (ln s)^α (ln n)^α }`, logs floored at 1.
    pub f2: f64,
    /// `ceil(c₁ · δ⁻² · f1)`.
    pub m_required: u64,
}

/// Evaluate the sample-complexity functions and the predicted number of
/// measurements for target distortion `delta`.
pub fn sample_complexity(
    alpha: AlphaShape,
    s: usize,
    n: usize,
    delta: f64,
    c1: f64,
) -> Result<SampleComplexity> {
    if s == 0 || n == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "sample_complexity: need 1 ≤ s ≤ n, got s = {s}, n = {n}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sample_complexity: delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(c1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sample_complexity: c1 must be positive, got {c1}"
        )));
    }
    let a = alpha.alpha();
    let (sf, nf) = (s as f64, n as f64);
    let (ls, ln) = (ln_floored(sf), ln_floored(nf));
    let f1 = (sf.powf(2.0 / a) * ln.powf(4.0 / a)).max(sf * ls * ls * ln * ln);
    let f2 = (sf.powf((2.0 - a) / 2.0) * ln * ln).max(ls.powf(a) * ln.powf(a));
    let m_required = (c1 * f1 / (delta * delta)).ceil() as u64;
    Ok(SampleComplexity { f1, f2, m_required })
}
