//! Monte-Carlo engine for order-two chaoses `S_A(ξ) = ξᵀAξ` and their
//! decoupled companions `ξᵀAξ̃`, plus evaluators for the moment and tail
//! bounds that govern them.
//!
//! All sampled quantities are centered analytically: for a standardized
//! source, `E S_A(ξ) = trace(A)`, so centering adds no Monte-Carlo noise.
//! Sample generation runs chunk-parallel; each fixed-size chunk derives
//! its own generator from the task stream, so results are identical for
//! any thread count.
//!
//! Bound evaluators cover: the five-term decoupled moment formula and its
//! two-term simplification, the Hanson–Wright exponent `φ₂(A, α, t)`, the
//! moment-to-tail conversion in both of its standard forms, supremum
//! expectations over finite matrix families, and the derived deviation
//! quantities `Γ(α, 𝒜)`, `T(𝒜)`, `U₁–U₃`, `U₂′`, `U₃′` together with
//! their tail curves. Interval-valued norms enter through their upper
//! endpoints (conservative for upper bounds). Unspecified absolute
//! constants are explicit parameters defaulting to 1 and are echoed in
//! every report.

use crate::chaining::{dudley_gamma, closed_form_gamma, CoverKind, CoverModel, EmpiricalCover};
use crate::norms::{
    dual_pair_norm_upper, exact_norms, lp_l2_norm, lq_norm, mixed_norm_upper, spectral_norm,
};
use crate::par::{chunked_map, indexed_map, mean, pairwise_sum};
use crate::samplers::{AlphaShape, SamplerSpec, SourceKind};
use crate::stream::RngStream;
use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

/// Centered Monte-Carlo draws of a quadratic chaos (or its decoupled form).
#[derive(Clone, Debug)]
pub struct ChaosSampleSet {
    /// Caller-supplied label for the matrix that generated the samples.
    pub matrix_id: String,
    pub source: SamplerSpec,
    /// Samples of `S_A(ξ) − E S_A(ξ)` (coupled) or `ξᵀAξ̃` (decoupled).
    pub values: Vec<f64>,
}

impl ChaosSampleSet {
    pub fn from_values(matrix_id: impl Into<String>, source: SamplerSpec, values: Vec<f64>) -> Self {
        ChaosSampleSet {
            matrix_id: matrix_id.into(),
            source,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `xᵀ A y` over a column-major matrix slice.
fn quad_form(cols: &[f64], n: usize, x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..n {
        let col = &cols[j * n..(j + 1) * n];
        let mut dot = 0.0;
        for i in 0..n {
            dot += col[i] * x[i];
        }
        acc += y[j] * dot;
    }
    acc
}

fn require_square(a: &DMatrix<f64>, what: &str) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{what}: matrix must be square and nonempty, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

fn require_standardized(source: &SamplerSpec, what: &str) -> Result<()> {
    if !source.standardized {
        return Err(Error::InvalidParameter(format!(
            "{what}: source must be standardized (unit variance) so the trace centering is exact"
        )));
    }
    Ok(())
}

/// Draw `n_samples` of `ξᵀAξ − trace(A)` (the mean under a standardized
/// source is exactly the trace).
pub fn chaos_samples(
    a: &DMatrix<f64>,
    source: SamplerSpec,
    n_samples: usize,
    stream: &RngStream,
) -> Result<ChaosSampleSet> {
    let n = require_square(a, "chaos_samples")?;
    require_standardized(&source, "chaos_samples")?;
    let trace = a.trace();
    let cols = a.as_slice().to_vec();
    let values = chunked_map(n_samples, |chunk, range| {
        let mut rng = stream.child("chaos-chunk").child(chunk as u64).rng();
        let mut xi = vec![0.0; n];
        let mut block = Vec::with_capacity(range.len());
        for _ in range {
            source.fill(&mut rng, &mut xi);
            block.push(quad_form(&cols, n, &xi, &xi) - trace);
        }
        block
    });
    Ok(ChaosSampleSet::from_values(format!("{n}x{n}"), source, values))
}

/// Draw `n_samples` of the decoupled chaos `ξᵀAξ̃` with `ξ̃` an independent
/// copy (population mean 0 without centering).
pub fn decoupled_samples(
    a: &DMatrix<f64>,
    source: SamplerSpec,
    n_samples: usize,
    stream: &RngStream,
) -> Result<ChaosSampleSet> {
    let n = require_square(a, "decoupled_samples")?;
    require_standardized(&source, "decoupled_samples")?;
    let cols = a.as_slice().to_vec();
    let values = chunked_map(n_samples, |chunk, range| {
        let mut rng = stream.child("decoupled-chunk").child(chunk as u64).rng();
        let mut xi = vec![0.0; n];
        let mut xi_tilde = vec![0.0; n];
        let mut block = Vec::with_capacity(range.len());
        for _ in range {
            source.fill(&mut rng, &mut xi);
            source.fill(&mut rng, &mut xi_tilde);
            block.push(quad_form(&cols, n, &xi, &xi_tilde));
        }
        block
    });
    Ok(ChaosSampleSet::from_values(format!("{n}x{n}"), source, values))
}

/// Plug-in `L_p` estimate with a reliability flag.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LpEstimate {
    /// `(mean |X|^p)^{1/p}`.
    pub value: f64,
    /// `false` when `p > ln N`: beyond that the plug-in estimator is
    /// dominated by the few largest samples and should not be trusted.
    pub reliable: bool,
}

/// Empirical `L_p` norm of a sample set (`p ≥ 1`, at least 100 samples).
pub fn empirical_lp(set: &ChaosSampleSet, p: f64) -> Result<LpEstimate> {
    if set.len() < 100 {
        return Err(Error::InvalidParameter(format!(
            "empirical_lp: need at least 100 samples, got {}",
            set.len()
        )));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "empirical_lp: need p ≥ 1, got {p}"
        )));
    }
    let powers: Vec<f64> = set.values.iter().map(|&v| v.abs().powf(p)).collect();
    Ok(LpEstimate {
        value: mean(&powers).powf(1.0 / p),
        reliable: p <= (set.len() as f64).ln(),
    })
}

/// Empirical tail curve with an optional analytic bound attached.
#[derive(Clone, Debug, Serialize)]
pub struct TailCurve {
    /// Strictly increasing threshold grid.
    pub t: Vec<f64>,
    /// `P{|X| > t}` plug-in estimates (monotone nonincreasing).
    pub empirical: Vec<f64>,
    /// Bound values on the same grid; NaN until attached.
    pub bound: Vec<f64>,
}

impl TailCurve {
    /// Attach a bound evaluated on the same grid.
    pub fn with_bound(mut self, bound: Vec<f64>) -> Result<TailCurve> {
        if bound.len() != self.t.len() {
            return Err(Error::DimensionMismatch(format!(
                "tail bound has {} entries for a grid of {}",
                bound.len(),
                self.t.len()
            )));
        }
        self.bound = bound;
        Ok(self)
    }
}

/// Two-sided empirical tail `P{|X| > t}` on a strictly increasing grid.
pub fn empirical_tail(set: &ChaosSampleSet, t_grid: &[f64]) -> Result<TailCurve> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("empirical_tail: empty grid".into()));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) || !(t_grid[0] >= 0.0) {
        return Err(Error::InvalidParameter(
            "empirical_tail: grid must be nonnegative and strictly increasing".into(),
        ));
    }
    if set.is_empty() {
        return Err(Error::InvalidParameter(
            "empirical_tail: empty sample set".into(),
        ));
    }
    let mut mags: Vec<f64> = set.values.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let n = mags.len() as f64;
    let empirical = t_grid
        .iter()
        .map(|&t| {
            // Count of |X| > t via the first index exceeding t.
            let idx = mags.partition_point(|&m| m <= t);
            (mags.len() - idx) as f64 / n
        })
        .collect();
    Ok(TailCurve {
        t: t_grid.to_vec(),
        empirical,
        bound: vec![f64::NAN; t_grid.len()],
    })
}

/// The five-term decoupled moment bound and its two-term simplification.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentFormula {
    /// `√p‖A‖_F + p‖A‖_{2→2} + p^{1/α}‖A‖_{ℓ_{α*}(ℓ₂)}
    ///  + p^{(α+2)/2α}‖A‖_{2→α*} + p^{2/α}‖A‖_{α→α*}`.
    pub five_term: f64,
    /// `√p‖A‖_F + p^{2/α}‖A‖_{2→2}`.
    pub two_term: f64,
}

/// Evaluate both decoupled moment bounds at order `p ≥ 2`. Interval-valued
/// norms enter by their upper endpoints.
pub fn decoupled_moment_formula(
    a: &DMatrix<f64>,
    alpha: AlphaShape,
    p: f64,
) -> Result<MomentFormula> {
    require_square(a, "decoupled_moment_formula")?;
    if !(p >= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "decoupled_moment_formula: need p ≥ 2, got {p}"
        )));
    }
    let al = alpha.alpha();
    let astar = alpha.conjugate();
    let exact = exact_norms(a);
    let spectral = spectral_norm(a).value;
    let lp_l2 = lp_l2_norm(a, astar)?;
    let two_to_astar = mixed_norm_upper(a, astar)?;
    let alpha_to_astar = dual_pair_norm_upper(a, alpha)?;
    let five_term = p.sqrt() * exact.frobenius
        + p * spectral
        + p.powf(1.0 / al) * lp_l2
        + p.powf((al + 2.0) / (2.0 * al)) * two_to_astar
        + p.powf(2.0 / al) * alpha_to_astar;
    let two_term = p.sqrt() * exact.frobenius + p.powf(2.0 / al) * spectral;
    Ok(MomentFormula {
        five_term,
        two_term,
    })
}

/// `(t/denom)^expo` with the zero-matrix convention `t/0 = +∞` (and 0 at
/// `t = 0`, where every term vanishes).
fn ratio_pow(t: f64, denom: f64, expo: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if denom == 0.0 {
        f64::INFINITY
    } else {
        (t / denom).powf(expo)
    }
}

/// Precomputed norms for the Hanson–Wright tail exponent `φ₂(A, α, t)`,
/// so a whole `t`-grid can be evaluated with one set of norms.
#[derive(Clone, Debug, Serialize)]
pub struct Phi2 {
    pub alpha: f64,
    pub frobenius: f64,
    pub spectral: f64,
    pub lp_l2: f64,
    pub two_to_astar: f64,
    pub alpha_to_astar: f64,
}

impl Phi2 {
    /// Requires a symmetric square matrix (relative asymmetry ≤ 1e−9).
    pub fn new(a: &DMatrix<f64>, alpha: AlphaShape) -> Result<Phi2> {
        let n = require_square(a, "hw_phi2")?;
        let scale = a.amax().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in (i + 1)..n {
                if (a[(i, j)] - a[(j, i)]).abs() > 1e-9 * scale {
                    return Err(Error::InvalidParameter(
                        "hw_phi2: matrix must be symmetric".into(),
                    ));
                }
            }
        }
        let astar = alpha.conjugate();
        Ok(Phi2 {
            alpha: alpha.alpha(),
            frobenius: exact_norms(a).frobenius,
            spectral: spectral_norm(a).value,
            lp_l2: lp_l2_norm(a, astar)?,
            two_to_astar: mixed_norm_upper(a, astar)?,
            alpha_to_astar: dual_pair_norm_upper(a, alpha)?,
        })
    }

    /// `min{(t/‖A‖_F)², t/‖A‖_{2→2}, (t/‖A‖_{ℓ_{α*}(ℓ₂)})^α,
    ///      (t/‖A‖_{2→α*})^{2α/(α+2)}, (t/‖A‖_{α→α*})^{α/2}}`;
    /// `+∞` for the zero matrix at `t > 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hw_phi2: need t ≥ 0, got {t}"
            )));
        }
        let al = self.alpha;
        let terms = [
            ratio_pow(t, self.frobenius, 2.0),
            ratio_pow(t, self.spectral, 1.0),
            ratio_pow(t, self.lp_l2, al),
            ratio_pow(t, self.two_to_astar, 2.0 * al / (al + 2.0)),
            ratio_pow(t, self.alpha_to_astar, al / 2.0),
        ];
        Ok(terms.into_iter().fold(f64::INFINITY, f64::min).max(0.0))
    }
}

/// One-shot evaluation of the Hanson–Wright exponent φ₂.
pub fn hw_phi2(a: &DMatrix<f64>, alpha: AlphaShape, t: f64) -> Result<f64> {
    Phi2::new(a, alpha)?.eval(t)
}

/// Tail bound `c1·exp(−φ₂(A, α, t)/c2)` on a grid (the exponent is scaled
/// by the calibration constant `c2`; `c1` is the prefactor).
pub fn hw_tail_curve(phi2: &Phi2, t_grid: &[f64], c1: f64, c2: f64) -> Result<Vec<f64>> {
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "hw_tail_curve: constants must be positive, got c1 = {c1}, c2 = {c2}"
        )));
    }
    t_grid
        .iter()
        .map(|&t| Ok(c1 * (-phi2.eval(t)? / c2).exp()))
        .collect()
}

/// The two standard forms of the moment-to-tail conversion for a variable
/// with `‖X‖_p ≤ Σ_k C_k p^{β_k} + C_last` for all `p ≥ p₀`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentTailBound {
    /// Threshold `e(mt + C_last)` of form 1.
    pub threshold_form1: f64,
    /// `e^{p₀}·exp(−min_k (t/C_k)^{1/β_k})`.
    pub bound_form1: f64,
    /// Threshold `e(Σ_k C_k t^{β_k} + C_last)` of form 2.
    pub threshold_form2: f64,
    /// `e^{p₀}·e^{−t}`.
    pub bound_form2: f64,
}

/// Evaluate both tail bounds at `t ≥ 0` for coefficients `C_k > 0`,
/// exponents `β_k > 0`, additive constant `C_last ≥ 0`, and `p₀ ≥ 1`.
pub fn moment_to_tail(
    c: &[f64],
    beta: &[f64],
    c_last: f64,
    p0: f64,
    t: f64,
) -> Result<MomentTailBound> {
    if c.is_empty() || c.len() != beta.len() {
        return Err(Error::DimensionMismatch(format!(
            "moment_to_tail: need matching nonempty coefficient lists, got {} and {}",
            c.len(),
            beta.len()
        )));
    }
    if c.iter().any(|&x| !(x > 0.0)) || beta.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::InvalidParameter(
            "moment_to_tail: all C_k and β_k must be positive".into(),
        ));
    }
    if !(p0 >= 1.0) || !(c_last >= 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "moment_to_tail: need p0 ≥ 1, C_last ≥ 0, t ≥ 0 (got {p0}, {c_last}, {t})"
        )));
    }
    let m = c.len() as f64;
    let min_exp = c
        .iter()
        .zip(beta)
        .map(|(&ck, &bk)| ratio_pow(t, ck, 1.0 / bk))
        .fold(f64::INFINITY, f64::min);
    let sum_ctb: f64 = c
        .iter()
        .zip(beta)
        .map(|(&ck, &bk)| ck * t.powf(bk))
        .sum();
    let e = std::f64::consts::E;
    Ok(MomentTailBound {
        threshold_form1: e * (m * t + c_last),
        bound_form1: p0.exp() * (-min_exp).exp(),
        threshold_form2: e * (sum_ctb + c_last),
        bound_form2: (p0 - t).exp(),
    })
}

/// A Monte-Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl McEstimate {
    fn from_values(values: &[f64]) -> McEstimate {
        let m = mean(values);
        let var = mean(
            &values
                .iter()
                .map(|&v| (v - m) * (v - m))
                .collect::<Vec<_>>(),
        );
        McEstimate {
            mean: m,
            se: (var / values.len() as f64).sqrt(),
            n: values.len(),
        }
    }
}

/// Supremum expectations over a finite matrix family (finite-net surrogate
/// of the general supremum, which these estimates approach from below).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SupEstimates {
    /// `E sup_A |θᵀAη̃|` with `θ`, `η̃` independent draws.
    pub bilinear: McEstimate,
    /// `E sup_A ‖Aη‖₂`.
    pub a_eta_l2: McEstimate,
    /// `E sup_A ‖Aη‖_{α*}` with `α*` the source shape's conjugate.
    pub a_eta_astar: McEstimate,
}

fn family_dims(family: &[DMatrix<f64>], what: &str) -> Result<(usize, usize)> {
    let first = family.first().ok_or_else(|| {
        Error::InvalidParameter(format!("{what}: family must be nonempty"))
    })?;
    let dims = (first.nrows(), first.ncols());
    if dims.0 == 0 || dims.1 == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{what}: matrices must be nonempty"
        )));
    }
    for a in family {
        if (a.nrows(), a.ncols()) != dims {
            return Err(Error::DimensionMismatch(format!(
                "{what}: all family members must share dimensions, got {}×{} vs {}×{}",
                a.nrows(),
                a.ncols(),
                dims.0,
                dims.1
            )));
        }
    }
    Ok(dims)
}

/// Monte-Carlo estimates of the three supremum expectations over a finite
/// family of `m×n` matrices. Per draw: `η, η̃ ∈ ℝⁿ` and `θ ∈ ℝᵐ` are
/// sampled from `source`, and the maxima of `|θᵀAη̃|`, `‖Aη‖₂`, `‖Aη‖_{α*}`
/// over the family are recorded.
pub fn sup_expectations(
    family: &[DMatrix<f64>],
    source: SamplerSpec,
    n_draws: usize,
    stream: &RngStream,
) -> Result<SupEstimates> {
    let (m, n) = family_dims(family, "sup_expectations")?;
    if n_draws == 0 {
        return Err(Error::InvalidParameter(
            "sup_expectations: need at least one draw".into(),
        ));
    }
    let astar = source.shape.conjugate();
    let triples = chunked_map(n_draws, |chunk, range| {
        let mut rng = stream.child("sup-chunk").child(chunk as u64).rng();
        let mut eta = vec![0.0; n];
        let mut eta_tilde = vec![0.0; n];
        let mut theta = vec![0.0; m];
        let mut out_vec = vec![0.0; m];
        let mut block = Vec::with_capacity(range.len());
        for _ in range {
            source.fill(&mut rng, &mut eta);
            source.fill(&mut rng, &mut eta_tilde);
            source.fill(&mut rng, &mut theta);
            let mut best_bilinear = 0.0f64;
            let mut best_l2 = 0.0f64;
            let mut best_lq = 0.0f64;
            for a in family {
                let cols = a.as_slice();
                // out = A·η and the bilinear form θᵀA·η̃ in one pass set.
                let mut bilinear = 0.0;
                out_vec.iter_mut().for_each(|v| *v = 0.0);
                for j in 0..n {
                    let col = &cols[j * m..(j + 1) * m];
                    let ej = eta[j];
                    let tj = eta_tilde[j];
                    let mut col_dot_theta = 0.0;
                    for i in 0..m {
                        out_vec[i] += col[i] * ej;
                        col_dot_theta += col[i] * theta[i];
                    }
                    bilinear += col_dot_theta * tj;
                }
                best_bilinear = best_bilinear.max(bilinear.abs());
                let l2 = pairwise_sum(&out_vec.iter().map(|&v| v * v).collect::<Vec<_>>()).sqrt();
                best_l2 = best_l2.max(l2);
                best_lq = best_lq.max(lq_norm(&out_vec, astar));
            }
            block.push((best_bilinear, best_l2, best_lq));
        }
        block
    });
    let bs: Vec<f64> = triples.iter().map(|t| t.0).collect();
    let l2s: Vec<f64> = triples.iter().map(|t| t.1).collect();
    let lqs: Vec<f64> = triples.iter().map(|t| t.2).collect();
    Ok(SupEstimates {
        bilinear: McEstimate::from_values(&bs),
        a_eta_l2: McEstimate::from_values(&l2s),
        a_eta_astar: McEstimate::from_values(&lqs),
    })
}

/// How `Γ(α, 𝒜) = γ₂(𝒜, ‖·‖_{2→2}) + γ_α(𝒜, ‖·‖_{2→α*})` is obtained.
#[derive(Clone, Debug, Serialize)]
pub enum GammaSource {
    /// Dudley integrals over greedy-net entropy of the family's own
    /// pairwise distances in each of the two metrics.
    DudleyEmpirical,
    /// Closed-form circulant-family bounds with leading constant `c`.
    ClosedForm {
        s: usize,
        n: usize,
        m: usize,
        c: f64,
    },
}

/// Γ split into its two functionals.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GammaEstimate {
    pub gamma_2: f64,
    pub gamma_alpha: f64,
    pub gamma: f64,
}

fn empirical_gamma_term(
    family: &[DMatrix<f64>],
    exponent: AlphaShape,
    metric: impl Fn(&DMatrix<f64>) -> Result<f64>,
) -> Result<f64> {
    let k = family.len();
    let mut dist = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in (i + 1)..k {
            let d = metric(&(&family[i] - &family[j]))?;
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    let cover = EmpiricalCover::from_distance_matrix(dist)?;
    let diameter = cover.diameter();
    if diameter <= 0.0 {
        // All members coincide: a single point has zero chaining cost.
        return Ok(0.0);
    }
    dudley_gamma(
        &CoverModel::new(CoverKind::Empirical(cover)),
        exponent,
        diameter,
    )
}

/// Evaluate `Γ(α, 𝒜)` for a finite family.
pub fn gamma_functional(
    family: &[DMatrix<f64>],
    alpha: AlphaShape,
    source: &GammaSource,
) -> Result<GammaEstimate> {
    family_dims(family, "gamma_functional")?;
    let (gamma_2, gamma_alpha) = match source {
        GammaSource::DudleyEmpirical => {
            let astar = alpha.conjugate();
            let g2 = empirical_gamma_term(family, AlphaShape::new(2.0)?, |d| {
                Ok(spectral_norm(d).value)
            })?;
            let ga = empirical_gamma_term(family, alpha, |d| mixed_norm_upper(d, astar))?;
            (g2, ga)
        }
        GammaSource::ClosedForm { s, n, m, c } => (
            closed_form_gamma(AlphaShape::new(2.0)?, *s, *n, *m, *c),
            closed_form_gamma(alpha, *s, *n, *m, *c),
        ),
    };
    Ok(GammaEstimate {
        gamma_2,
        gamma_alpha,
        gamma: gamma_2 + gamma_alpha,
    })
}

/// All deviation-bound ingredients for one family, plus the configuration
/// constants that scale the tail curves.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub alpha: f64,
    pub family_size: usize,
    /// `sup_A ‖A‖_F`.
    pub m_f: f64,
    /// `sup_A ‖A‖_{2→2}`.
    pub m_2_2: f64,
    /// `sup_A ‖A‖_{2→α*}` (upper endpoints).
    pub m_2_astar: f64,
    /// `sup_A ‖AᵀA‖_F` (enters U₂′).
    pub sup_ata_f: f64,
    pub gamma_2: f64,
    pub gamma_alpha: f64,
    /// `Γ = γ₂ + γ_α`.
    pub gamma: f64,
    /// Short label of how Γ was produced (net size or closed-form params).
    pub gamma_label: String,
    /// `T = max{E sup‖Aη‖₂, M_F}`.
    pub t_a: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
    pub u2_prime: f64,
    pub u3_prime: f64,
    pub e_sup_bilinear: McEstimate,
    pub e_sup_a_eta_2: McEstimate,
    pub e_sup_a_eta_astar: McEstimate,
    /// Configuration constant C(α) (threshold scale), echoed verbatim.
    pub c_alpha: f64,
    /// Configuration constant C₁(α) (tail prefactor), echoed verbatim.
    pub c1_alpha: f64,
}

/// Assemble a [`BoundReport`]: exact norm suprema, Γ from the requested
/// source, Monte-Carlo supremum expectations (with `η` drawn from the raw
/// power-exponential density `c(α)e^{−|x|^α}`), and the derived
/// `T, U₁–U₃, U₂′, U₃′`. The unspecified absolute constants are passed in
/// (`c_alpha`, `c1_alpha`, both typically 1) and echoed in the report.
pub fn deviation_bound_suite(
    family: &[DMatrix<f64>],
    alpha: AlphaShape,
    gamma_source: &GammaSource,
    n_draws: usize,
    c_alpha: f64,
    c1_alpha: f64,
    stream: &RngStream,
) -> Result<BoundReport> {
    family_dims(family, "deviation_bound_suite")?;
    if !(c_alpha > 0.0 && c1_alpha > 0.0) {
        return Err(Error::InvalidParameter(
            "deviation_bound_suite: constants must be positive".into(),
        ));
    }
    let astar = alpha.conjugate();
    let mut m_f = 0.0f64;
    let mut m_2_2 = 0.0f64;
    let mut m_2_astar = 0.0f64;
    let mut sup_ata_f = 0.0f64;
    for a in family {
        m_f = m_f.max(exact_norms(a).frobenius);
        m_2_2 = m_2_2.max(spectral_norm(a).value);
        m_2_astar = m_2_astar.max(mixed_norm_upper(a, astar)?);
        sup_ata_f = sup_ata_f.max(exact_norms(&(a.transpose() * a)).frobenius);
    }
    let gamma = gamma_functional(family, alpha, gamma_source)?;
    let gamma_label = match gamma_source {
        GammaSource::DudleyEmpirical => {
            format!("dudley-empirical over {} matrices", family.len())
        }
        GammaSource::ClosedForm { s, n, m, c } => {
            format!("closed-form(s={s}, n={n}, m={m}, c={c})")
        }
    };
    // η carries the raw (unstandardized) power-exponential density: the
    // supremum terms are defined against c(α)·e^{−|x|^α} itself.
    let eta_source = SamplerSpec::new(SourceKind::PowerExponential, alpha, false);
    let sups = sup_expectations(family, eta_source, n_draws, &stream.child("sup"))?;
    let t_a = sups.a_eta_l2.mean.max(m_f);
    Ok(BoundReport {
        alpha: alpha.alpha(),
        family_size: family.len(),
        m_f,
        m_2_2,
        m_2_astar,
        sup_ata_f,
        gamma_2: gamma.gamma_2,
        gamma_alpha: gamma.gamma_alpha,
        gamma: gamma.gamma,
        gamma_label,
        t_a,
        u1: gamma.gamma * (gamma.gamma + m_f),
        u2: m_2_2 * (gamma.gamma + m_f),
        u3: m_2_astar * (gamma.gamma + m_f),
        u2_prime: m_2_2 * gamma.gamma + sup_ata_f,
        u3_prime: m_2_astar * gamma.gamma,
        e_sup_bilinear: sups.bilinear,
        e_sup_a_eta_2: sups.a_eta_l2,
        e_sup_a_eta_astar: sups.a_eta_astar,
        c_alpha,
        c1_alpha,
    })
}

/// Tail curve of the uniform Hanson–Wright deviation bound for chaoses:
/// `C₁·exp(−min{(t/T)², (t/E sup‖Aη‖_{α*})^α, (t/M_{2→2})^{α/2}})`.
pub fn uniform_chaos_tail(report: &BoundReport, t_grid: &[f64]) -> Vec<f64> {
    let al = report.alpha;
    t_grid
        .iter()
        .map(|&t| {
            let ex = [
                ratio_pow(t, report.t_a, 2.0),
                ratio_pow(t, report.e_sup_a_eta_astar.mean, al),
                ratio_pow(t, report.m_2_2, al / 2.0),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            report.c1_alpha * (-ex).exp()
        })
        .collect()
}

/// Tail curve of the uniform deviation bound for `‖Aξ‖₂² − E‖Aξ‖₂²`:
/// `C₁·exp(−min{(t/U₂)², (t/U₃)^α, (t/M²_{2→2})^{α/2}})`.
pub fn uniform_square_tail(report: &BoundReport, t_grid: &[f64]) -> Vec<f64> {
    let al = report.alpha;
    t_grid
        .iter()
        .map(|&t| {
            let ex = [
                ratio_pow(t, report.u2, 2.0),
                ratio_pow(t, report.u3, al),
                ratio_pow(t, report.m_2_2 * report.m_2_2, al / 2.0),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            report.c1_alpha * (-ex).exp()
        })
        .collect()
}

/// Result of one empirical decoupling comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecouplingCheck {
    /// Empirical `E|S_A(ξ) − E S_A(ξ)|^p`.
    pub lhs: f64,
    /// Empirical `E|C·ηᵀAη̃|^p = C^p·E|ηᵀAη̃|^p`.
    pub rhs: f64,
    /// `lhs/rhs`; 0 when both vanish.
    pub ratio: f64,
    /// Bootstrap 95% interval for the ratio.
    pub ratio_ci: (f64, f64),
    pub p: f64,
    pub c: f64,
}

/// Core decoupling comparison on precomputed sample sets (`coupled` holds
/// centered `S_A(ξ)` draws, `decoupled` holds `ηᵀAη̃` draws). Bootstrap
/// resamples both sets independently `n_bootstrap` times.
pub fn decoupling_check_sets(
    coupled: &ChaosSampleSet,
    decoupled: &ChaosSampleSet,
    p: f64,
    c: f64,
    n_bootstrap: usize,
    stream: &RngStream,
) -> Result<DecouplingCheck> {
    if coupled.is_empty() || decoupled.is_empty() {
        return Err(Error::InvalidParameter(
            "decoupling_check: sample sets must be nonempty".into(),
        ));
    }
    if !(p >= 1.0) || !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decoupling_check: need p ≥ 1 and C > 0, got p = {p}, C = {c}"
        )));
    }
    let lhs_pow: Vec<f64> = coupled.values.iter().map(|&v| v.abs().powf(p)).collect();
    let rhs_pow: Vec<f64> = decoupled.values.iter().map(|&v| v.abs().powf(p)).collect();
    let c_pow = c.powf(p);
    let ratio_of = |l: f64, r: f64| -> f64 {
        if l == 0.0 {
            0.0
        } else {
            l / (c_pow * r)
        }
    };
    let lhs = mean(&lhs_pow);
    let rhs = c_pow * mean(&rhs_pow);
    let ratio = ratio_of(lhs, mean(&rhs_pow));

    let ratios = indexed_map(n_bootstrap, |b| {
        let mut rng = stream.child("bootstrap").child(b as u64).rng();
        let resample_mean = |pow: &[f64], rng: &mut rand_chacha::ChaCha8Rng| {
            let n = pow.len();
            let picks: Vec<f64> = (0..n).map(|_| pow[rng.random_range(0..n)]).collect();
            mean(&picks)
        };
        let l = resample_mean(&lhs_pow, &mut rng);
        let r = resample_mean(&rhs_pow, &mut rng);
        ratio_of(l, r)
    });
    let ci = if ratios.is_empty() {
        (ratio, ratio)
    } else {
        let mut sorted = ratios;
        sorted.sort_by(f64::total_cmp);
        let idx = |q: f64| ((sorted.len() - 1) as f64 * q).round() as usize;
        (sorted[idx(0.025)], sorted[idx(0.975)])
    };
    Ok(DecouplingCheck {
        lhs,
        rhs,
        ratio,
        ratio_ci: ci,
        p,
        c,
    })
}

/// Sample-and-compare convenience wrapper around [`decoupling_check_sets`].
#[allow(clippy::too_many_arguments)]
pub fn decoupling_check(
    a: &DMatrix<f64>,
    source_xi: SamplerSpec,
    source_eta: SamplerSpec,
    p: f64,
    n_samples: usize,
    c: f64,
    n_bootstrap: usize,
    stream: &RngStream,
) -> Result<DecouplingCheck> {
    let coupled = chaos_samples(a, source_xi, n_samples, &stream.child("coupled"))?;
    let decoupled = decoupled_samples(a, source_eta, n_samples, &stream.child("decoupled"))?;
    decoupling_check_sets(&coupled, &decoupled, p, c, n_bootstrap, &stream.child("ci"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_source(alpha: f64) -> SamplerSpec {
        SamplerSpec::new(
            SourceKind::SymmetricWeibull,
            AlphaShape::new(alpha).unwrap(),
            true,
        )
    }

    #[test]
    fn zero_matrix_gives_zero_samples() {
        let a = DMatrix::<f64>::zeros(4, 4);
        let set = chaos_samples(&a, std_source(1.5), 200, &RngStream::new(1)).unwrap();
        assert!(set.values.iter().all(|&v| v == 0.0));
        let dec = decoupled_samples(&a, std_source(1.5), 200, &RngStream::new(1)).unwrap();
        assert!(dec.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn raw_sources_are_rejected() {
        let a = DMatrix::<f64>::identity(4, 4);
        let raw = SamplerSpec::new(
            SourceKind::SymmetricWeibull,
            AlphaShape::new(1.5).unwrap(),
            false,
        );
        assert!(chaos_samples(&a, raw, 10, &RngStream::new(1)).is_err());
    }

    #[test]
    fn phi2_is_zero_at_origin_and_monotone() {
        let a = DMatrix::<f64>::identity(3, 3);
        let phi = Phi2::new(&a, AlphaShape::new(1.5).unwrap()).unwrap();
        assert_eq!(phi.eval(0.0).unwrap(), 0.0);
        let mut prev = 0.0;
        for k in 1..40 {
            let v = phi.eval(k as f64 * 0.25).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(phi.eval(-1.0).is_err());
    }

    #[test]
    fn tail_curve_grid_must_increase() {
        let set = ChaosSampleSet::from_values("t", std_source(2.0), vec![1.0; 128]);
        assert!(empirical_tail(&set, &[1.0, 1.0]).is_err());
        assert!(empirical_tail(&set, &[2.0, 1.0]).is_err());
        let curve = empirical_tail(&set, &[0.5, 1.5]).unwrap();
        assert_eq!(curve.empirical, vec![1.0, 0.0]);
    }
}
