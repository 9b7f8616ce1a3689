//! Restricted isometry constants and success-probability scans.
//!
//! The restricted isometry constant of order `s` for a measurement matrix
//! `Φ ∈ 𝔽^{m×n}` is
//!
//! ```text
//! δ_s(Φ) = max_{|S| = s} ‖Φ_S*Φ_S − I_s‖_{2→2}
//!        = max_{|S| = s} max{λ_max(Φ_S*Φ_S) − 1, 1 − λ_min(Φ_S*Φ_S)},
//! ```
//!
//! a maximum of Hermitian eigenvalue deviations over all `s`-column
//! submatrices. [`delta_s_exact`] enumerates every support (guarded by an
//! explicit budget on `C(n, s)`); [`delta_s_mc_lower`] maximizes over a
//! random sample of supports, which always yields a lower bound.
//!
//! Both return an extremal witness: the support, the extremal Rayleigh
//! quotient `λ`, and a unit vector `x` supported there with
//! `‖Φx‖₂² = λ` and `|λ − 1| = δ`. Every estimate can therefore be
//! re-verified against the matrix it came from.
//!
//! On top of the per-matrix constants sit ensemble statistics:
//! [`rip_success_prob`] estimates `P{δ_s(Φ) ≤ δ}` over fresh ensemble
//! draws with a Wilson score interval, and [`minimal_m_scan`] bisects for
//! the smallest row count `m` whose success probability clears a target,
//! with a majority vote over independent probes to tame Monte-Carlo noise.

use crate::chaining::sample_complexity;
use crate::par::indexed_map;
use crate::samplers::AlphaShape;
use crate::stream::RngStream;
use crate::structured::{AnyOp, EnsembleSpec};
use crate::{Error, Result};
use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Multiplying i+1 consecutive integers keeps the quotient integral.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Advance `idx` to the next `s`-subset of `{0, …, n−1}` in lexicographic
/// order; returns `false` after the last subset.
fn next_support(idx: &mut [usize], n: usize) -> bool {
    let s = idx.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - s {
            idx[i] += 1;
            for j in (i + 1)..s {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Eigenvalue deviation of one support: `(max{λmax−1, 1−λmin}, extremal λ)`.
fn support_deviation<T>(phi: &DMatrix<T>, support: &[usize]) -> (f64, f64)
where
    T: ComplexField<RealField = f64>,
{
    let sub = phi.select_columns(support.iter());
    let gram = sub.adjoint() * &sub;
    // The tridiagonalization assumes an exactly Hermitian input.
    let gram = (&gram + gram.adjoint()).scale(0.5);
    let eig = gram.symmetric_eigenvalues();
    let lmax = eig.max();
    let lmin = eig.min();
    if lmax - 1.0 >= 1.0 - lmin {
        (lmax - 1.0, lmax)
    } else {
        (1.0 - lmin, lmin)
    }
}

/// A restricted isometry estimate with its extremal witness.
#[derive(Clone, Debug)]
pub struct RipEstimate<T: ComplexField<RealField = f64>> {
    /// `max{λ − 1, 1 − λ}` at the witness (for [`delta_s_exact`] the exact
    /// constant; for [`delta_s_mc_lower`] a lower bound on it).
    pub delta: f64,
    /// The extremal Rayleigh quotient `‖Φx‖₂²` of the unit witness.
    pub lambda: f64,
    /// Witness support (ascending indices).
    pub support: Vec<usize>,
    /// Unit witness vector in the ambient space, zero off the support.
    pub witness: DVector<T>,
    /// Number of supports whose Gram spectra were examined.
    pub supports_checked: u64,
}

/// Serializable summary (the witness vector itself is omitted).
#[derive(Clone, Debug, Serialize)]
pub struct RipSummary {
    pub delta: f64,
    pub lambda: f64,
    pub support: Vec<usize>,
    pub supports_checked: u64,
}

impl<T: ComplexField<RealField = f64>> RipEstimate<T> {
    pub fn summary(&self) -> RipSummary {
        RipSummary {
            delta: self.delta,
            lambda: self.lambda,
            support: self.support.clone(),
            supports_checked: self.supports_checked,
        }
    }

    /// `|‖Φx‖₂² − λ|` for the stored witness: a self-check that should be
    /// at numerical-noise level for a valid estimate.
    pub fn witness_residual(&self, phi: &DMatrix<T>) -> Result<f64> {
        if phi.ncols() != self.witness.len() {
            return Err(Error::DimensionMismatch(format!(
                "witness_residual: {} columns vs witness length {}",
                phi.ncols(),
                self.witness.len()
            )));
        }
        let image = phi * &self.witness;
        Ok((image.norm_squared() - self.lambda).abs())
    }
}

fn validate_sparsity<T: ComplexField<RealField = f64>>(
    phi: &DMatrix<T>,
    s: usize,
    what: &str,
) -> Result<usize> {
    let n = phi.ncols();
    if phi.nrows() == 0 || n == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{what}: matrix must be nonempty, got {}×{n}",
            phi.nrows()
        )));
    }
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "{what}: sparsity must satisfy 1 ≤ s ≤ n = {n}, got {s}"
        )));
    }
    Ok(n)
}

/// Build the witness estimate for a chosen support via one full
/// eigendecomposition (delta and lambda are re-derived there so that the
/// witness and the reported numbers are mutually consistent).
fn witness_at_support<T>(
    phi: &DMatrix<T>,
    support: &[usize],
    supports_checked: u64,
) -> RipEstimate<T>
where
    T: ComplexField<RealField = f64>,
{
    let sub = phi.select_columns(support.iter());
    let gram = sub.adjoint() * &sub;
    let gram = (&gram + gram.adjoint()).scale(0.5);
    let se = SymmetricEigen::new(gram);
    let mut best = 0usize;
    let mut best_dev = f64::NEG_INFINITY;
    for (k, &lam) in se.eigenvalues.iter().enumerate() {
        let dev = (lam - 1.0).max(1.0 - lam);
        if dev > best_dev {
            best_dev = dev;
            best = k;
        }
    }
    let lambda = se.eigenvalues[best];
    let v = se.eigenvectors.column(best);
    let mut witness = DVector::<T>::zeros(phi.ncols());
    for (pos, &j) in support.iter().enumerate() {
        witness[j] = v[pos].clone();
    }
    let norm = witness.norm();
    if norm > 0.0 {
        witness.unscale_mut(norm);
    }
    RipEstimate {
        delta: best_dev,
        lambda,
        support: support.to_vec(),
        witness,
        supports_checked,
    }
}

/// Exact `δ_s(Φ)` by exhaustive support enumeration.
///
/// Refuses to start when `C(n, s)` exceeds `budget` (the scan would cost
/// one `s×s` Hermitian eigenproblem per support). Ties between supports
/// resolve to the lexicographically earliest one.
pub fn delta_s_exact<T>(phi: &DMatrix<T>, s: usize, budget: u64) -> Result<RipEstimate<T>>
where
    T: ComplexField<RealField = f64> + Send + Sync,
{
    let n = validate_sparsity(phi, s, "delta_s_exact")?;
    let count = binomial(n as u64, s as u64);
    if count > budget {
        return Err(Error::BudgetExceeded(format!(
            "delta_s_exact: C({n}, {s}) = {count} supports exceed the budget of {budget}"
        )));
    }
    let count = count as usize;
    let mut flat = Vec::with_capacity(count * s);
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        flat.extend_from_slice(&idx);
        if !next_support(&mut idx, n) {
            break;
        }
    }
    debug_assert_eq!(flat.len(), count * s);
    let devs = indexed_map(count, |i| support_deviation(phi, &flat[i * s..(i + 1) * s]).0);
    let mut winner = 0usize;
    let mut best = f64::NEG_INFINITY;
    for (i, &dev) in devs.iter().enumerate() {
        if dev > best {
            best = dev;
            winner = i;
        }
    }
    Ok(witness_at_support(
        phi,
        &flat[winner * s..(winner + 1) * s],
        count as u64,
    ))
}

/// Monte-Carlo lower bound on `δ_s(Φ)`: the maximum deviation over
/// `n_supports` uniformly sampled supports. Always `≤ δ_s(Φ)`; equals it
/// when the sample happens to hit an extremal support.
pub fn delta_s_mc_lower<T>(
    phi: &DMatrix<T>,
    s: usize,
    n_supports: usize,
    stream: &RngStream,
) -> Result<RipEstimate<T>>
where
    T: ComplexField<RealField = f64> + Send + Sync,
{
    let n = validate_sparsity(phi, s, "delta_s_mc_lower")?;
    if n_supports == 0 {
        return Err(Error::InvalidParameter(
            "delta_s_mc_lower: need at least one sampled support".into(),
        ));
    }
    let samples = indexed_map(n_supports, |i| {
        let mut rng = stream.child("support").child(i).rng();
        let mut support = rand::seq::index::sample(&mut rng, n, s).into_vec();
        support.sort_unstable();
        let (dev, _) = support_deviation(phi, &support);
        (dev, support)
    });
    let mut winner = 0usize;
    let mut best = f64::NEG_INFINITY;
    for (i, (dev, _)) in samples.iter().enumerate() {
        if *dev > best {
            best = *dev;
            winner = i;
        }
    }
    Ok(witness_at_support(
        phi,
        &samples[winner].1,
        n_supports as u64,
    ))
}

/// How a per-draw restricted isometry constant is evaluated inside
/// ensemble statistics.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum DeltaProbe {
    /// Full enumeration (errors out if `C(n, s)` exceeds the budget).
    Exact { budget: u64 },
    /// Sampled-support lower bound; success indicators are then optimistic
    /// (a lower bound can only under-report δ).
    McLower { n_supports: usize },
}

fn probe_delta(op: &AnyOp, s: usize, probe: DeltaProbe, stream: &RngStream) -> Result<f64> {
    let delta = match (op, probe) {
        (AnyOp::Real(op), DeltaProbe::Exact { budget }) => {
            delta_s_exact(&op.to_dense(), s, budget)?.delta
        }
        (AnyOp::Real(op), DeltaProbe::McLower { n_supports }) => {
            delta_s_mc_lower(&op.to_dense(), s, n_supports, stream)?.delta
        }
        (AnyOp::Complex(op), DeltaProbe::Exact { budget }) => {
            delta_s_exact(&op.to_dense(), s, budget)?.delta
        }
        (AnyOp::Complex(op), DeltaProbe::McLower { n_supports }) => {
            delta_s_mc_lower(&op.to_dense(), s, n_supports, stream)?.delta
        }
    };
    Ok(delta)
}

/// Wilson score interval for a binomial proportion at critical value `z`
/// (`z = 1.96` for the conventional 95% level). Clamped to `[0, 1]`.
pub fn wilson_ci(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidParameter(format!(
            "wilson_ci: need 0 ≤ successes ≤ trials with trials ≥ 1, got {successes}/{trials}"
        )));
    }
    if !(z > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wilson_ci: need z > 0, got {z}"
        )));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) + z2 / (4.0 * n)) / n).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Estimated `P{δ_s(Φ) ≤ δ}` over ensemble draws.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuccessProb {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    /// 95% Wilson score interval (`z = 1.96`).
    pub ci: (f64, f64),
}

/// Estimate the probability that a fresh ensemble draw satisfies
/// `δ_s(Φ) ≤ delta_target`. Each trial draws its own operator from a child
/// stream keyed by the trial index, so the estimate is independent of
/// thread count.
pub fn rip_success_prob(
    spec: &EnsembleSpec,
    s: usize,
    delta_target: f64,
    n_trials: usize,
    probe: DeltaProbe,
    stream: &RngStream,
) -> Result<SuccessProb> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter(
            "rip_success_prob: need at least one trial".into(),
        ));
    }
    if !(delta_target > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rip_success_prob: need delta_target > 0, got {delta_target}"
        )));
    }
    if s == 0 || s > spec.n {
        return Err(Error::InvalidParameter(format!(
            "rip_success_prob: sparsity must satisfy 1 ≤ s ≤ n = {}, got {s}",
            spec.n
        )));
    }
    let outcomes: Vec<Result<bool>> = indexed_map(n_trials, |i| {
        let trial = stream.child("trial").child(i);
        let op = spec.draw(&trial.child("draw"))?;
        let delta = probe_delta(&op, s, probe, &trial.child("probe"))?;
        Ok(delta <= delta_target)
    });
    let mut successes = 0u64;
    for outcome in outcomes {
        if outcome? {
            successes += 1;
        }
    }
    let trials = n_trials as u64;
    Ok(SuccessProb {
        successes,
        trials,
        p_hat: successes as f64 / trials as f64,
        ci: wilson_ci(successes, trials, 1.96)?,
    })
}

/// Configuration of a minimal-measurement bisection scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanConfig {
    pub s: usize,
    /// Per-draw acceptance threshold on `δ_s`.
    pub delta_target: f64,
    /// Required success probability (compared against `p_hat`).
    pub success_target: f64,
    /// Trials per success-probability estimate.
    pub n_trials: usize,
    /// Independent probes per `m`; the majority verdict decides. Odd values
    /// avoid ties (an even split counts as failure).
    pub probes_per_m: usize,
    /// Inclusive search bracket.
    pub m_lo: usize,
    pub m_hi: usize,
}

/// One probed row count and its verdict.
#[derive(Clone, Debug, Serialize)]
pub struct ScanProbe {
    pub m: usize,
    pub p_hats: Vec<f64>,
    pub meets: bool,
}

/// Outcome of [`minimal_m_scan`].
#[derive(Clone, Debug, Serialize)]
pub struct MScanResult {
    /// Smallest probed `m` meeting the target, if any does within the
    /// bracket (`None` when even `m_hi` fails its majority vote).
    pub m_star: Option<usize>,
    /// Every probed `m` in evaluation order.
    pub probes: Vec<ScanProbe>,
}

/// Bisect for the smallest `m ∈ [m_lo, m_hi]` whose ensemble clears the
/// success target, assuming success probability is nondecreasing in `m`.
///
/// Every probe uses fresh draws: streams are keyed by `(m, probe index)`,
/// never reused across the scan, so the bisection path cannot bias the
/// verdicts. `make_spec` builds the ensemble for a candidate `m`.
pub fn minimal_m_scan(
    make_spec: impl Fn(usize) -> Result<EnsembleSpec>,
    cfg: &ScanConfig,
    probe: DeltaProbe,
    stream: &RngStream,
) -> Result<MScanResult> {
    if cfg.m_lo == 0 || cfg.m_lo > cfg.m_hi {
        return Err(Error::InvalidParameter(format!(
            "minimal_m_scan: need 1 ≤ m_lo ≤ m_hi, got [{}, {}]",
            cfg.m_lo, cfg.m_hi
        )));
    }
    if !(cfg.success_target > 0.0 && cfg.success_target <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "minimal_m_scan: success target must lie in (0, 1], got {}",
            cfg.success_target
        )));
    }
    if cfg.probes_per_m == 0 {
        return Err(Error::InvalidParameter(
            "minimal_m_scan: need at least one probe per m".into(),
        ));
    }
    let mut probes = Vec::new();
    let mut meets = |m: usize| -> Result<bool> {
        let spec = make_spec(m)?;
        let mut p_hats = Vec::with_capacity(cfg.probes_per_m);
        let mut votes = 0usize;
        for j in 0..cfg.probes_per_m {
            let est = rip_success_prob(
                &spec,
                cfg.s,
                cfg.delta_target,
                cfg.n_trials,
                probe,
                &stream.child("m").child(m).child("probe").child(j),
            )?;
            if est.p_hat >= cfg.success_target {
                votes += 1;
            }
            p_hats.push(est.p_hat);
        }
        let verdict = 2 * votes > cfg.probes_per_m;
        probes.push(ScanProbe {
            m,
            p_hats,
            meets: verdict,
        });
        Ok(verdict)
    };
    if meets(cfg.m_lo)? {
        return Ok(MScanResult {
            m_star: Some(cfg.m_lo),
            probes,
        });
    }
    if cfg.m_lo == cfg.m_hi || !meets(cfg.m_hi)? {
        return Ok(MScanResult {
            m_star: None,
            probes,
        });
    }
    // Invariant: fails at lo, meets at hi.
    let (mut lo, mut hi) = (cfg.m_lo, cfg.m_hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MScanResult {
        m_star: Some(hi),
        probes,
    })
}

/// One sparsity level of a scaling scan: the minimal row count and its
/// ratio to the sample-complexity prediction `f1(s, n)`.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub s: usize,
    pub m_star: Option<usize>,
    pub f1: f64,
    /// `m*(s) / f1(s, n)`; `None` when the bracket produced no `m*`.
    pub ratio: Option<f64>,
    pub probes: Vec<ScanProbe>,
}

/// `m*(s)` table across sparsity levels, with the least-squares slope of
/// `ln m*` against `ln f1` and the max/min spread of the ratios.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingScan {
    pub n: usize,
    pub delta_target: f64,
    pub rows: Vec<ScalingRow>,
    /// Slope of the least-squares line through `(ln f1, ln m*)` over rows
    /// that resolved; `None` with fewer than two such rows or a degenerate
    /// abscissa.
    pub slope: Option<f64>,
    /// `max / min` of the resolved ratios `m*(s)/f1(s, n)`.
    pub ratio_spread: Option<f64>,
}

/// Least-squares slope of `y` against `x`; `None` when fewer than two
/// points are given or all abscissae coincide.
fn ls_slope(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Run [`minimal_m_scan`] at every sparsity in `s_list` (the `s` field of
/// `base` is overridden per row) and relate the resulting `m*(s)` to the
/// sample-complexity prediction `f1(s, n)` for the given tail exponent.
///
/// `n` is the ambient (column) dimension the ensembles share. Each row uses
/// the child stream `("s", s)`, so rows are independent and the scan is
/// deterministic for a fixed seed regardless of `s_list` order.
pub fn m_star_scaling(
    make_spec: impl Fn(usize) -> Result<EnsembleSpec>,
    alpha: AlphaShape,
    n: usize,
    s_list: &[usize],
    base: &ScanConfig,
    probe: DeltaProbe,
    stream: &RngStream,
) -> Result<ScalingScan> {
    if s_list.is_empty() {
        return Err(Error::InvalidParameter(
            "m_star_scaling: empty sparsity list".into(),
        ));
    }
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let f1 = sample_complexity(alpha, s, n, base.delta_target, 1.0)?.f1;
        let cfg = ScanConfig { s, ..*base };
        let scan = minimal_m_scan(&make_spec, &cfg, probe, &stream.child("s").child(s))?;
        rows.push(ScalingRow {
            s,
            m_star: scan.m_star,
            f1,
            ratio: scan.m_star.map(|m| m as f64 / f1),
            probes: scan.probes,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.m_star.map(|m| (r.f1.ln(), (m as f64).ln())))
        .collect();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let ratio_spread = if ratios.is_empty() {
        None
    } else {
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        Some(hi / lo)
    };
    Ok(ScalingScan {
        n,
        delta_target: base.delta_target,
        rows,
        slope: ls_slope(&pts),
        ratio_spread,
    })
}
