//! Sparse recovery by basis pursuit and phase-transition experiments.
//!
//! [`basis_pursuit`] solves `min ‖x‖₁ s.t. Φx = y` (real or complex) with
//! the alternating direction method of multipliers: alternating projection
//! onto the affine constraint set (one Cholesky factorization of `ΦΦ*`,
//! reused every iteration) against the modulus soft-threshold proximal
//! step of the ℓ₁ norm. The returned iterate is the *projected* one, so it
//! satisfies the constraint to factorization accuracy regardless of how
//! early the iteration stopped; `converged` reports whether the successive
//! and primal gaps dropped below tolerance.
//!
//! [`l1_min_enumerate`] is an exact reference solver for small real
//! instances: it enumerates basic feasible solutions of the standard-form
//! linear program `min Σ(p + q) s.t. [Φ, −Φ](p; q) = y, p, q ≥ 0`, whose
//! optimum is attained at a vertex. Exponential in `m`, so guarded by an
//! explicit budget — its purpose is to certify the iterative solver.
//!
//! [`recovery_trial`] and [`phase_transition`] wrap the solver into
//! planted-signal experiments: draw a random unit-norm `s`-sparse signal,
//! measure it, solve, and compare. Success counts aggregate into Wilson
//! intervals per `(m, s)` cell.

use crate::par::indexed_map;
use crate::rip::{binomial, wilson_ci};
use crate::samplers::{AlphaShape, SamplerSpec, SourceKind};
use crate::stream::RngStream;
use crate::structured::{AnyOp, EnsembleSpec};
use crate::{Error, Result};
use nalgebra::{Cholesky, ComplexField, DMatrix, DVector};
use num_complex::Complex;
use serde::Serialize;

/// Modulus soft-threshold: `w ↦ w·(1 − κ/|w|)₊` (phase-preserving).
pub fn soft_threshold<T: ComplexField<RealField = f64>>(w: T, kappa: f64) -> T {
    let modulus = w.clone().modulus();
    if modulus <= kappa {
        T::zero()
    } else {
        w * T::from_real((modulus - kappa) / modulus)
    }
}

/// ADMM parameters for [`basis_pursuit`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BasisPursuitOptions {
    /// Augmented-Lagrangian weight (the ℓ₁ proximal threshold is `1/ρ`).
    pub rho: f64,
    pub max_iters: usize,
    /// Relative tolerance on the successive gap `‖z⁺ − z‖` and the primal
    /// gap `‖x − z‖` (both against `1 + ‖z‖`).
    pub tol: f64,
}

impl Default for BasisPursuitOptions {
    fn default() -> Self {
        BasisPursuitOptions {
            rho: 1.0,
            max_iters: 5000,
            tol: 1e-8,
        }
    }
}

/// Output of [`basis_pursuit`].
#[derive(Clone, Debug)]
pub struct BasisPursuitSolution<T: ComplexField<RealField = f64>> {
    /// Projected iterate: feasible for `Φx = y` to factorization accuracy.
    pub x: DVector<T>,
    /// `‖x‖₁` of the returned iterate.
    pub l1: f64,
    /// Iterations actually run.
    pub iterations: usize,
    /// Whether both gap criteria were met before `max_iters`.
    pub converged: bool,
    /// `ΦΦ*` needed a ridge to factor (rank-deficient rows).
    pub ridge_used: bool,
    /// `‖Φx − y‖₂` of the returned iterate.
    pub residual: f64,
}

/// `min ‖x‖₁ s.t. Φx = y` by ADMM with an exact affine projection step.
pub fn basis_pursuit<T>(
    phi: &DMatrix<T>,
    y: &DVector<T>,
    opts: &BasisPursuitOptions,
) -> Result<BasisPursuitSolution<T>>
where
    T: ComplexField<RealField = f64>,
{
    let (m, n) = (phi.nrows(), phi.ncols());
    if m == 0 || n == 0 || y.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "basis_pursuit: Φ is {m}×{n}, y has length {}",
            y.len()
        )));
    }
    if !(opts.rho > 0.0) || !(opts.tol > 0.0) || opts.max_iters == 0 {
        return Err(Error::InvalidParameter(format!(
            "basis_pursuit: need ρ > 0, tol > 0, max_iters ≥ 1 (got {}, {}, {})",
            opts.rho, opts.tol, opts.max_iters
        )));
    }
    if y.norm() == 0.0 {
        return Ok(BasisPursuitSolution {
            x: DVector::zeros(n),
            l1: 0.0,
            iterations: 0,
            converged: true,
            ridge_used: false,
            residual: 0.0,
        });
    }

    let phi_star = phi.adjoint();
    let gram = phi * &phi_star;
    let (chol, ridge_used) = match Cholesky::new(gram.clone()) {
        Some(c) => (c, false),
        None => {
            // Rank-deficient rows: regularize just enough to factor. The
            // projection residual it induces is of order ridge/‖ΦΦ*‖.
            let scale = gram
                .diagonal()
                .iter()
                .map(|d| d.clone().real())
                .fold(1.0f64, f64::max);
            let mut g = gram;
            for i in 0..m {
                g[(i, i)] += T::from_real(1e-12 * scale);
            }
            let c = Cholesky::new(g).ok_or_else(|| {
                Error::ConsistencyCheck(
                    "basis_pursuit: ΦΦ* failed to factor even with a ridge".into(),
                )
            })?;
            (c, true)
        }
    };
    let project = |v: DVector<T>| -> DVector<T> {
        let r = phi * &v - y;
        &v - &phi_star * chol.solve(&r)
    };

    let kappa = 1.0 / opts.rho;
    let mut z = DVector::<T>::zeros(n);
    let mut u = DVector::<T>::zeros(n);
    let mut iterations = opts.max_iters;
    let mut converged = false;
    for k in 0..opts.max_iters {
        let x = project(&z - &u);
        let w = &x + &u;
        let z_new = w.map(|wi| soft_threshold(wi, kappa));
        let dz = (&z_new - &z).norm();
        let primal = (&x - &z_new).norm();
        u += &x - &z_new;
        z = z_new;
        let scale = 1.0 + z.norm();
        if dz <= opts.tol * scale && primal <= opts.tol * scale {
            iterations = k + 1;
            converged = true;
            break;
        }
    }
    let x = project(z);
    let residual = (phi * &x - y).norm();
    let l1 = x.iter().map(|v| v.clone().modulus()).sum();
    Ok(BasisPursuitSolution {
        x,
        l1,
        iterations,
        converged,
        ridge_used,
        residual,
    })
}

/// Exact ℓ₁ minimizer of a small real instance, by enumeration of the
/// basic feasible solutions of the equivalent standard-form program.
#[derive(Clone, Debug)]
pub struct L1Exact {
    pub x: DVector<f64>,
    pub l1: f64,
    /// Invertible bases with nonnegative coefficients that were inspected.
    pub feasible_bases: u64,
}

/// Solve `min ‖x‖₁ s.t. Φx = y` exactly for real `Φ` with full row rank,
/// by checking every basis of `[Φ, −Φ]` (there are `C(2n, m)`; refuses to
/// start beyond `budget`). Intended as an oracle for [`basis_pursuit`] on
/// instances like `6×12`, where the count is `C(24, 6) = 134 596`.
/// Advances `subset` (sorted indices into `0..universe`) to its lexicographic
/// successor, returning `false` once the last subset has been visited.
fn advance_subset(subset: &mut [usize], universe: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] != i + universe - k {
            subset[i] += 1;
            for j in (i + 1)..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn l1_min_enumerate(phi: &DMatrix<f64>, y: &DVector<f64>, budget: u64) -> Result<L1Exact> {
    let (m, n) = (phi.nrows(), phi.ncols());
    if m == 0 || n == 0 || y.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "l1_min_enumerate: Φ is {m}×{n}, y has length {}",
            y.len()
        )));
    }
    if y.norm() == 0.0 {
        return Ok(L1Exact {
            x: DVector::zeros(n),
            l1: 0.0,
            feasible_bases: 0,
        });
    }
    let count = binomial(2 * n as u64, m as u64);
    if count > budget {
        return Err(Error::BudgetExceeded(format!(
            "l1_min_enumerate: C({}, {m}) = {count} bases exceed the budget of {budget}",
            2 * n
        )));
    }
    // Column j of [Φ, −Φ]: sign +1 for j < n, −1 for j ≥ n (index j mod n).
    let signed_column = |j: usize| -> DVector<f64> {
        if j < n {
            phi.column(j).into_owned()
        } else {
            -phi.column(j - n)
        }
    };
    let feas_tol = 1e-8 * (1.0 + y.norm());
    let mut best_obj = f64::INFINITY;
    let mut best_x: Option<DVector<f64>> = None;
    let mut feasible = 0u64;
    let mut basis: Vec<usize> = (0..m).collect();
    loop {
        // A basis holding both +φ_j and −φ_j is singular by construction.
        let has_complementary_pair = basis
            .iter()
            .any(|&j| j >= n && basis.binary_search(&(j - n)).is_ok());
        if has_complementary_pair {
            if !advance_subset(&mut basis, 2 * n) {
                break;
            }
            continue;
        }
        let cols: Vec<DVector<f64>> = basis.iter().map(|&j| signed_column(j)).collect();
        let b = DMatrix::from_columns(&cols);
        if let Some(coeffs) = b.clone().full_piv_lu().solve(y) {
            // Vertex feasibility: the solve must actually reproduce y (LU of a
            // near-singular basis can return garbage) and all basic variables
            // must be nonnegative (tiny negative values are roundoff on
            // degenerate vertices).
            if (&b * &coeffs - y).norm() <= feas_tol && coeffs.iter().all(|&c| c >= -1e-12) {
                feasible += 1;
                let obj: f64 = coeffs.iter().map(|c| c.max(0.0)).sum();
                if obj < best_obj - 1e-15 {
                    best_obj = obj;
                    let mut x = DVector::zeros(n);
                    for (pos, &j) in basis.iter().enumerate() {
                        let c = coeffs[pos].max(0.0);
                        if j < n {
                            x[j] += c;
                        } else {
                            x[j - n] -= c;
                        }
                    }
                    best_x = Some(x);
                }
            }
        }
        if !advance_subset(&mut basis, 2 * n) {
            break;
        }
    }
    match best_x {
        Some(x) => Ok(L1Exact {
            l1: x.iter().map(|v| v.abs()).sum(),
            x,
            feasible_bases: feasible,
        }),
        None => Err(Error::ConsistencyCheck(
            "l1_min_enumerate: no feasible basis (is Φ full row rank and y in its range?)".into(),
        )),
    }
}

/// One planted-signal recovery experiment.
#[derive(Clone, Debug, Serialize)]
pub struct RecoveryTrial {
    /// Converged and `‖x̂ − x₀‖₂ ≤ tol`.
    pub success: bool,
    pub converged: bool,
    /// `‖x̂ − x₀‖₂`.
    pub err_l2: f64,
    /// `‖Φx̂ − y‖₂` of the returned iterate.
    pub residual: f64,
    pub iterations: usize,
    /// Planted support (ascending).
    pub support: Vec<usize>,
}

fn planted_support(n: usize, s: usize, stream: &RngStream) -> Vec<usize> {
    let mut rng = stream.rng();
    let mut support = rand::seq::index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    support
}

fn gaussian_source() -> SamplerSpec {
    // The standardized power-exponential source at shape 2 is standard
    // normal, so no separate Gaussian sampler is needed.
    SamplerSpec::new(
        SourceKind::PowerExponential,
        AlphaShape::new(2.0).expect("2 is a valid shape"),
        true,
    )
}

fn run_trial<T>(
    phi: &DMatrix<T>,
    x0: &DVector<T>,
    support: Vec<usize>,
    opts: &BasisPursuitOptions,
    tol: f64,
) -> Result<RecoveryTrial>
where
    T: ComplexField<RealField = f64>,
{
    let y = phi * x0;
    let sol = basis_pursuit(phi, &y, opts)?;
    let err_l2 = (&sol.x - x0).norm();
    Ok(RecoveryTrial {
        success: sol.converged && err_l2 <= tol,
        converged: sol.converged,
        err_l2,
        residual: sol.residual,
        iterations: sol.iterations,
        support,
    })
}

/// Plant a unit-norm `s`-sparse signal (i.i.d. standard normal values on a
/// uniformly random support; complex operators use `(g₁ + ig₂)/√2`),
/// measure it with `op`, solve basis pursuit, and compare. Success demands
/// convergence *and* `‖x̂ − x₀‖₂ ≤ tol`.
pub fn recovery_trial(
    op: &AnyOp,
    s: usize,
    opts: &BasisPursuitOptions,
    tol: f64,
    stream: &RngStream,
) -> Result<RecoveryTrial> {
    let n = op.cols();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "recovery_trial: sparsity must satisfy 1 ≤ s ≤ n = {n}, got {s}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "recovery_trial: need tol > 0, got {tol}"
        )));
    }
    let support = planted_support(n, s, &stream.child("support"));
    let source = gaussian_source();
    match op {
        AnyOp::Real(op) => {
            let g = source.sample(s, &stream.child("values"));
            let mut x0 = DVector::<f64>::zeros(n);
            for (pos, &j) in support.iter().enumerate() {
                x0[j] = g[pos];
            }
            let norm = x0.norm();
            if norm > 0.0 {
                x0 /= norm;
            }
            run_trial(&op.to_dense(), &x0, support, opts, tol)
        }
        AnyOp::Complex(op) => {
            let g = source.sample(2 * s, &stream.child("values"));
            let mut x0 = DVector::<Complex<f64>>::zeros(n);
            for (pos, &j) in support.iter().enumerate() {
                x0[j] = Complex::new(g[2 * pos], g[2 * pos + 1]) / 2.0f64.sqrt();
            }
            let norm = x0.norm();
            if norm > 0.0 {
                x0.unscale_mut(norm);
            }
            run_trial(&op.to_dense(), &x0, support, opts, tol)
        }
    }
}

/// Success statistics of one `(m, s)` cell.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseCell {
    pub m: usize,
    pub s: usize,
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    /// 95% Wilson score interval.
    pub ci: (f64, f64),
}

/// Empirical recovery phase diagram over an `(m, s)` grid.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseDiagram {
    pub n: usize,
    pub m_grid: Vec<usize>,
    pub s_grid: Vec<usize>,
    /// Row-major over `m_grid × s_grid`.
    pub cells: Vec<PhaseCell>,
}

impl PhaseDiagram {
    /// The cell at `(m_grid[i], s_grid[j])`.
    pub fn cell(&self, i: usize, j: usize) -> &PhaseCell {
        &self.cells[i * self.s_grid.len() + j]
    }
}

/// Run `trials` planted recoveries per `(m, s)` cell; every trial draws a
/// fresh operator (stream keyed by `m, s`, trial index, independent of
/// thread count).
pub fn phase_transition(
    make_spec: impl Fn(usize) -> Result<EnsembleSpec>,
    m_grid: &[usize],
    s_grid: &[usize],
    trials: usize,
    opts: &BasisPursuitOptions,
    tol: f64,
    stream: &RngStream,
) -> Result<PhaseDiagram> {
    if m_grid.is_empty() || s_grid.is_empty() || trials == 0 {
        return Err(Error::InvalidParameter(
            "phase_transition: need nonempty grids and at least one trial".into(),
        ));
    }
    let mut n_ambient = None;
    let mut cells = Vec::with_capacity(m_grid.len() * s_grid.len());
    for &m in m_grid {
        let spec = make_spec(m)?;
        n_ambient.get_or_insert(spec.n);
        if n_ambient != Some(spec.n) {
            return Err(Error::InvalidParameter(
                "phase_transition: all m must share one ambient dimension".into(),
            ));
        }
        for &s in s_grid {
            let outcomes: Vec<Result<bool>> = indexed_map(trials, |i| {
                let cell = stream.child("cell").child(m).child(s).child("trial").child(i);
                let op = spec.draw(&cell.child("draw"))?;
                Ok(recovery_trial(&op, s, opts, tol, &cell.child("plant"))?.success)
            });
            let mut successes = 0u64;
            for o in outcomes {
                if o? {
                    successes += 1;
                }
            }
            cells.push(PhaseCell {
                m,
                s,
                successes,
                trials: trials as u64,
                p_hat: successes as f64 / trials as f64,
                ci: wilson_ci(successes, trials as u64, 1.96)?,
            });
        }
    }
    Ok(PhaseDiagram {
        n: n_ambient.unwrap_or(0),
        m_grid: m_grid.to_vec(),
        s_grid: s_grid.to_vec(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_real_and_complex() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-4.0, 1.5), -2.5);
        let w = Complex::new(3.0, 4.0); // modulus 5
        let got = soft_threshold(w, 1.0);
        let want = w * 0.8;
        assert!((got - want).norm() < 1e-15);
        assert_eq!(soft_threshold(Complex::new(0.3, 0.4), 1.0), Complex::ZERO);
    }

    #[test]
    fn zero_rhs_short_circuits() {
        let phi = DMatrix::<f64>::identity(3, 3);
        let sol = basis_pursuit(&phi, &DVector::zeros(3), &BasisPursuitOptions::default()).unwrap();
        assert_eq!(sol.x, DVector::zeros(3));
        assert_eq!(sol.iterations, 0);
        assert!(sol.converged);
        assert_eq!(sol.residual, 0.0);
    }

    #[test]
    fn default_options() {
        let d = BasisPursuitOptions::default();
        assert_eq!(d.rho, 1.0);
        assert_eq!(d.max_iters, 5000);
        assert_eq!(d.tol, 1e-8);
    }

    #[test]
    fn dimension_and_parameter_guards() {
        let phi = DMatrix::<f64>::identity(3, 3);
        let y = DVector::from_vec(vec![1.0, 2.0]);
        assert!(basis_pursuit(&phi, &y, &BasisPursuitOptions::default()).is_err());
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let bad = BasisPursuitOptions {
            rho: 0.0,
            ..Default::default()
        };
        assert!(basis_pursuit(&phi, &y, &bad).is_err());
    }
}
