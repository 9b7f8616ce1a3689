//! One runner per subcommand. Each takes a fully resolved configuration
//! and the master seed, performs the experiment on the child RNG stream
//! named after the subcommand, and returns the artifact files as
//! `(name, content)` pairs; the caller is responsible for atomic emission.

use crate::config::*;
use anyhow::{anyhow, bail, Context, Result};
use chaoslab::chaining::{
    closed_form_gamma, dudley_gamma, sample_complexity, CoverKind, CoverModel,
};
use chaoslab::chaos::{
    chaos_samples, deviation_bound_suite, empirical_tail, hw_tail_curve, uniform_chaos_tail,
    uniform_square_tail, GammaSource, Phi2,
};
use chaoslab::norms::{
    dual_pair_norm_upper, exact_norms, lp_l2_norm, mixed_norm_upper, spectral_norm,
};
use chaoslab::par::mean;
use chaoslab::recovery::{phase_transition, recovery_trial, BasisPursuitOptions};
use chaoslab::report::{phase_table, scaling_table, tail_curve_table, to_json_pretty, Cell, Table};
use chaoslab::rip::{delta_s_exact, m_star_scaling, wilson_ci, DeltaProbe, RipSummary, ScanConfig};
use chaoslab::samplers::{
    estimate_psi_alpha_norm, population_abs_moment, weibull_population_psi_alpha, AlphaShape,
    SamplerSpec, SourceKind,
};
use chaoslab::stream::RngStream;
use chaoslab::structured::{build_vx_circulant, read_dense_csv, AnyOp, EnsembleSpec,
    PartialCirculantSpec};
use nalgebra::{DMatrix, DVector};
use serde_json::json;
use std::fs::File;
use std::io::BufReader;

/// Artifact files of one run.
pub type Artifacts = Vec<(String, String)>;

fn shape(alpha: f64) -> Result<AlphaShape> {
    Ok(AlphaShape::new(alpha)?)
}

fn sampler(kind: &str, alpha: f64, standardized: bool) -> Result<SamplerSpec> {
    Ok(SamplerSpec::new(
        parse_source_kind(kind)?,
        shape(alpha)?,
        standardized,
    ))
}

/// Linear grid of `points` values from `lo` to `hi` inclusive.
fn linear_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        bail!("need at least 2 grid points, got {points}");
    }
    if !(hi > lo && lo >= 0.0) {
        bail!("need 0 ≤ lo < hi, got [{lo}, {hi}]");
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|i| lo + step * i as f64).collect())
}

fn read_matrix(path: &str) -> Result<DMatrix<num_complex::Complex<f64>>> {
    let file = File::open(path).with_context(|| format!("opening matrix file {path:?}"))?;
    Ok(read_dense_csv(BufReader::new(file))?)
}

fn read_real_matrix(path: &str) -> Result<DMatrix<f64>> {
    let a = read_matrix(path)?;
    if a.iter().any(|z| z.im != 0.0) {
        bail!("matrix file {path:?} has nonzero imaginary entries; a real matrix is required");
    }
    Ok(a.map(|z| z.re))
}

/// Sorted `s`-element support drawn without replacement from `0..n`.
fn draw_support(n: usize, s: usize, stream: &RngStream) -> Vec<usize> {
    let mut support = rand::seq::index::sample(&mut stream.rng(), n, s).into_vec();
    support.sort_unstable();
    support
}

/// Unit-norm vector supported on `s` random coordinates with standard
/// Gaussian values.
fn sparse_unit_vector(n: usize, s: usize, stream: &RngStream) -> Result<DVector<f64>> {
    let support = draw_support(n, s, &stream.child("support"));
    let gauss = SamplerSpec::new(SourceKind::PowerExponential, AlphaShape::new(2.0)?, true);
    let values = gauss.sample(s, &stream.child("values"));
    let mut x = DVector::zeros(n);
    for (&j, &v) in support.iter().zip(&values) {
        x[j] = v;
    }
    let norm = x.norm();
    if norm == 0.0 {
        bail!("degenerate sparse draw (all-zero values)");
    }
    Ok(x / norm)
}

fn ensemble_spec(ensemble: &str, kind: &str, alpha: f64, m: usize, n: usize) -> Result<EnsembleSpec> {
    let sp = sampler(kind, alpha, true)?;
    Ok(match ensemble {
        "identity" => EnsembleSpec::identity(n)?,
        "dense" => EnsembleSpec::dense(m, n, sp)?,
        "circulant" => EnsembleSpec::circulant(m, n, sp)?,
        "gabor" => EnsembleSpec::gabor(m, sp)?,
        other => bail!(
            "unknown ensemble {other:?} (expected \"identity\", \"dense\", \"circulant\", or \"gabor\")"
        ),
    })
}

pub fn run_sample(cfg: &SampleCfg, seed: u64) -> Result<Artifacts> {
    let sh = shape(cfg.alpha)?;
    let spec = sampler(&cfg.kind, cfg.alpha, cfg.standardized)?;
    if cfg.p_grid.is_empty() {
        bail!("sample: empty p_grid");
    }
    let stream = RngStream::new(seed).child("sample");
    let xs = spec.sample(cfg.n, &stream.child("draw"));
    if xs.is_empty() {
        bail!("sample: n must be positive");
    }

    let sd = spec.population_sd();
    let mut table = Table::new(&["p", "empirical", "population", "ratio"])?;
    for &p in &cfg.p_grid {
        if !(p > 0.0) {
            bail!("sample: moment orders must be positive, got {p}");
        }
        let pows: Vec<f64> = xs.iter().map(|x| x.abs().powf(p)).collect();
        let empirical = mean(&pows);
        let raw = population_abs_moment(spec.kind, sh, p);
        let population = if cfg.standardized { raw / sd.powf(p) } else { raw };
        table.push_row(vec![
            p.into(),
            empirical.into(),
            population.into(),
            (empirical / population).into(),
        ])?;
    }

    let psi = estimate_psi_alpha_norm(&xs, sh)?;
    let psi_population = match spec.kind {
        SourceKind::SymmetricWeibull => {
            let raw = weibull_population_psi_alpha(sh);
            Some(if cfg.standardized { raw / sd } else { raw })
        }
        SourceKind::PowerExponential => None,
    };
    let psi_json = to_json_pretty(&json!({
        "alpha": cfg.alpha,
        "kind": cfg.kind,
        "standardized": cfg.standardized,
        "n": cfg.n,
        "empirical": psi.value,
        "bisection_iterations": psi.iterations,
        "population": psi_population,
    }))?;

    Ok(vec![
        ("moments.csv".into(), table.to_csv()),
        ("psi.json".into(), psi_json),
    ])
}

pub fn run_norms(cfg: &NormsCfg, _seed: u64) -> Result<Artifacts> {
    if cfg.matrix.is_empty() {
        bail!("norms: a matrix file is required (config key `norms.matrix` or flag --matrix)");
    }
    let al = shape(cfg.alpha)?;
    let a = read_matrix(&cfg.matrix)?;
    let exact = exact_norms(&a);
    let spectral = spectral_norm(&a);
    let astar = al.conjugate();
    let (lp_l2, lp_label) = if al.alpha() == 1.0 {
        // `α* = ∞`: the mixed norm degenerates to the max row length.
        (exact.max_row_l2, "exact".to_string())
    } else {
        (lp_l2_norm(&a, astar)?, "exact".to_string())
    };
    let (two_to_astar, two_label) = if al.alpha() == 1.0 {
        (exact.max_row_l2, "exact".to_string())
    } else {
        (mixed_norm_upper(&a, astar)?, "upper".to_string())
    };
    let alpha_to_astar = dual_pair_norm_upper(&a, al)?;

    let mut table = Table::new(&["norm", "value", "method"])?;
    let spectral_method = if spectral.converged {
        "power-iteration"
    } else {
        "power-iteration-uncertified"
    };
    let rows: Vec<(&str, f64, &str)> = vec![
        ("frobenius", exact.frobenius, "exact"),
        ("max_abs_entry", exact.max_abs_entry, "exact"),
        ("max_row_l2", exact.max_row_l2, "exact"),
        ("spectral", spectral.value, spectral_method),
        ("lp_l2_alpha_star", lp_l2, &lp_label),
        ("two_to_alpha_star", two_to_astar, &two_label),
        ("alpha_to_alpha_star", alpha_to_astar, "upper"),
    ];
    for (name, value, method) in rows {
        table.push_row(vec![name.into(), value.into(), method.into()])?;
    }
    let summary = to_json_pretty(&json!({
        "rows": a.nrows(),
        "cols": a.ncols(),
        "alpha": cfg.alpha,
        "alpha_star": if astar.is_finite() { Some(astar) } else { None },
        "frobenius": exact.frobenius,
        "spectral": spectral.value,
        "lp_l2_alpha_star": lp_l2,
        "two_to_alpha_star": two_to_astar,
        "alpha_to_alpha_star": alpha_to_astar,
    }))?;
    Ok(vec![
        ("norms.csv".into(), table.to_csv()),
        ("norms.json".into(), summary),
    ])
}

/// Build the test matrix for `chaos-tails`.
fn chaos_matrix(cfg: &ChaosTailsCfg, stream: &RngStream) -> Result<DMatrix<f64>> {
    if cfg.matrix != "file" && cfg.n == 0 {
        bail!("chaos-tails: n must be positive");
    }
    let gauss = SamplerSpec::new(SourceKind::PowerExponential, AlphaShape::new(2.0)?, true);
    Ok(match cfg.matrix.as_str() {
        "identity" => DMatrix::identity(cfg.n, cfg.n),
        "rank-one" => {
            let u = DVector::from_vec(gauss.sample(cfg.n, &stream.child("matrix")));
            let u = &u / u.norm();
            &u * u.transpose()
        }
        "random-symmetric" => {
            let g = DMatrix::from_vec(cfg.n, cfg.n, gauss.sample(cfg.n * cfg.n, &stream.child("matrix")));
            (&g + g.transpose()).scale(0.5)
        }
        "file" => read_real_matrix(&cfg.matrix_file)?,
        other => bail!(
            "unknown matrix {other:?} (expected \"identity\", \"rank-one\", \"random-symmetric\", or \"file\")"
        ),
    })
}

pub fn run_chaos_tails(cfg: &ChaosTailsCfg, seed: u64) -> Result<Artifacts> {
    let sh = shape(cfg.alpha)?;
    let stream = RngStream::new(seed).child("chaos-tails");
    let a = chaos_matrix(cfg, &stream)?;
    let source = sampler(&cfg.kind, cfg.alpha, true)?;
    let set = chaos_samples(&a, source, cfg.n_samples, &stream.child("mc"))?;

    let max_abs = set.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let t_hi = cfg.t_max.unwrap_or(max_abs);
    let t_lo = cfg.t_min.unwrap_or(t_hi / cfg.t_points.max(2) as f64);
    let grid = linear_grid(t_lo, t_hi, cfg.t_points).context("chaos-tails grid")?;

    let phi2 = Phi2::new(&a, sh)?;
    let bound = hw_tail_curve(&phi2, &grid, cfg.c1, cfg.c2)?;
    let curve = empirical_tail(&set, &grid)?.with_bound(bound)?;

    let table = tail_curve_table(&curve)?;
    let summary = to_json_pretty(&json!({
        "alpha": cfg.alpha,
        "matrix": cfg.matrix,
        "n": a.nrows(),
        "n_samples": cfg.n_samples,
        "c1": cfg.c1,
        "c2": cfg.c2,
        "phi2_norms": phi2,
    }))?;
    Ok(vec![
        ("tails.csv".into(), table.to_csv()),
        ("phi2.json".into(), summary),
    ])
}

/// Build the matrix family for `hw-bound`.
fn hw_family(cfg: &HwBoundCfg, stream: &RngStream) -> Result<Vec<DMatrix<f64>>> {
    if cfg.count == 0 {
        bail!("hw-bound: family count must be positive");
    }
    let gauss = SamplerSpec::new(SourceKind::PowerExponential, AlphaShape::new(2.0)?, true);
    match cfg.family.as_str() {
        "random-symmetric" => {
            if cfg.n == 0 {
                bail!("hw-bound: n must be positive");
            }
            let scale = 1.0 / (cfg.n as f64).sqrt();
            Ok((0..cfg.count)
                .map(|k| {
                    let g = DMatrix::from_vec(
                        cfg.n,
                        cfg.n,
                        gauss.sample(cfg.n * cfg.n, &stream.child("family").child(k)),
                    );
                    (&g + g.transpose()).scale(0.5 * scale)
                })
                .collect())
        }
        "vx-circulant" => {
            if cfg.m == 0 || cfg.m > cfg.n || cfg.s == 0 || cfg.s > cfg.n {
                bail!(
                    "hw-bound: need 1 ≤ m ≤ n and 1 ≤ s ≤ n, got m = {}, s = {}, n = {}",
                    cfg.m,
                    cfg.s,
                    cfg.n
                );
            }
            let omega = draw_support(cfg.n, cfg.m, &stream.child("omega"));
            let cspec = PartialCirculantSpec::new(cfg.n, omega)?;
            (0..cfg.count)
                .map(|k| {
                    let x = sparse_unit_vector(cfg.n, cfg.s, &stream.child("x").child(k))?;
                    Ok(build_vx_circulant(&x, &cspec)?)
                })
                .collect()
        }
        other => bail!(
            "unknown family {other:?} (expected \"random-symmetric\" or \"vx-circulant\")"
        ),
    }
}

pub fn run_hw_bound(cfg: &HwBoundCfg, seed: u64) -> Result<Artifacts> {
    let sh = shape(cfg.alpha)?;
    let stream = RngStream::new(seed).child("hw-bound");
    let family = hw_family(cfg, &stream)?;
    let gamma_source = match cfg.gamma.as_str() {
        "dudley-empirical" => GammaSource::DudleyEmpirical,
        "closed-form" => GammaSource::ClosedForm {
            s: cfg.s,
            n: cfg.n,
            m: cfg.m,
            c: cfg.c_gamma,
        },
        other => bail!(
            "unknown gamma source {other:?} (expected \"dudley-empirical\" or \"closed-form\")"
        ),
    };
    let report = deviation_bound_suite(
        &family,
        sh,
        &gamma_source,
        cfg.n_draws,
        cfg.c_alpha,
        cfg.c1_alpha,
        &stream.child("suite"),
    )?;

    let chaos_scale = report
        .t_a
        .max(report.e_sup_a_eta_astar.mean)
        .max(report.m_2_2);
    let square_scale = report.u2.max(report.u3).max(report.m_2_2 * report.m_2_2);
    if !(chaos_scale > 0.0 && square_scale > 0.0) {
        bail!("hw-bound: degenerate family (all bound scales vanish)");
    }
    let make_grid = |scale: f64| -> Result<Vec<f64>> {
        let hi = cfg.t_max_factor * scale;
        linear_grid(hi / cfg.t_points.max(2) as f64, hi, cfg.t_points)
    };
    let chaos_grid = make_grid(chaos_scale).context("hw-bound chaos grid")?;
    let square_grid = make_grid(square_scale).context("hw-bound square grid")?;
    let chaos_bound = uniform_chaos_tail(&report, &chaos_grid);
    let square_bound = uniform_square_tail(&report, &square_grid);

    let mut chaos_table = Table::new(&["t", "bound"])?;
    for (t, b) in chaos_grid.iter().zip(&chaos_bound) {
        chaos_table.push_row(vec![(*t).into(), (*b).into()])?;
    }
    let mut square_table = Table::new(&["t", "bound"])?;
    for (t, b) in square_grid.iter().zip(&square_bound) {
        square_table.push_row(vec![(*t).into(), (*b).into()])?;
    }
    Ok(vec![
        ("bound.json".into(), to_json_pretty(&report)?),
        ("chaos_tail.csv".into(), chaos_table.to_csv()),
        ("square_tail.csv".into(), square_table.to_csv()),
    ])
}

pub fn run_gamma(cfg: &GammaCfg, _seed: u64) -> Result<Artifacts> {
    let sh = shape(cfg.alpha)?;
    if cfg.s_list.is_empty() {
        bail!("gamma: empty s_list");
    }
    let mut table = Table::new(&["s", "f1", "f2", "m_required", "closed_form", "dudley"])?;
    let mut rows = Vec::new();
    for &s in &cfg.s_list {
        let sc = sample_complexity(sh, s, cfg.n, cfg.delta, cfg.c1)?;
        let closed = closed_form_gamma(sh, s, cfg.n, cfg.m, cfg.c_closed);
        let kind = match cfg.cover.as_str() {
            "circulant" => CoverKind::CirculantFamily {
                s,
                n: cfg.n,
                m: cfg.m,
            },
            "gabor" => CoverKind::GaborFamily { s, m: cfg.m },
            "sparse-ball" => CoverKind::SparseBall { s, n: cfg.n },
            "euclidean" => CoverKind::EuclideanBall { n: cfg.n },
            other => bail!(
                "unknown cover {other:?} (expected \"circulant\", \"gabor\", \"sparse-ball\", or \"euclidean\")"
            ),
        };
        let dudley = dudley_gamma(&CoverModel::new(kind), sh, cfg.u_max)?;
        table.push_row(vec![
            s.into(),
            sc.f1.into(),
            sc.f2.into(),
            sc.m_required.into(),
            closed.into(),
            dudley.into(),
        ])?;
        rows.push(json!({
            "s": s,
            "f1": sc.f1,
            "f2": sc.f2,
            "m_required": sc.m_required,
            "closed_form": closed,
            "dudley": dudley,
        }));
    }
    let summary = to_json_pretty(&json!({
        "alpha": cfg.alpha,
        "n": cfg.n,
        "m": cfg.m,
        "delta": cfg.delta,
        "cover": cfg.cover,
        "u_max": cfg.u_max,
        "rows": rows,
    }))?;
    Ok(vec![
        ("gamma.csv".into(), table.to_csv()),
        ("gamma.json".into(), summary),
    ])
}

fn delta_rows(op: &AnyOp, s: usize, budget: u64) -> Result<RipSummary> {
    Ok(match op {
        AnyOp::Real(op) => delta_s_exact(&op.to_dense(), s, budget)?.summary(),
        AnyOp::Complex(op) => delta_s_exact(&op.to_dense(), s, budget)?.summary(),
    })
}

pub fn run_rip_exact(cfg: &RipExactCfg, seed: u64) -> Result<Artifacts> {
    if cfg.s_list.is_empty() || cfg.draws == 0 {
        bail!("rip-exact: need a nonempty s_list and at least one draw");
    }
    let spec = ensemble_spec(&cfg.ensemble, &cfg.kind, cfg.alpha, cfg.m, cfg.n)?;
    let stream = RngStream::new(seed).child("rip-exact");
    let mut table = Table::new(&["draw", "s", "delta", "lambda", "supports_checked", "support"])?;
    let mut rows = Vec::new();
    for d in 0..cfg.draws {
        let op = spec.draw(&stream.child("draw").child(d))?;
        for &s in &cfg.s_list {
            let summary = delta_rows(&op, s, cfg.budget)?;
            let support = summary
                .support
                .iter()
                .map(|j| j.to_string())
                .collect::<Vec<_>>()
                .join(";");
            table.push_row(vec![
                d.into(),
                s.into(),
                summary.delta.into(),
                summary.lambda.into(),
                summary.supports_checked.into(),
                Cell::Text(support),
            ])?;
            rows.push(json!({
                "draw": d,
                "s": s,
                "delta": summary.delta,
                "lambda": summary.lambda,
                "supports_checked": summary.supports_checked,
                "support": summary.support,
            }));
        }
    }
    let summary = to_json_pretty(&json!({
        "ensemble": cfg.ensemble,
        "m": spec.m,
        "n": spec.n,
        "rows": rows,
    }))?;
    Ok(vec![
        ("rip.csv".into(), table.to_csv()),
        ("rip.json".into(), summary),
    ])
}

pub fn run_rip_scan(cfg: &RipScanCfg, seed: u64) -> Result<Artifacts> {
    let sh = shape(cfg.alpha)?;
    let sp = sampler(&cfg.kind, cfg.alpha, true)?;
    let make_spec = |m: usize| -> chaoslab::Result<EnsembleSpec> {
        match cfg.ensemble.as_str() {
            "dense" => EnsembleSpec::dense(m, cfg.n, sp.clone()),
            "circulant" => EnsembleSpec::circulant(m, cfg.n, sp.clone()),
            other => Err(chaoslab::Error::InvalidParameter(format!(
                "rip-scan ensemble {other:?} (expected \"dense\" or \"circulant\")"
            ))),
        }
    };
    let (probe, probe_label) = match cfg.probe.as_str() {
        "exact" => (
            DeltaProbe::Exact { budget: cfg.budget },
            format!("exact(budget={})", cfg.budget),
        ),
        "mc-lower" => (
            DeltaProbe::McLower {
                n_supports: cfg.n_supports,
            },
            format!("mc-lower(n_supports={})", cfg.n_supports),
        ),
        other => bail!("unknown probe {other:?} (expected \"exact\" or \"mc-lower\")"),
    };
    let base = ScanConfig {
        s: 0, // overridden per row
        delta_target: cfg.delta,
        success_target: cfg.success_target,
        n_trials: cfg.n_trials,
        probes_per_m: cfg.probes_per_m,
        m_lo: cfg.m_lo,
        m_hi: cfg.m_hi,
    };
    let stream = RngStream::new(seed).child("rip-scan");
    let scan = m_star_scaling(
        make_spec,
        sh,
        cfg.n,
        &cfg.s_list,
        &base,
        probe,
        &stream.child("scan"),
    )?;

    let mut probes = Table::new(&["s", "m", "probe", "p_hat", "meets"])?;
    for row in &scan.rows {
        for p in &row.probes {
            for (idx, &p_hat) in p.p_hats.iter().enumerate() {
                probes.push_row(vec![
                    row.s.into(),
                    p.m.into(),
                    idx.into(),
                    p_hat.into(),
                    Cell::Text(p.meets.to_string()),
                ])?;
            }
        }
    }
    let summary = to_json_pretty(&json!({
        "probe_mode": probe_label,
        "delta_is_lower_bound": cfg.probe == "mc-lower",
        "scan": scan,
    }))?;
    Ok(vec![
        ("scan.csv".into(), scaling_table(&scan)?.to_csv()),
        ("probes.csv".into(), probes.to_csv()),
        ("scan.json".into(), summary),
    ])
}

fn bp_options(rho: f64, max_iters: usize, tol: f64) -> BasisPursuitOptions {
    BasisPursuitOptions {
        rho,
        max_iters,
        tol,
    }
}

pub fn run_recover(cfg: &RecoverCfg, seed: u64) -> Result<Artifacts> {
    if cfg.trials == 0 {
        bail!("recover: need at least one trial");
    }
    let spec = ensemble_spec(&cfg.ensemble, &cfg.kind, cfg.alpha, cfg.m, cfg.n)?;
    let opts = bp_options(cfg.rho, cfg.max_iters, cfg.tol);
    let stream = RngStream::new(seed).child("recover");
    let mut table = Table::new(&[
        "trial",
        "success",
        "converged",
        "iterations",
        "err_l2",
        "residual",
    ])?;
    let mut successes = 0u64;
    for i in 0..cfg.trials {
        let trial_stream = stream.child("trial").child(i);
        let op = spec.draw(&trial_stream.child("draw"))?;
        let tr = recovery_trial(&op, cfg.s, &opts, cfg.success_tol, &trial_stream.child("run"))?;
        successes += u64::from(tr.success);
        table.push_row(vec![
            i.into(),
            Cell::Text(tr.success.to_string()),
            Cell::Text(tr.converged.to_string()),
            tr.iterations.into(),
            tr.err_l2.into(),
            tr.residual.into(),
        ])?;
    }
    let ci = wilson_ci(successes, cfg.trials as u64, 1.96)?;
    let summary = to_json_pretty(&json!({
        "ensemble": cfg.ensemble,
        "m": spec.m,
        "n": spec.n,
        "s": cfg.s,
        "trials": cfg.trials,
        "successes": successes,
        "p_hat": successes as f64 / cfg.trials as f64,
        "ci_lo": ci.0,
        "ci_hi": ci.1,
    }))?;
    Ok(vec![
        ("trials.csv".into(), table.to_csv()),
        ("summary.json".into(), summary),
    ])
}

pub fn run_phase(cfg: &PhaseCfg, seed: u64) -> Result<Artifacts> {
    let sp = sampler(&cfg.kind, cfg.alpha, true)?;
    let make_spec = |m: usize| -> chaoslab::Result<EnsembleSpec> {
        match cfg.ensemble.as_str() {
            "dense" => EnsembleSpec::dense(m, cfg.n, sp.clone()),
            "circulant" => EnsembleSpec::circulant(m, cfg.n, sp.clone()),
            other => Err(chaoslab::Error::InvalidParameter(format!(
                "phase ensemble {other:?} (expected \"dense\" or \"circulant\")"
            ))),
        }
    };
    let opts = bp_options(cfg.rho, cfg.max_iters, cfg.tol);
    let stream = RngStream::new(seed).child("phase");
    let diagram = phase_transition(
        make_spec,
        &cfg.m_grid,
        &cfg.s_grid,
        cfg.trials,
        &opts,
        cfg.success_tol,
        &stream.child("grid"),
    )?;
    Ok(vec![
        ("phase.csv".into(), phase_table(&diagram)?.to_csv()),
        ("diagram.json".into(), to_json_pretty(&diagram)?),
    ])
}

/// Dispatch one resolved subcommand; `name` must match the manifest label.
pub fn run_subcommand(name: &str, cfg: &ResolvedRun, seed: u64) -> Result<Artifacts> {
    match (name, cfg) {
        ("sample", ResolvedRun::Sample(c)) => run_sample(c, seed),
        ("norms", ResolvedRun::Norms(c)) => run_norms(c, seed),
        ("chaos-tails", ResolvedRun::ChaosTails(c)) => run_chaos_tails(c, seed),
        ("hw-bound", ResolvedRun::HwBound(c)) => run_hw_bound(c, seed),
        ("gamma", ResolvedRun::Gamma(c)) => run_gamma(c, seed),
        ("rip-exact", ResolvedRun::RipExact(c)) => run_rip_exact(c, seed),
        ("rip-scan", ResolvedRun::RipScan(c)) => run_rip_scan(c, seed),
        ("recover", ResolvedRun::Recover(c)) => run_recover(c, seed),
        ("phase", ResolvedRun::Phase(c)) => run_phase(c, seed),
        _ => Err(anyhow!("subcommand/config mismatch for {name:?}")),
    }
}

/// A resolved subcommand configuration, ready to run and to echo into the
/// manifest.
#[derive(Clone, Debug, serde::Serialize)]
#[serde(untagged)]
pub enum ResolvedRun {
    Sample(SampleCfg),
    Norms(NormsCfg),
    ChaosTails(ChaosTailsCfg),
    HwBound(HwBoundCfg),
    Gamma(GammaCfg),
    RipExact(RipExactCfg),
    RipScan(RipScanCfg),
    Recover(RecoverCfg),
    Phase(PhaseCfg),
}
