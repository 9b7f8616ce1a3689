//! `chaoslab` — reproducible experiment driver.
//!
//! Every subcommand resolves its parameters with the precedence
//! flag > config file > built-in default (the output directory additionally
//! honors `CHAOSLAB_OUT` between the flag and the file), runs the
//! experiment deterministically from `--seed`, and writes its artifacts
//! plus a content-hashed manifest into `<out>/<subcommand>/`. Outputs are
//! byte-identical for a fixed seed regardless of `--threads`.

mod commands;
mod config;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use commands::ResolvedRun;
use config::*;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "chaoslab", version, about = "Chaos, chaining, and restricted isometry experiments")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for all randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; artifacts land in `<out>/<subcommand>/`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Scalar-source moment tables and ψ_α diagnostics.
    Sample(SampleArgs),
    /// Norm report for a dense matrix CSV.
    Norms(NormsArgs),
    /// Empirical chaos tails against the φ₂ exponent bound.
    #[command(name = "chaos-tails")]
    ChaosTails(ChaosTailsArgs),
    /// Uniform deviation-bound suite over a matrix family.
    #[command(name = "hw-bound")]
    HwBound(HwBoundArgs),
    /// Dudley integrals, closed-form γ bounds, and f₁/f₂ tables.
    Gamma(GammaArgs),
    /// Exact restricted isometry constants of an ensemble draw.
    #[command(name = "rip-exact")]
    RipExact(RipExactArgs),
    /// Minimal-measurement scaling scan m*(s) against f₁(s, n).
    #[command(name = "rip-scan")]
    RipScan(RipScanArgs),
    /// Planted-signal basis-pursuit recovery trials.
    Recover(RecoverArgs),
    /// Recovery phase diagram over an (m, s) grid.
    Phase(PhaseArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Sample(_) => "sample",
            Cmd::Norms(_) => "norms",
            Cmd::ChaosTails(_) => "chaos-tails",
            Cmd::HwBound(_) => "hw-bound",
            Cmd::Gamma(_) => "gamma",
            Cmd::RipExact(_) => "rip-exact",
            Cmd::RipScan(_) => "rip-scan",
            Cmd::Recover(_) => "recover",
            Cmd::Phase(_) => "phase",
        }
    }
}

macro_rules! overlay {
    ($args:expr, $cfg:expr, $($field:ident),+ $(,)?) => {
        $(if let Some(v) = $args.$field.clone() {
            $cfg.$field = v;
        })+
    };
}

#[derive(Args)]
struct SampleArgs {
    /// Source family: "weibull" or "power-exponential".
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    standardized: Option<bool>,
    /// Number of samples.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated moment orders.
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
}

impl SampleArgs {
    fn resolve(&self, file: Option<SampleCfg>) -> SampleCfg {
        let mut cfg = file.unwrap_or_default();
        overlay!(self, cfg, kind, alpha, standardized, n, p_grid);
        cfg
    }
}

#[derive(Args)]
struct NormsArgs {
    /// Matrix CSV path.
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
}

impl NormsArgs {
    fn resolve(&self, file: Option<NormsCfg>) -> NormsCfg {
        let mut cfg = file.unwrap_or_default();
        overlay!(self, cfg, matrix, alpha);
        cfg
    }
}

#[derive(Args)]
struct ChaosTailsArgs {
    /// "identity", "rank-one", "random-symmetric", or "file".
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// CSV path when --matrix file.
    #[arg(long)]
    matrix_file: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    t_points: Option<usize>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
}

impl ChaosTailsArgs {
    fn resolve(&self, file: Option<ChaosTailsCfg>) -> ChaosTailsCfg {
        let mut cfg = file.unwrap_or_default();
        overlay!(
            self, cfg, matrix, n, matrix_file, kind, alpha, n_samples, t_points, c1, c2
        );
        if self.t_min.is_some() {
            cfg.t_min = self.t_min;
        }
        if self.t_max.is_some() {
            cfg.t_max = self.t_max;
        }
        cfg
    }
}

#[derive(Args)]
struct HwBoundArgs {
    /// "random-symmetric" or "vx-circulant".
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// "dudley-empirical" or "closed-form".
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    c_gamma: Option<f64>,
    #[arg(long)]
    n_draws: Option<usize>,
    #[arg(long)]
    c_alpha: Option<f64>,
    #[arg(long)]
    c1_alpha: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    #[arg(long)]
    t_max_factor: Option<f64>,
}

impl HwBoundArgs {
    fn resolve(&self, file: Option<HwBoundCfg>) -> HwBoundCfg {
        let mut cfg = file.unwrap_or_default();
        overlay!(
            self, cfg, family, n, m, s, count, alpha, gamma, c_gamma, n_draws, c_alpha, c1_alpha,
            t_points, t_max_factor
        );
        cfg
    }
}

#[derive(Args)]
struct GammaArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    s_list: Option<Vec<usize>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c_closed: Option<f64>,
    /// "circulant", "gabor", "sparse-ball", or "euclidean".
    #[arg(long)]
    cover: Option<String>,
    #[arg(long)]
    u_max: Option<f64>,
}

impl GammaArgs {
    fn resolve(&self, file: Option<GammaCfg>) -> GammaCfg {
        let mut cfg = file.unwrap_or_default();
        overlay!(self, cfg, alpha, s_list, n, m, delta, c1, c_closed, cover, u_max);
        cfg
    }
}

#[derive(Args)]
struct RipExactArgs {
    /// "identity", "dense", "circulant", or "gabor".
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    s_list: Option<Vec<usize>>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    draws: Option<usize>,
}

impl RipExactArgs {
    fn resolve(&self, file: Option<RipExactCfg>) -> RipExactCfg {
        let mut cfg = file.unwrap_or_default();
        overlay!(self, cfg, ensemble, kind, alpha, m, n, s_list, budget, draws);
        cfg
    }
}

#[derive(Args)]
struct RipScanArgs {
    /// "dense" or "circulant".
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    s_list: Option<Vec<usize>>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    success_target: Option<f64>,
    #[arg(long)]
    n_trials: Option<usize>,
    #[arg(long)]
    probes_per_m: Option<usize>,
    #[arg(long)]
    m_lo: Option<usize>,
    #[arg(long)]
    m_hi: Option<usize>,
    /// "exact" or "mc-lower".
    #[arg(long)]
    probe: Option<String>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    n_supports: Option<usize>,
}

impl RipScanArgs {
    fn resolve(&self, file: Option<RipScanCfg>) -> RipScanCfg {
        let mut cfg = file.unwrap_or_default();
        overlay!(
            self, cfg, ensemble, kind, alpha, n, s_list, delta, success_target, n_trials,
            probes_per_m, m_lo, m_hi, probe, budget, n_supports
        );
        cfg
    }
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    success_tol: Option<f64>,
}

impl RecoverArgs {
    fn resolve(&self, file: Option<RecoverCfg>) -> RecoverCfg {
        let mut cfg = file.unwrap_or_default();
        overlay!(
            self, cfg, ensemble, kind, alpha, m, n, s, trials, rho, max_iters, tol, success_tol
        );
        cfg
    }
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    m_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    s_grid: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    success_tol: Option<f64>,
}

impl PhaseArgs {
    fn resolve(&self, file: Option<PhaseCfg>) -> PhaseCfg {
        let mut cfg = file.unwrap_or_default();
        overlay!(
            self, cfg, ensemble, kind, alpha, n, m_grid, s_grid, trials, rho, max_iters, tol,
            success_tol
        );
        cfg
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();

    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            FileConfig::from_toml(&text)?
        }
        None => FileConfig::default(),
    };

    let seed = cli.seed.or(file.seed).unwrap_or(0);
    if let Some(threads) = cli.threads.or(file.threads) {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let out_base = cli
        .out
        .clone()
        .or_else(|| std::env::var_os("CHAOSLAB_OUT").map(PathBuf::from))
        .or(file.out.clone())
        .unwrap_or_else(|| PathBuf::from("chaoslab-out"));

    let name = cli.cmd.name();
    let resolved = match &cli.cmd {
        Cmd::Sample(a) => ResolvedRun::Sample(a.resolve(file.sample)),
        Cmd::Norms(a) => ResolvedRun::Norms(a.resolve(file.norms)),
        Cmd::ChaosTails(a) => ResolvedRun::ChaosTails(a.resolve(file.chaos_tails)),
        Cmd::HwBound(a) => ResolvedRun::HwBound(a.resolve(file.hw_bound)),
        Cmd::Gamma(a) => ResolvedRun::Gamma(a.resolve(file.gamma)),
        Cmd::RipExact(a) => ResolvedRun::RipExact(a.resolve(file.rip_exact)),
        Cmd::RipScan(a) => ResolvedRun::RipScan(a.resolve(file.rip_scan)),
        Cmd::Recover(a) => ResolvedRun::Recover(a.resolve(file.recover)),
        Cmd::Phase(a) => ResolvedRun::Phase(a.resolve(file.phase)),
    };

    let files = commands::run_subcommand(name, &resolved, seed)
        .with_context(|| format!("running {name}"))?;
    let run_dir = out_base.join(name);
    let manifest = chaoslab::report::emit(&run_dir, name, seed, &resolved, &files)
        .with_context(|| format!("writing artifacts to {}", run_dir.display()))?;

    for record in &manifest.outputs {
        println!("{}  {}", record.sha256, record.file);
    }
    eprintln!(
        "{name}: wrote {} files to {}",
        manifest.outputs.len() + 1,
        run_dir.display()
    );
    Ok(())
}
