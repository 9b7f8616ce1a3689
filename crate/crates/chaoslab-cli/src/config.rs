//! Experiment configuration: TOML file sections, flag overlays, and the
//! precedence rules that resolve them.
//!
//! Precedence, highest first: command-line flag, then config-file value,
//! then built-in default. The output directory adds one level: `--out`
//! flag, then the `CHAOSLAB_OUT` environment variable, then the file's
//! `out` key, then `./chaoslab-out`. Unknown keys anywhere in the file are
//! rejected.

use anyhow::{bail, Context, Result};
use chaoslab::samplers::SourceKind;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Parse a scalar-source name as used in configs and flags.
pub fn parse_source_kind(name: &str) -> Result<SourceKind> {
    match name {
        "weibull" => Ok(SourceKind::SymmetricWeibull),
        "power-exponential" => Ok(SourceKind::PowerExponential),
        other => bail!("unknown source kind {other:?} (expected \"weibull\" or \"power-exponential\")"),
    }
}

/// Whole config file. Top-level keys hold run-wide settings; one optional
/// section per subcommand holds its parameters.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub sample: Option<SampleCfg>,
    pub norms: Option<NormsCfg>,
    #[serde(rename = "chaos-tails")]
    pub chaos_tails: Option<ChaosTailsCfg>,
    #[serde(rename = "hw-bound")]
    pub hw_bound: Option<HwBoundCfg>,
    pub gamma: Option<GammaCfg>,
    #[serde(rename = "rip-exact")]
    pub rip_exact: Option<RipExactCfg>,
    #[serde(rename = "rip-scan")]
    pub rip_scan: Option<RipScanCfg>,
    pub recover: Option<RecoverCfg>,
    pub phase: Option<PhaseCfg>,
}

impl FileConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid config file")
    }
}

/// Scalar-source diagnostics: empirical absolute moments against their
/// population values, plus the Orlicz `ψ_α` estimate.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SampleCfg {
    /// `"weibull"` or `"power-exponential"`.
    pub kind: String,
    pub alpha: f64,
    pub standardized: bool,
    /// Number of samples.
    pub n: usize,
    /// Moment orders for the table.
    pub p_grid: Vec<f64>,
}

impl Default for SampleCfg {
    fn default() -> Self {
        SampleCfg {
            kind: "weibull".into(),
            alpha: 1.5,
            standardized: true,
            n: 100_000,
            p_grid: vec![1.0, 2.0, 4.0],
        }
    }
}

/// Norm report for a dense matrix read from a CSV file.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct NormsCfg {
    /// Path to the matrix CSV (as written by the library's dense export).
    pub matrix: String,
    pub alpha: f64,
}

impl Default for NormsCfg {
    fn default() -> Self {
        NormsCfg {
            matrix: String::new(),
            alpha: 1.5,
        }
    }
}

/// Empirical chaos tails against the `φ₂` exponent bound.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ChaosTailsCfg {
    /// `"identity"`, `"rank-one"`, `"random-symmetric"`, or `"file"`.
    pub matrix: String,
    /// Side length for built-in matrices.
    pub n: usize,
    /// CSV path when `matrix = "file"` (must be real and symmetric).
    pub matrix_file: String,
    pub kind: String,
    pub alpha: f64,
    pub n_samples: usize,
    pub t_points: usize,
    /// Optional explicit grid ends; by default the grid spans the samples.
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    /// Tail-bound prefactor `C₁` and exponent scale `C₂`.
    pub c1: f64,
    pub c2: f64,
}

impl Default for ChaosTailsCfg {
    fn default() -> Self {
        ChaosTailsCfg {
            matrix: "identity".into(),
            n: 16,
            matrix_file: String::new(),
            kind: "weibull".into(),
            alpha: 2.0,
            n_samples: 100_000,
            t_points: 48,
            t_min: None,
            t_max: None,
            c1: 2.0,
            c2: 2.0,
        }
    }
}

/// Uniform deviation-bound suite over a matrix family.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct HwBoundCfg {
    /// `"random-symmetric"` or `"vx-circulant"`.
    pub family: String,
    /// Ambient dimension (signal length for `vx-circulant`).
    pub n: usize,
    /// Rows for `vx-circulant`.
    pub m: usize,
    /// Sparsity of the planted signals for `vx-circulant`.
    pub s: usize,
    /// Family size.
    pub count: usize,
    pub alpha: f64,
    /// `"dudley-empirical"` or `"closed-form"`.
    pub gamma: String,
    /// Leading constant for the closed-form Γ.
    pub c_gamma: f64,
    pub n_draws: usize,
    pub c_alpha: f64,
    pub c1_alpha: f64,
    pub t_points: usize,
    /// Grid end as a multiple of the dominating bound scale.
    pub t_max_factor: f64,
}

impl Default for HwBoundCfg {
    fn default() -> Self {
        HwBoundCfg {
            family: "vx-circulant".into(),
            n: 64,
            m: 16,
            s: 4,
            count: 8,
            alpha: 2.0,
            gamma: "dudley-empirical".into(),
            c_gamma: 1.0,
            n_draws: 10_000,
            c_alpha: 1.0,
            c1_alpha: 1.0,
            t_points: 32,
            t_max_factor: 4.0,
        }
    }
}

/// Dudley integrals, closed-form γ bounds, and sample-complexity tables.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GammaCfg {
    pub alpha: f64,
    pub s_list: Vec<usize>,
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    /// Multiplier in `m_required = ceil(c1 · δ⁻² · f1)`.
    pub c1: f64,
    /// Leading constant of the closed-form γ bound.
    pub c_closed: f64,
    /// Covering model: `"circulant"`, `"gabor"`, `"sparse-ball"`, or
    /// `"euclidean"`.
    pub cover: String,
    /// Upper integration limit of the Dudley integral.
    pub u_max: f64,
}

impl Default for GammaCfg {
    fn default() -> Self {
        GammaCfg {
            alpha: 2.0,
            s_list: vec![2, 4, 8],
            n: 1024,
            m: 256,
            delta: 0.4,
            c1: 1.0,
            c_closed: 1.0,
            cover: "circulant".into(),
            u_max: 1.0,
        }
    }
}

/// Exact restricted isometry constants of one ensemble draw.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RipExactCfg {
    /// `"identity"`, `"dense"`, `"circulant"`, or `"gabor"`.
    pub ensemble: String,
    pub kind: String,
    pub alpha: f64,
    pub m: usize,
    pub n: usize,
    pub s_list: Vec<usize>,
    /// Cap on `C(n, s)` support enumerations per row.
    pub budget: u64,
    /// Independent ensemble draws (each contributes one row per `s`).
    pub draws: usize,
}

impl Default for RipExactCfg {
    fn default() -> Self {
        RipExactCfg {
            ensemble: "identity".into(),
            kind: "weibull".into(),
            alpha: 2.0,
            m: 8,
            n: 8,
            s_list: vec![1, 2],
            budget: 2_000_000,
            draws: 1,
        }
    }
}

/// Minimal-measurement scaling scan `m*(s)` against `f1(s, n)`.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RipScanCfg {
    /// `"dense"` or `"circulant"` (the Gabor ensemble ties `n` to `m²` and
    /// cannot scan `m` at fixed ambient dimension).
    pub ensemble: String,
    pub kind: String,
    pub alpha: f64,
    pub n: usize,
    pub s_list: Vec<usize>,
    pub delta: f64,
    pub success_target: f64,
    pub n_trials: usize,
    pub probes_per_m: usize,
    pub m_lo: usize,
    pub m_hi: usize,
    /// `"exact"` or `"mc-lower"`; the mode is labeled in every artifact.
    pub probe: String,
    /// Enumeration cap for `probe = "exact"`.
    pub budget: u64,
    /// Sampled supports per draw for `probe = "mc-lower"`.
    pub n_supports: usize,
}

impl Default for RipScanCfg {
    fn default() -> Self {
        RipScanCfg {
            ensemble: "circulant".into(),
            kind: "weibull".into(),
            alpha: 2.0,
            n: 512,
            s_list: vec![2, 4, 8],
            delta: 0.4,
            success_target: 0.9,
            n_trials: 25,
            probes_per_m: 1,
            m_lo: 8,
            m_hi: 512,
            probe: "mc-lower".into(),
            budget: 2_000_000,
            n_supports: 200,
        }
    }
}

/// Planted-signal basis-pursuit recovery trials.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RecoverCfg {
    pub ensemble: String,
    pub kind: String,
    pub alpha: f64,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub trials: usize,
    pub rho: f64,
    pub max_iters: usize,
    pub tol: f64,
    /// ℓ₂ error threshold that counts as an exact recovery.
    pub success_tol: f64,
}

impl Default for RecoverCfg {
    fn default() -> Self {
        RecoverCfg {
            ensemble: "dense".into(),
            kind: "power-exponential".into(),
            alpha: 2.0,
            m: 32,
            n: 64,
            s: 4,
            trials: 50,
            rho: 1.0,
            max_iters: 5000,
            tol: 1e-8,
            success_tol: 1e-4,
        }
    }
}

/// Recovery phase diagram over an `(m, s)` grid.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseCfg {
    pub ensemble: String,
    pub kind: String,
    pub alpha: f64,
    pub n: usize,
    pub m_grid: Vec<usize>,
    pub s_grid: Vec<usize>,
    pub trials: usize,
    pub rho: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub success_tol: f64,
}

impl Default for PhaseCfg {
    fn default() -> Self {
        PhaseCfg {
            ensemble: "dense".into(),
            kind: "power-exponential".into(),
            alpha: 2.0,
            n: 64,
            m_grid: vec![8, 16, 24, 32, 40, 48],
            s_grid: vec![1, 2, 4, 8],
            trials: 100,
            rho: 1.0,
            max_iters: 5000,
            tol: 1e-8,
            success_tol: 1e-4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_parses_to_defaults() {
        let cfg = FileConfig::from_toml("").unwrap();
        assert_eq!(cfg, FileConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected_everywhere() {
        assert!(FileConfig::from_toml("bogus = 1").is_err());
        assert!(FileConfig::from_toml("[sample]\nbogus = 1").is_err());
        assert!(FileConfig::from_toml("[rip-scan]\nnn = 3").is_err());
    }

    #[test]
    fn sections_round_trip_losslessly() {
        let toml_text = r#"
seed = 9
threads = 2
out = "runs/demo"

[sample]
kind = "power-exponential"
alpha = 1.25
standardized = false
n = 5000
p_grid = [1.0, 3.0]

[rip-scan]
ensemble = "dense"
s_list = [2, 4]
probe = "exact"
"#;
        let cfg = FileConfig::from_toml(toml_text).unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.threads, Some(2));
        assert_eq!(cfg.out.as_deref(), Some(std::path::Path::new("runs/demo")));
        let sample = cfg.sample.clone().unwrap();
        assert_eq!(sample.kind, "power-exponential");
        assert_eq!(sample.alpha, 1.25);
        assert!(!sample.standardized);
        assert_eq!(sample.n, 5000);
        assert_eq!(sample.p_grid, vec![1.0, 3.0]);
        // Unset keys in a present section fall back to defaults.
        let scan = cfg.rip_scan.clone().unwrap();
        assert_eq!(scan.ensemble, "dense");
        assert_eq!(scan.s_list, vec![2, 4]);
        assert_eq!(scan.probe, "exact");
        assert_eq!(scan.n, RipScanCfg::default().n);

        // Lossless: serialize the section and parse it back.
        let text = toml::to_string(&sample).unwrap();
        let reparsed: SampleCfg = toml::from_str(&text).unwrap();
        assert_eq!(reparsed, sample);
    }

    #[test]
    fn source_kind_names() {
        assert_eq!(
            parse_source_kind("weibull").unwrap(),
            SourceKind::SymmetricWeibull
        );
        assert_eq!(
            parse_source_kind("power-exponential").unwrap(),
            SourceKind::PowerExponential
        );
        assert!(parse_source_kind("gaussian").is_err());
    }
}
