//! Experiment configuration. Every block has defaults, so `{}` is a valid
//! config; unknown keys are rejected.

use std::path::{Path, PathBuf};

use chaoslab::fuzz::FuzzLimits;
use chaoslab::kernels::{G4Options, GridSpec, HermiteKernelSpec, SweepOptions};
use chaoslab::regularity::IncrementNorm;
use chaoslab::Tensor;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Per-command override of the main pass/fail tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub out_dir: PathBuf,
    pub expand: ExpandConfig,
    pub verify: VerifyConfig,
    pub simulate: SimulateConfig,
    pub report: ReportConfig,
    pub fuzz: FuzzConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            workers: None,
            tolerance: None,
            out_dir: PathBuf::from("out"),
            expand: ExpandConfig::default(),
            verify: VerifyConfig::default(),
            simulate: SimulateConfig::default(),
            report: ReportConfig::default(),
            fuzz: FuzzConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Reads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(p) = cfg.expand.tensors_file.as_mut() {
            *p = base.join(&*p);
        }
        if let PathSource::Files { files } = &mut cfg.report.source {
            for f in files {
                *f = base.join(&*f);
            }
        }
        Ok(cfg)
    }
}

/// A kernel choice. Presets fill in `β1` and `β2` from `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Fbm {
        alpha: f64,
        #[serde(rename = "T", default = "unit")]
        horizon: f64,
    },
    Rosenblatt {
        alpha: f64,
        #[serde(rename = "T", default = "unit")]
        horizon: f64,
    },
    Hermite {
        n: usize,
        alpha: f64,
        #[serde(rename = "T", default = "unit")]
        horizon: f64,
    },
    Custom {
        n: usize,
        beta1: f64,
        beta2: f64,
        #[serde(rename = "T", default = "unit")]
        horizon: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normalization: Option<f64>,
    },
    /// `A_t = 0`, a degenerate family for negative controls.
    Zero {
        alpha: f64,
        #[serde(rename = "T", default = "unit")]
        horizon: f64,
    },
}

fn unit() -> f64 {
    1.0
}

pub enum Kernel {
    Spec(HermiteKernelSpec),
    Zero { alpha: f64, horizon: f64 },
}

impl KernelConfig {
    pub fn resolve(&self) -> Result<Kernel, Failure> {
        let spec = match *self {
            KernelConfig::Fbm { alpha, horizon } => HermiteKernelSpec::fbm(alpha, horizon),
            KernelConfig::Rosenblatt { alpha, horizon } => HermiteKernelSpec::rosenblatt(alpha, horizon),
            KernelConfig::Hermite { n, alpha, horizon } => HermiteKernelSpec::hermite(n, alpha, horizon),
            KernelConfig::Custom {
                n,
                beta1,
                beta2,
                horizon,
                normalization,
            } => HermiteKernelSpec::new(n, beta1, beta2, horizon).and_then(|s| match normalization {
                Some(c) => s.with_normalization(c),
                None => Ok(s),
            }),
            KernelConfig::Zero { alpha, horizon } => {
                if !(alpha > 0.0 && alpha < 1.0 && horizon > 0.0) {
                    return Err(Failure::Config(format!("zero kernel needs α ∈ (0, 1), got {alpha}")));
                }
                return Ok(Kernel::Zero { alpha, horizon });
            }
        };
        spec.map(Kernel::Spec).map_err(|e| Failure::Config(e.to_string()))
    }

    pub fn spec(&self) -> Result<HermiteKernelSpec, Failure> {
        match self.resolve()? {
            Kernel::Spec(s) => Ok(s),
            Kernel::Zero { .. } => Err(Failure::Config("the zero kernel cannot be simulated".into())),
        }
    }
}

/// Built-in tensor fixtures for `expand`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpandFixture {
    /// The uncorrelated second-chaos pair with correlated squares.
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpandConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<ExpandFixture>,
    /// JSON file holding an array of tensors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tensors_file: Option<PathBuf>,
    pub tensors: Vec<Tensor>,
    /// Largest total order accepted.
    pub cap: usize,
    /// Gaussian seeds for the pointwise identity check.
    pub points: usize,
    pub tolerance: f64,
}

impl Default for ExpandConfig {
    fn default() -> Self {
        Self {
            fixture: None,
            tensors_file: None,
            tensors: Vec::new(),
            cap: chaoslab::chaos::DEFAULT_EXPANSION_CAP,
            points: 100,
            tolerance: 1e-9,
        }
    }
}

fn default_kernels() -> Vec<KernelConfig> {
    vec![
        KernelConfig::Fbm { alpha: 0.3, horizon: 1.0 },
        KernelConfig::Fbm { alpha: 0.5, horizon: 1.0 },
        KernelConfig::Fbm { alpha: 0.75, horizon: 1.0 },
        KernelConfig::Rosenblatt { alpha: 0.7, horizon: 1.0 },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    G1,
    G2,
    G4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub kernels: Vec<KernelConfig>,
    pub grid: GridSpec,
    pub conditions: Vec<Condition>,
    pub sweep: SweepOptions,
    pub g4: G4Options,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            kernels: default_kernels(),
            grid: GridSpec::new(32),
            conditions: vec![Condition::G1, Condition::G2, Condition::G4],
            sweep: SweepOptions::default(),
            g4: G4Options::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub kernel: KernelConfig,
    pub grid: GridSpec,
    pub paths: usize,
    pub first_stream: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            kernel: KernelConfig::Fbm { alpha: 0.5, horizon: 1.0 },
            grid: GridSpec::new(1024),
            paths: 4,
            first_stream: 0,
        }
    }
}

/// Where `report` gets its paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSource {
    /// Simulate with the seed of the run.
    Simulate {
        kernel: KernelConfig,
        grid: GridSpec,
        paths: usize,
    },
    /// `t,value` CSV files as written by `simulate`.
    Files { files: Vec<PathBuf> },
    /// `G(t) = t` sampled at `M + 1` points.
    Linear {
        #[serde(rename = "M")]
        m: usize,
        #[serde(rename = "T", default = "unit")]
        horizon: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthConfig {
    pub ells: Vec<f64>,
    /// Dyadic lag levels `j`, `δ = T 2^{−j}`.
    pub levels: Vec<u32>,
    pub ell_exponents: Vec<f64>,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            ells: vec![2.0, 4.0, 6.0, 8.0],
            levels: vec![6, 7, 8, 9],
            ell_exponents: vec![1.0, 0.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulusConfig {
    /// Resolutions compared: native and `levels − 1` dyadic coarsenings.
    pub levels: usize,
    /// Exponent of `|log r|`; `n/2` of the kernel when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_exponent: Option<f64>,
    /// Largest accepted ratio of the means across resolutions.
    pub max_growth: f64,
}

impl Default for ModulusConfig {
    fn default() -> Self {
        Self {
            levels: 3,
            log_exponent: None,
            max_growth: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub source: PathSource,
    /// Target exponent; the kernel's `α` (or 1 for the linear path) when
    /// absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub p: f64,
    /// First and last dyadic level of the slope fit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<(u32, u32)>,
    pub slope_tolerance: f64,
    /// Smoothness of the Besov-Orlicz table; `α` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub besov_s: Option<f64>,
    /// Norm of the Besov-Orlicz table; `Φ_{2/n}` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub besov_norm: Option<IncrementNorm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusConfig>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            source: PathSource::Simulate {
                kernel: KernelConfig::Fbm { alpha: 0.75, horizon: 1.0 },
                grid: GridSpec::new(1 << 14),
                paths: 50,
            },
            alpha: None,
            p: 2.0,
            levels: Some((3, 10)),
            slope_tolerance: 0.05,
            besov_s: None,
            besov_norm: None,
            growth: None,
            modulus: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzConfig {
    pub limits: FuzzLimits,
    pub expansion_instances: usize,
    pub points: usize,
    pub bound_instances: usize,
    pub relation_instances: usize,
    pub covariance_instances: usize,
    pub cardinality_unit_max: usize,
    pub cardinality_instances: usize,
    pub cardinality_max_total: usize,
    /// Relative tolerance of the expansion identities.
    pub identity_tolerance: f64,
    pub relation_tolerance: f64,
    pub slack_tolerance: f64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            limits: FuzzLimits::default(),
            expansion_instances: 500,
            points: 100,
            bound_instances: 1000,
            relation_instances: 1000,
            covariance_instances: 500,
            cardinality_unit_max: 8,
            cardinality_instances: 200,
            cardinality_max_total: 10,
            identity_tolerance: 1e-9,
            relation_tolerance: 1e-10,
            slack_tolerance: 1e-12,
        }
    }
}
