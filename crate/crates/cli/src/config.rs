use std::path::PathBuf;

use coslaw_core::cosine::{CosineFamily, EvalStrategy, FamilyDescriptor};
use coslaw_core::laws::{LimitPoint, ScanConfig, DEFAULT_TOL_ZERO};
use coslaw_core::linalg::Matrix;
use coslaw_core::random::{random_hermitian_with_norm, seeded_rng};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

/// One experiment, read from a single JSON document.
///
/// Only the sections a command reads need to be present.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<LawSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halve: Option<HalveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruct: Option<ReconstructSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrete: Option<DiscreteSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroup: Option<SemigroupSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSection>,
}

/// Scan fields; anything left out keeps the command's default.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanOverrides {
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub step: Option<f64>,
    pub window_len: Option<f64>,
    pub overflow_cap: Option<f64>,
    pub tol_zero: Option<f64>,
    pub tail_windows: Option<usize>,
}

impl ScanOverrides {
    pub fn apply(&self, mut cfg: ScanConfig) -> ScanConfig {
        if let Some(v) = self.t_start {
            cfg.t_start = v;
        }
        if let Some(v) = self.t_end {
            cfg.t_end = v;
        }
        if let Some(v) = self.step {
            cfg.step = v;
        }
        if let Some(v) = self.window_len {
            cfg.window_len = v;
        }
        if let Some(v) = self.overflow_cap {
            cfg.overflow_cap = v;
        }
        if let Some(v) = self.tol_zero {
            cfg.tol_zero = v;
        }
        if let Some(v) = self.tail_windows {
            cfg.tail_windows = v;
        }
        cfg
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSection {
    pub r: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    pub t0: LimitPoint,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalveSection {
    /// Input `C(2s)`; when absent it is taken from the family at `2s`.
    #[serde(rename = "C2s")]
    pub c2s: Option<Matrix>,
    pub s: Option<f64>,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructSection {
    /// Input `C(1)`; when absent it is taken from the family.
    #[serde(rename = "C1")]
    pub c1: Option<Matrix>,
    pub depth: usize,
    pub margin: Option<f64>,
}

fn default_discrete_n() -> u64 {
    10_000
}

fn default_tol_zero() -> f64 {
    DEFAULT_TOL_ZERO
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteSection {
    #[serde(rename = "X")]
    pub x: Matrix,
    #[serde(rename = "N", default = "default_discrete_n")]
    pub n: u64,
    #[serde(default = "default_tol_zero")]
    pub tol_zero: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSection {
    /// Power semigroup `Tⁿ`.
    #[serde(rename = "T")]
    pub t: Option<Matrix>,
    /// Continuous semigroup `exp(tG)`.
    #[serde(rename = "G")]
    pub g: Option<Matrix>,
    #[serde(rename = "N", default = "default_discrete_n")]
    pub n: u64,
    #[serde(default = "default_tol_zero")]
    pub tol_zero: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSection {
    pub a: f64,
    pub b: f64,
}

/// A seeded random Hermitian generator, `{"kind":"random_hermitian","dim":n,"norm":x}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomHermitian {
    #[allow(dead_code)]
    kind: String,
    dim: usize,
    norm: f64,
    #[serde(default)]
    strategy: EvalStrategy,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn scan_overrides(&self) -> ScanOverrides {
        self.scan.unwrap_or_default()
    }

    pub fn law_r(&self) -> Option<f64> {
        self.law.map(|l| l.r)
    }

    /// The family named by the config, generated from `seed` when random.
    pub fn family(&self) -> Result<CosineFamily, CliError> {
        let value = self.family.as_ref().ok_or_else(|| CliError::Config("missing family descriptor".into()))?;
        if value.get("kind").and_then(|k| k.as_str()) == Some("random_hermitian") {
            let desc: RandomHermitian =
                serde_json::from_value(value.clone()).map_err(|e| CliError::Config(format!("invalid family: {e}")))?;
            if desc.dim == 0 || !(desc.norm >= 0.0) {
                return Err(CliError::Config("random_hermitian needs dim ≥ 1 and norm ≥ 0".into()));
            }
            let b = random_hermitian_with_norm(desc.dim, desc.norm, &mut seeded_rng(self.seed));
            return Ok(CosineFamily::matrix(b, desc.strategy)?);
        }
        let descriptor: FamilyDescriptor =
            serde_json::from_value(value.clone()).map_err(|e| CliError::Config(format!("invalid family: {e}")))?;
        Ok(CosineFamily::from_descriptor(&descriptor)?)
    }

    pub fn section<'a, T>(&self, section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        section.as_ref().ok_or_else(|| CliError::Config(format!("missing \"{name}\" section")))
    }
}
