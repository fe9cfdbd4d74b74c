use std::path::{Path, PathBuf};

use monocurv_core::conjecture::Region;
use monocurv_core::mcfun::MetricKind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative agreement required between two exact evaluation routes.
    pub cross_check: f64,
    /// Relative agreement required against the finite-difference oracle.
    pub oracle: f64,
    pub concavity: f64,
    pub minors: f64,
    pub lemma4: f64,
    pub monotonicity: f64,
    /// Allowed excess of the scanned maximum over the trace-state value.
    pub maximum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cross_check: 1e-8,
            oracle: 1e-3,
            concavity: 1e-9,
            minors: 1e-10,
            lemma4: 1e-9,
            monotonicity: 1e-8,
            maximum: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialCounts {
    pub concavity: u64,
    pub lemma4: u64,
    pub paths: u64,
    pub steps: usize,
    /// Points per axis of the Hessian minor grid.
    pub grid: usize,
}

impl Default for TrialCounts {
    fn default() -> Self {
        Self {
            concavity: 1_000_000,
            lemma4: 100_000,
            paths: 1_000,
            steps: 50,
            grid: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub metric: MetricKind,
    pub dimension: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub region: Region,
    pub minor_grid: Region,
    pub trials: TrialCounts,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            metric: MetricKind::KuboMori,
            dimension: 3,
            seed: 0,
            tolerances: Tolerances::default(),
            region: Region::default(),
            minor_grid: Region { lo: 0.05, hi: 20.0 },
            trials: TrialCounts::default(),
            output: None,
            format: OutputFormat::Json,
            deterministic: false,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::Input(format!(
                "dimension must be at least 2, got {}",
                self.dimension
            )));
        }
        for r in [self.region, self.minor_grid] {
            Region::new(r.lo, r.hi)?;
        }
        let t = &self.tolerances;
        for v in [
            t.cross_check,
            t.oracle,
            t.concavity,
            t.minors,
            t.lemma4,
            t.monotonicity,
            t.maximum,
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Input(format!(
                    "tolerances must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Accepts the core names plus `bures` and `bkm`.
pub fn parse_metric(name: &str) -> Result<MetricKind> {
    match name.to_ascii_lowercase().as_str() {
        "smallest" | "bures" | "sld" => Ok(MetricKind::Smallest),
        "largest" => Ok(MetricKind::Largest),
        "kubo-mori" | "kubomori" | "bkm" => Ok(MetricKind::KuboMori),
        other => Err(Error::Input(format!(
            "unknown metric `{other}`; expected bures, smallest, largest or kubo-mori"
        ))),
    }
}
