use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{config, Result};
use crate::geometry::CandidateConfig;

/// Environment variable that overrides the configured master seed.
pub const SEED_ENV: &str = "PREDICT_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Version-space generator against an oblivious query list.
    Oblivious,
    /// cdepth generator for halfspaces against an adaptive adversary.
    Halfspace,
    /// Version-space generator against queries drawn from the data distribution.
    StochasticBaseline,
}

/// Query stream used by a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryConfig {
    /// Thresholds: uniform integer queries in a window around the target
    /// where block hypotheses tend to disagree.
    Window,
    /// Uniform over the domain (grid, class points, or box).
    Uniform,
    /// A fixed list loaded from CSV; `offline` also discloses it up front.
    File { path: PathBuf, #[serde(default)] offline: bool },
    /// Adaptive interval bisection over the threshold grid.
    Bisection,
    /// Adaptive perceptron boundary probe; `tau` defaults to `2 alpha diam`.
    BoundaryProbe { #[serde(default)] tau: Option<f64> },
}

/// Direct overrides of the BetweenThresholds parameters for desk-scale runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BtOverride {
    /// Ensemble size; when set, `eps` is chosen so that it meets the size formula.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub eps: Option<f64>,
    pub delta: f64,
    pub beta: f64,
}

/// Multipliers for the constants hidden in the sample-size bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Constants {
    pub k: f64,
    pub m: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants { k: 1.0, m: 1.0 }
    }
}

/// Pass criterion over the aggregate: at least `min_fraction` of the runs
/// finish with `top_count <= max_top_count` and without aborting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub max_top_count: usize,
    pub min_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(rename = "T")]
    pub rounds: usize,
    /// Input dimension for halfspaces; VC dimension override otherwise.
    #[serde(default)]
    pub d: Option<usize>,
    /// Enumerated concept class file for oblivious runs.
    #[serde(default)]
    pub class_file: Option<PathBuf>,
    #[serde(default = "default_domain")]
    pub domain_size: u64,
    pub alpha: f64,
    pub beta: f64,
    pub eps: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub bt: Option<BtOverride>,
    #[serde(default)]
    pub block_size: Option<usize>,
    #[serde(default)]
    pub v_max: Option<usize>,
    #[serde(default)]
    pub adversary: Option<AdversaryConfig>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub candidates: CandidateConfig,
    #[serde(default)]
    pub gate: Option<Gate>,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Fresh points for the held-out error of the final ensemble (0 skips it).
    #[serde(default)]
    pub eval_points: usize,
    /// Record wall-clock time; off by default so repeated runs are byte-identical.
    #[serde(default)]
    pub record_wall_time: bool,
}

fn default_domain() -> u64 {
    1 << 20
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_workers() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        ExperimentConfig::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("alpha", self.alpha), ("beta", self.beta), ("eps", self.eps), ("delta", self.delta)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.beta >= 1.0 || self.delta >= 1.0 {
            return Err(config("beta and delta must be below 1"));
        }
        if self.trials == 0 {
            return Err(config("trials must be at least 1"));
        }
        if self.workers == 0 {
            return Err(config("workers must be at least 1"));
        }
        if self.domain_size == 0 {
            return Err(config("domain_size must be at least 1"));
        }
        if self.mode == Mode::Halfspace && self.d.unwrap_or(0) == 0 {
            return Err(config("halfspace mode needs d >= 1"));
        }
        if let Some(g) = &self.gate {
            if !(0.0..=1.0).contains(&g.min_fraction) {
                return Err(config("gate min_fraction must lie in [0,1]"));
            }
        }
        Ok(())
    }

    /// Applies `PREDICT_SEED` when set; an explicit CLI seed should be applied after.
    pub fn apply_seed_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|e| config(format!("{SEED_ENV}={v:?} is not a u64: {e}")))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of every setting that affects results
    /// (object keys sorted; output directory and worker count excluded).
    pub fn digest(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("out_dir");
            map.remove("workers");
        }
        let canonical = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
