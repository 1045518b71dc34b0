//! Experiment configuration: presets mirroring the synthetic experiments and
//! a flat key = value config file format.

use crate::error::{Error, Result};
use crate::nets::{Activation, PointModelKind, TrainConfig};
use crate::synthdata::SyntheticKind;
use serde::{Deserialize, Serialize};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Quantile levels used for the synthetic presets.
pub fn default_levels() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub preset: SyntheticKind,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub levels: Vec<f64>,
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// None = full batch.
    pub batch_size: Option<usize>,
    /// Number of directions used to sample each surface.
    pub directions: usize,
    /// Fit the conditional Gaussian covariance network as a second baseline.
    pub conditional_baseline: bool,
}

impl ExperimentConfig {
    /// Reference hyperparameters for a synthetic preset: one hidden layer of 10
    /// tanh neurons, Adam lr 0.1, L2 0.3, 50000 full-batch epochs, 1000/1000
    /// split.
    pub fn preset(kind: SyntheticKind, seed: u64) -> Self {
        ExperimentConfig {
            preset: kind,
            seed,
            n_train: 1000,
            n_test: 1000,
            levels: default_levels(),
            hidden: vec![10],
            activation: Activation::Tanh,
            epochs: 50_000,
            learning_rate: 0.1,
            l2: 0.3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: None,
            directions: 360,
            conditional_baseline: kind == SyntheticKind::Cmgd,
        }
    }

    /// Reduced epoch budget for quick runs and CI.
    pub fn fast(mut self) -> Self {
        self.epochs = 5000;
        self
    }

    pub fn point_model_kind(&self) -> PointModelKind {
        match self.preset {
            SyntheticKind::Mgd | SyntheticKind::Smd => PointModelKind::Mean,
            SyntheticKind::Cmgd => PointModelKind::Linear,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            l2: self.l2,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
            batch_size: self.batch_size,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::Config("at least one quantile level required".into()));
        }
        for w in self.levels.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Config("levels must be strictly ascending".into()));
            }
        }
        if self.levels[0] <= 0.0 || *self.levels.last().unwrap() >= 1.0 {
            return Err(Error::Config("levels must lie in (0,1)".into()));
        }
        if self.directions < 3 {
            return Err(Error::Config("need at least 3 directions".into()));
        }
        if self.epochs == 0 || self.learning_rate <= 0.0 {
            return Err(Error::Config("epochs >= 1 and learning rate > 0 required".into()));
        }
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::Config("sample counts must be >= 1".into()));
        }
        Ok(())
    }

    /// Flat key = value text, diffable and language neutral.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("schema_version", CONFIG_SCHEMA_VERSION.to_string());
        push("preset", self.preset.to_string());
        push("seed", self.seed.to_string());
        push("n_train", self.n_train.to_string());
        push("n_test", self.n_test.to_string());
        push(
            "levels",
            self.levels
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        push(
            "hidden",
            self.hidden
                .iter()
                .map(|h| h.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        push("activation", self.activation.to_string());
        push("epochs", self.epochs.to_string());
        push("learning_rate", self.learning_rate.to_string());
        push("l2", self.l2.to_string());
        push("beta1", self.beta1.to_string());
        push("beta2", self.beta2.to_string());
        push("epsilon", self.epsilon.to_string());
        push(
            "batch_size",
            self.batch_size.map_or("full".to_string(), |b| b.to_string()),
        );
        push("directions", self.directions.to_string());
        push("conditional_baseline", self.conditional_baseline.to_string());
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut preset = None;
        let mut config: Option<ExperimentConfig> = None;
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        // preset and seed first so the remaining keys override its defaults
        for (k, v) in &pairs {
            if k == "schema_version" {
                let version: u32 = v
                    .parse()
                    .map_err(|_| Error::Config("bad schema_version".into()))?;
                if version != CONFIG_SCHEMA_VERSION {
                    return Err(Error::Config(format!(
                        "unsupported config schema version {version}"
                    )));
                }
            }
            if k == "preset" {
                preset = Some(v.parse::<SyntheticKind>()?);
            }
        }
        let kind = preset.ok_or_else(|| Error::Config("missing 'preset' key".into()))?;
        let cfg = config.get_or_insert_with(|| ExperimentConfig::preset(kind, 0));
        for (k, v) in &pairs {
            let parse_f64 = || -> Result<f64> {
                v.parse()
                    .map_err(|_| Error::Config(format!("bad float for key '{k}': '{v}'")))
            };
            let parse_usize = || -> Result<usize> {
                v.parse()
                    .map_err(|_| Error::Config(format!("bad integer for key '{k}': '{v}'")))
            };
            match k.as_str() {
                "schema_version" | "preset" => {}
                "seed" => {
                    cfg.seed = v
                        .parse()
                        .map_err(|_| Error::Config(format!("bad seed '{v}'")))?
                }
                "n_train" => cfg.n_train = parse_usize()?,
                "n_test" => cfg.n_test = parse_usize()?,
                "levels" => {
                    cfg.levels = v
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse()
                                .map_err(|_| Error::Config(format!("bad level '{s}'")))
                        })
                        .collect::<Result<Vec<f64>>>()?
                }
                "hidden" => {
                    cfg.hidden = v
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse()
                                .map_err(|_| Error::Config(format!("bad hidden size '{s}'")))
                        })
                        .collect::<Result<Vec<usize>>>()?
                }
                "activation" => cfg.activation = v.parse()?,
                "epochs" => cfg.epochs = parse_usize()?,
                "learning_rate" => cfg.learning_rate = parse_f64()?,
                "l2" => cfg.l2 = parse_f64()?,
                "beta1" => cfg.beta1 = parse_f64()?,
                "beta2" => cfg.beta2 = parse_f64()?,
                "epsilon" => cfg.epsilon = parse_f64()?,
                "batch_size" => {
                    cfg.batch_size = if v == "full" {
                        None
                    } else {
                        Some(parse_usize()?)
                    }
                }
                "directions" => cfg.directions = parse_usize()?,
                "conditional_baseline" => {
                    cfg.conditional_baseline = v
                        .parse()
                        .map_err(|_| Error::Config(format!("bad bool '{v}'")))?
                }
                other => return Err(Error::Config(format!("unknown config key '{other}'"))),
            }
        }
        let cfg = config.unwrap();
        cfg.validate()?;
        Ok(cfg)
    }
}
