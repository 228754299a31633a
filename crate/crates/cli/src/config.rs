//! Flat `key = value` run configuration with command-line overrides.

use std::path::{Path, PathBuf};

use coevolve_core::model::{FusionMode, Pooling};
use coevolve_core::train_eval::{Mode, TrainConfig};
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub split: [f64; 3],
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: None,
            out_dir: None,
            cache_dir: None,
            split: [0.8, 0.1, 0.1],
            train: TrainConfig::default(),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::User(format!("invalid value `{value}` for `{key}`")))
}

fn lowercase_enum<T: serde::de::DeserializeOwned>(key: &str, value: &str) -> Result<T, CliError> {
    serde_json::from_value(serde_json::Value::String(value.to_lowercase()))
        .map_err(|_| CliError::User(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    /// Apply one setting; `-` and `_` are interchangeable in keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.replace('-', "_");
        let t = &mut self.train;
        let k = key.as_str();
        match k {
            "dataset" => self.dataset = Some(value.into()),
            "out_dir" => self.out_dir = Some(value.into()),
            "cache_dir" => self.cache_dir = Some(value.into()),
            "split" => {
                let parts: Vec<f64> = value
                    .split(',')
                    .map(|p| num(k, p.trim()))
                    .collect::<Result<_, _>>()?;
                self.split = parts
                    .try_into()
                    .map_err(|_| CliError::User("split needs three comma-separated ratios".into()))?;
            }
            "n_intervals" => t.n_intervals = num(k, value)?,
            "epochs" => t.epochs = num(k, value)?,
            "learning_rate" => t.learning_rate = num(k, value)?,
            "embedding_dim" => t.embedding_dim = num(k, value)?,
            "fusion_mode" => t.fusion.mode = lowercase_enum::<FusionMode>(k, value)?,
            "pooling" => t.fusion.pooling = lowercase_enum::<Pooling>(k, value)?,
            "layers" => t.fusion.layers = num(k, value)?,
            "neg_rate" => t.neg_rate = num(k, value)?,
            "neg_per_positive" => t.neg_per_positive = num(k, value)?,
            "sample_ratio" => t.sample_ratio = num(k, value)?,
            "alpha" => t.alpha = num(k, value)?,
            "observe_iterations" => t.observe_iterations = num(k, value)?,
            "cumulative" => t.cumulative = num(k, value)?,
            "seed" => t.seed = num(k, value)?,
            "patience" => t.patience = num(k, value)?,
            "mode" => t.mode = value.parse::<Mode>().map_err(|e| CliError::User(e.to_string()))?,
            "initial_kappa" => t.initial_kappa = num(k, value)?,
            "static_kappa_user" => t.static_kappa_user = num(k, value)?,
            "static_kappa_item" => t.static_kappa_item = num(k, value)?,
            "curvature_bound" => t.curvature_bound = num(k, value)?,
            "fd_r" => t.fd_r = num(k, value)?,
            "fd_t" => t.fd_t = num(k, value)?,
            "eval_k" => t.eval_k = num(k, value)?,
            "max_norm" => t.max_norm = num(k, value)?,
            _ => return Err(CliError::User(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Parse a config file: `key = value` per line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::User(format!("config line {}: expected `key = value`", n + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| CliError::User(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::User(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn dataset(&self) -> Result<&Path, CliError> {
        self.dataset
            .as_deref()
            .ok_or_else(|| CliError::User("no dataset given (--data or `dataset =` in the config)".into()))
    }
}
