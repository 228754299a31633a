use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::TrainError;
use crate::curvature::RicciConfig;
use crate::diff::AdamConfig;
use crate::model::FusionConfig;

/// Curvature handling during training.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Curvatures estimated per interval.
    Full,
    /// Curvatures fixed at the configured static values.
    Static,
    /// Both sides flat; no curvature penalty.
    Euclidean,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Static => "static",
            Mode::Euclidean => "euclidean",
        })
    }
}

impl FromStr for Mode {
    type Err = TrainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Mode::Full),
            "static" | "static-curvature" => Ok(Mode::Static),
            "euclidean" => Ok(Mode::Euclidean),
            _ => Err(TrainError::Config(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_intervals: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub embedding_dim: usize,
    pub fusion: FusionConfig,
    pub neg_rate: f64,
    pub neg_per_positive: usize,
    pub sample_ratio: f64,
    pub alpha: f64,
    pub observe_iterations: usize,
    pub cumulative: bool,
    pub seed: u64,
    pub patience: usize,
    pub mode: Mode,
    pub initial_kappa: f64,
    pub static_kappa_user: f64,
    pub static_kappa_item: f64,
    pub curvature_bound: f64,
    pub fd_r: f64,
    pub fd_t: f64,
    pub eval_k: usize,
    /// Largest tangent norm an embedding row may take; keeps points off the
    /// boundary clamp where gradients vanish.
    pub max_norm: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            n_intervals: 64,
            epochs: 50,
            learning_rate: 3e-3,
            embedding_dim: 128,
            fusion: FusionConfig::default(),
            neg_rate: 0.2,
            neg_per_positive: 5,
            sample_ratio: 0.15,
            alpha: 0.5,
            observe_iterations: 10,
            cumulative: false,
            seed: 0,
            patience: 10,
            mode: Mode::Full,
            initial_kappa: -1.0,
            static_kappa_user: -1.0,
            static_kappa_item: -1.0,
            curvature_bound: 4.0,
            fd_r: 2.0,
            fd_t: 1.0,
            eval_k: 10,
            max_norm: 2.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if self.n_intervals == 0 {
            return bad("n_intervals must be >= 1");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if self.embedding_dim == 0 {
            return bad("embedding_dim must be positive");
        }
        if self.fusion.layers == 0 {
            return bad("layers must be >= 1");
        }
        if !(self.neg_rate > 0.0 && self.neg_rate <= 1.0) {
            return bad("neg_rate must be in (0, 1]");
        }
        if self.neg_per_positive == 0 {
            return bad("neg_per_positive must be >= 1");
        }
        if !(self.sample_ratio > 0.0 && self.sample_ratio <= 1.0) {
            return bad("sample_ratio must be in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha must be in [0, 1]");
        }
        if self.observe_iterations == 0 {
            return bad("observe_iterations must be >= 1");
        }
        if self.patience == 0 {
            return bad("patience must be >= 1");
        }
        if !(self.curvature_bound > 0.0) {
            return bad("curvature_bound must be positive");
        }
        if !(self.fd_r > 0.0 && self.fd_t > 0.0) {
            return bad("fd_r and fd_t must be positive");
        }
        if !(self.max_norm > 0.0) {
            return bad("max_norm must be positive");
        }
        if self.eval_k == 0 {
            return bad("eval_k must be >= 1");
        }
        for k in [self.initial_kappa, self.static_kappa_user, self.static_kappa_item] {
            if !k.is_finite() {
                return bad("curvatures must be finite");
            }
        }
        Ok(())
    }

    pub fn ricci(&self) -> RicciConfig {
        RicciConfig {
            alpha: self.alpha,
            sample_ratio: self.sample_ratio,
            seed: self.seed,
            observe_iterations: self.observe_iterations,
            cumulative: self.cumulative,
        }
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            ..AdamConfig::default()
        }
    }

    /// Short stable hash of every field, recorded in run manifests.
    pub fn fingerprint(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(&Sha256::digest(text.as_bytes())[..8])
    }

    /// Curvature pair every epoch starts from.
    pub fn start_kappa(&self) -> [f64; 2] {
        match self.mode {
            Mode::Full => {
                let b = self.curvature_bound;
                [self.initial_kappa.clamp(-b, b); 2]
            }
            Mode::Static => [self.static_kappa_user, self.static_kappa_item],
            Mode::Euclidean => [0.0, 0.0],
        }
    }
}
