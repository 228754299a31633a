//! The forward model: time encoding, interaction embedding, edge fusion,
//! attention, cross-manifold aggregation, scoring and the training loss.

mod aggregate;
mod layers;
mod negative;
mod params;
mod score;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggregate::{aggregate_interval, aggregate_item, aggregate_node, aggregate_user, IntervalOutput};
pub use layers::{attention_weights, embed_interaction, encode_time, fuse_edges, Mlp};
pub use negative::negative_sample;
pub use params::{ModelParams, ParamLayout};
pub use score::{advance_interval, fermi_dirac, loss, score, LossTerms, PROB_FLOOR};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("non-finite loss at {0}")]
    NonFinite(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Diff(#[from] crate::diff::DiffError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMode {
    Early,
    Late,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    Mean,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionConfig {
    pub mode: FusionMode,
    pub pooling: Pooling,
    pub layers: usize,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            mode: FusionMode::Early,
            pooling: Pooling::Mean,
            layers: 1,
        }
    }
}

/// Shapes and fixed constants of the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub num_users: usize,
    pub num_items: usize,
    pub dim: usize,
    pub feature_dim: usize,
    pub fusion: FusionConfig,
    /// Fermi-Dirac radius and temperature.
    pub fd_r: f64,
    pub fd_t: f64,
    /// Estimated curvatures are clamped to `[-bound, bound]`.
    pub curvature_bound: f64,
    pub curv_hidden: usize,
    pub curv_out: usize,
    /// Timestamps are mapped to `(t - time_origin) / time_scale`.
    pub time_origin: f64,
    pub time_scale: f64,
    /// Aggregated tangent coordinates are projected onto this ball.
    pub max_norm: f64,
}

impl ModelConfig {
    pub fn new(num_users: usize, num_items: usize, dim: usize) -> Self {
        ModelConfig {
            num_users,
            num_items,
            dim,
            feature_dim: 0,
            fusion: FusionConfig::default(),
            fd_r: 2.0,
            fd_t: 1.0,
            curvature_bound: 4.0,
            curv_hidden: 16,
            curv_out: 8,
            time_origin: 0.0,
            time_scale: 1.0,
            max_norm: 2.0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::Config(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(self.max_norm > 0.0) {
            return bad("max_norm must be positive");
        }
        if self.fusion.layers == 0 {
            return bad("layers must be >= 1");
        }
        if !(self.fd_r > 0.0 && self.fd_t > 0.0) {
            return bad("Fermi-Dirac r and t must be positive");
        }
        if !(self.time_scale > 0.0) || !self.time_origin.is_finite() {
            return bad("time scale must be positive");
        }
        if !(self.curvature_bound > 0.0) {
            return bad("curvature bound must be positive");
        }
        Ok(())
    }

    pub fn normalize_time(&self, t: f64) -> f64 {
        (t - self.time_origin) / self.time_scale
    }
}

#[cfg(test)]
mod tests;
