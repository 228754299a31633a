//! Interval-sequential training, ranking evaluation and checkpoints.

mod checkpoint;
mod config;
mod evaluate;
mod state;
mod train;

use thiserror::Error;

pub use checkpoint::{restore, CHECKPOINT_VERSION};
pub use config::{Mode, TrainConfig};
pub use evaluate::{evaluate, metrics_from_ranks, rank_of, EvalReport, RankingResult};
pub use state::Model;
pub use train::{interval_loss, train, EpochLog, IntervalLoss, TrainOutcome};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("non-finite loss in epoch {epoch}, interval {interval}: {detail}")]
    NonFinite {
        epoch: usize,
        interval: usize,
        detail: String,
    },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("checkpoint version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Curvature(#[from] crate::curvature::CurvatureError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Diff(#[from] crate::diff::DiffError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[cfg(test)]
mod tests;
