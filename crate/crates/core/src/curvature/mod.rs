//! Graph curvature: Ollivier-Ricci edges via exact transport, sampled
//! sectional curvature observation, the learned curvature estimator and
//! the four-point δ-hyperbolicity diagnostic.

mod cache;
mod curvnn;
mod ricci;
mod sectional;
mod transport;

use thiserror::Error;

pub use cache::{
    interval_curvatures, CacheStats, IntervalCurvature, RicciCache, RicciConfig, RicciKey,
    CACHE_VERSION,
};
pub use curvnn::{estimate_curvature, CurvNN, CurvatureEstimate};
pub use ricci::{mass_distribution, ollivier_ricci_edge, ricci_vector, MassDistribution, RicciVector};
pub use sectional::{delta_hyperbolicity, observe_sectional, sectional_sample, CurvatureObservation};
pub use transport::{transport_cost, wasserstein_exact};

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("alpha {0} outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("node {0} not in graph")]
    UnknownNode(usize),
    #[error("edge ({0}, {1}) not in graph")]
    UnknownEdge(usize, usize),
    #[error("supports are disconnected (infinite transport cost)")]
    Disconnected,
    #[error("mass distributions must be nonnegative and sum to 1")]
    InvalidMass,
    #[error("graph too sparse to observe curvature")]
    TooSparse,
    #[error("graph has {nodes} nodes, above the cap of {cap}; sample a subgraph first")]
    TooLarge { nodes: usize, cap: usize },
    #[error("graph must be connected")]
    NotConnected,
    #[error("ricci cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
