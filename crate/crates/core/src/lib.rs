//! Co-evolving user and item embeddings on κ-stereographic manifolds.

pub mod curvature;
pub mod diff;
pub mod graph;
pub mod linalg;
pub mod manifold;
pub mod model;
pub mod scalar;
pub mod synthetic;
pub mod train_eval;

pub use manifold::{Curvature, ManifoldError, ManifoldPoint, TangentVector};
pub use scalar::Real;

pub type Point = ManifoldPoint<f64>;
pub type Point32 = ManifoldPoint<f32>;
pub type Curv = Curvature<f64>;
pub type Tangent = TangentVector<f64>;
