use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transport::wasserstein_exact;
use super::CurvatureError;
use crate::graph::SimpleGraph;

/// Lazy-walk distribution around a node: α on the node itself and
/// `(1-α)/deg` on each neighbour.
#[derive(Clone, Debug, PartialEq)]
pub struct MassDistribution {
    pub support: Vec<usize>,
    pub mass: Vec<f64>,
    pub alpha: f64,
}

impl MassDistribution {
    pub fn mass_at(&self, node: usize) -> f64 {
        self.support
            .iter()
            .position(|&s| s == node)
            .map_or(0.0, |k| self.mass[k])
    }
}

pub fn mass_distribution(
    graph: &SimpleGraph,
    node: usize,
    alpha: f64,
) -> Result<MassDistribution, CurvatureError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CurvatureError::InvalidAlpha(alpha));
    }
    if node >= graph.len() {
        return Err(CurvatureError::UnknownNode(node));
    }
    let nb = graph.neighbors(node);
    if nb.is_empty() || alpha == 1.0 {
        return Ok(MassDistribution {
            support: vec![node],
            mass: vec![1.0],
            alpha,
        });
    }
    let share = (1.0 - alpha) / nb.len() as f64;
    let mut support = vec![node];
    let mut mass = vec![alpha];
    support.extend_from_slice(nb);
    mass.extend(std::iter::repeat_n(share, nb.len()));
    Ok(MassDistribution {
        support,
        mass,
        alpha,
    })
}

/// Per-edge Ollivier-Ricci curvature of a projected subgraph.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RicciVector {
    /// Edges as global node ids.
    pub edges: Vec<(usize, usize)>,
    pub values: Vec<f64>,
}

impl RicciVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Hop distance between two nodes known to lie within three hops (both in
/// the closed neighbourhoods of the endpoints of one edge).
fn local_distance(g: &SimpleGraph, u: usize, v: usize) -> f64 {
    if u == v {
        0.0
    } else if g.has_edge(u, v) {
        1.0
    } else if shares_neighbor(g.neighbors(u), g.neighbors(v)) {
        2.0
    } else {
        3.0
    }
}

fn shares_neighbor(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// `1 - W(m_x, m_y) / d(x, y)` with hop distances.
pub fn ollivier_ricci_edge(
    graph: &SimpleGraph,
    x: usize,
    y: usize,
    alpha: f64,
) -> Result<f64, CurvatureError> {
    if x >= graph.len() || y >= graph.len() || !graph.has_edge(x, y) {
        return Err(CurvatureError::UnknownEdge(x, y));
    }
    let mx = mass_distribution(graph, x, alpha)?;
    let my = mass_distribution(graph, y, alpha)?;
    let w = wasserstein_exact(&mx, &my, |u, v| local_distance(graph, u, v))?;
    Ok(1.0 - w)
}

/// Curvature of every edge, computed in parallel.
pub fn ricci_vector(graph: &SimpleGraph, alpha: f64) -> Result<RicciVector, CurvatureError> {
    let edges = graph.edges();
    let values = edges
        .par_iter()
        .map(|&(a, b)| ollivier_ricci_edge(graph, a, b, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RicciVector {
        edges: edges
            .into_iter()
            .map(|(a, b)| (graph.nodes[a], graph.nodes[b]))
            .collect(),
        values,
    })
}
