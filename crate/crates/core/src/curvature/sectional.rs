use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CurvatureError;
use crate::graph::SimpleGraph;

/// Sampled global sectional curvature of a graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureObservation {
    pub kappa_o: f64,
    pub samples_used: usize,
    pub nodes_used: usize,
    /// Standard error of the pooled per-sample values.
    pub std_error: f64,
    pub seed: u64,
}

/// `γ(m; b, c; a)` from hop distances `d(a,m)`, `d(b,c)`, `d(a,b)`, `d(a,c)`.
pub fn sectional_sample(dam: f64, dbc: f64, dab: f64, dac: f64) -> f64 {
    let gamma = dam * dam + dbc * dbc / 4.0 - (dab * dab + dac * dac) / 2.0;
    gamma / (2.0 * dam)
}

fn node_rng(seed: u64, node: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(crate::graph::splitmix(seed ^ crate::graph::splitmix(node as u64)))
}

/// Average over eligible nodes `m` (degree ≥ 2) of the mean of
/// `iterations` sampled parallelogram defects with `b ≠ c` neighbours of
/// `m` and `a ≠ m` drawn from the component of `m`.
pub fn observe_sectional(
    graph: &SimpleGraph,
    iterations: usize,
    seed: u64,
) -> Result<CurvatureObservation, CurvatureError> {
    if iterations == 0 {
        return Err(CurvatureError::TooSparse);
    }
    let mut comp_of = vec![0usize; graph.len()];
    let comps = graph.components();
    for (k, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = k;
        }
    }
    let eligible: Vec<usize> = (0..graph.len())
        .filter(|&m| graph.degree(m) >= 2 && comps[comp_of[m]].len() >= 3)
        .collect();
    if eligible.is_empty() {
        return Err(CurvatureError::TooSparse);
    }
    let per_node: Vec<Vec<f64>> = eligible
        .par_iter()
        .map(|&m| {
            let mut rng = node_rng(seed, graph.nodes[m]);
            let nb = graph.neighbors(m);
            let comp = &comps[comp_of[m]];
            let m_pos = comp.binary_search(&m).unwrap();
            (0..iterations)
                .map(|_| {
                    let bi = rng.gen_range(0..nb.len());
                    let mut ci = rng.gen_range(0..nb.len() - 1);
                    if ci >= bi {
                        ci += 1;
                    }
                    let (b, c) = (nb[bi], nb[ci]);
                    let mut k = rng.gen_range(0..comp.len() - 1);
                    if k >= m_pos {
                        k += 1;
                    }
                    let a = comp[k];
                    let d = graph.bfs(a);
                    let dbc = if graph.has_edge(b, c) { 1.0 } else { 2.0 };
                    sectional_sample(d[m] as f64, dbc, d[b] as f64, d[c] as f64)
                })
                .collect()
        })
        .collect();
    let means: Vec<f64> = per_node
        .iter()
        .map(|s| s.iter().sum::<f64>() / s.len() as f64)
        .collect();
    let kappa_o = means.iter().sum::<f64>() / means.len() as f64;
    let all: Vec<f64> = per_node.into_iter().flatten().collect();
    let n = all.len() as f64;
    let mean = all.iter().sum::<f64>() / n;
    let var = if all.len() > 1 {
        all.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(CurvatureObservation {
        kappa_o,
        samples_used: all.len(),
        nodes_used: eligible.len(),
        std_error: (var / n).sqrt(),
        seed,
    })
}

/// Gromov four-point δ with hop distances, exact over all quadruples.
pub fn delta_hyperbolicity(graph: &SimpleGraph, node_cap: usize) -> Result<f64, CurvatureError> {
    let n = graph.len();
    if n > node_cap {
        return Err(CurvatureError::TooLarge { nodes: n, cap: node_cap });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let d = graph.all_pairs();
    if d[0].contains(&u32::MAX) {
        return Err(CurvatureError::NotConnected);
    }
    let twice = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut best = 0u32;
            for y in x + 1..n {
                for z in y + 1..n {
                    for w in z + 1..n {
                        let mut s = [
                            d[x][y] + d[z][w],
                            d[x][z] + d[y][w],
                            d[x][w] + d[y][z],
                        ];
                        s.sort_unstable();
                        best = best.max(s[2] - s[1]);
                    }
                }
            }
            best
        })
        .max()
        .unwrap_or(0);
    Ok(twice as f64 / 2.0)
}
