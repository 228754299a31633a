use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GraphError, IntervalBatch, InteractionRecord, Side, SimpleGraph};

/// Same-side graph of one interval.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedSubgraph {
    pub graph: SimpleGraph,
    pub interval: usize,
    pub side: Side,
}

/// Link nodes of `side` that share a neighbour in `batch`, sampling
/// `ceil(sample_ratio * candidates)` co-neighbours per node.
pub fn project_bipartite(
    batch: &IntervalBatch,
    side: Side,
    sample_ratio: f64,
    seed: u64,
) -> Result<ProjectedSubgraph, GraphError> {
    let graph = project_records(&batch.records, side, sample_ratio, seed)?;
    Ok(ProjectedSubgraph {
        graph,
        interval: batch.index,
        side,
    })
}

/// Projection over an arbitrary record set (used for cumulative windows).
pub fn project_records(
    records: &[InteractionRecord],
    side: Side,
    sample_ratio: f64,
    seed: u64,
) -> Result<SimpleGraph, GraphError> {
    if !(sample_ratio > 0.0 && sample_ratio <= 1.0) {
        return Err(GraphError::InvalidArgument(format!(
            "sample_ratio {sample_ratio} outside (0, 1]"
        )));
    }
    let other = side.other();
    let mut own: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut via: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for r in records {
        own.entry(r.node(side)).or_default().insert(r.node(other));
        via.entry(r.node(other)).or_default().insert(r.node(side));
    }
    let nodes: Vec<usize> = own.keys().copied().collect();
    let local: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut edges = BTreeSet::new();
    for (&v, partners) in &own {
        let mut cand = BTreeSet::new();
        for p in partners {
            cand.extend(via[p].iter().copied().filter(|&w| w != v));
        }
        if cand.is_empty() {
            continue;
        }
        let cand: Vec<usize> = cand.into_iter().collect();
        let k = ((sample_ratio * cand.len() as f64).ceil() as usize).min(cand.len());
        let mut rng = ChaCha8Rng::seed_from_u64(node_seed(seed, side, v));
        let mut picked = index::sample(&mut rng, cand.len(), k).into_vec();
        picked.sort_unstable();
        for j in picked {
            let (a, b) = (local[&v], local[&cand[j]]);
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut g = SimpleGraph::with_nodes(nodes);
    for (a, b) in edges {
        g.add_edge(a, b);
    }
    Ok(g)
}

fn node_seed(seed: u64, side: Side, node: usize) -> u64 {
    let tag = match side {
        Side::User => 0x5555_5555_5555_5555u64,
        Side::Item => 0xAAAA_AAAA_AAAA_AAAAu64,
    };
    splitmix(seed ^ splitmix(tag ^ node as u64))
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
