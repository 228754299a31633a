//! Timestamped bipartite interaction networks, interval batching,
//! chronological splits and same-side projections.

mod ingest;
mod project;
mod simple;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ingest::{ingest, write_csv, IngestReport};
pub use project::{project_bipartite, project_records, ProjectedSubgraph};
pub(crate) use project::splitmix;
pub use simple::SimpleGraph;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("no records")]
    NoRecords,
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("need at least 3 records to split, got {0}")]
    TooFewRecords(usize),
    #[error("split ratios must be positive and sum to 1, got {0:?}")]
    InvalidRatios([f64; 3]),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Which side of the bipartite network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    User,
    Item,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::User, Side::Item];

    pub fn other(self) -> Side {
        match self {
            Side::User => Side::Item,
            Side::Item => Side::User,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::User => "user",
            Side::Item => "item",
        })
    }
}

impl FromStr for Side {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "user" => Ok(Side::User),
            "item" => Ok(Side::Item),
            _ => Err(GraphError::InvalidArgument(format!("unknown side `{s}`"))),
        }
    }
}

/// One timestamped user-item interaction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub user: usize,
    pub item: usize,
    pub timestamp: f64,
    pub label: Option<f64>,
    pub features: Vec<f64>,
}

impl InteractionRecord {
    pub fn new(user: usize, item: usize, timestamp: f64) -> Self {
        InteractionRecord {
            user,
            item,
            timestamp,
            label: None,
            features: Vec::new(),
        }
    }

    pub fn node(&self, side: Side) -> usize {
        match side {
            Side::User => self.user,
            Side::Item => self.item,
        }
    }
}

/// Time-ordered interaction records over dense user and item ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionNetwork {
    pub num_users: usize,
    pub num_items: usize,
    pub feature_dim: usize,
    pub records: Vec<InteractionRecord>,
    /// Original identifiers, indexed by dense id.
    pub user_names: Vec<String>,
    pub item_names: Vec<String>,
}

impl InteractionNetwork {
    /// Build from records with dense ids; sorts stably by timestamp.
    pub fn from_records(
        num_users: usize,
        num_items: usize,
        mut records: Vec<InteractionRecord>,
    ) -> Result<Self, GraphError> {
        let feature_dim = records.first().map_or(0, |r| r.features.len());
        for (k, r) in records.iter().enumerate() {
            if r.user >= num_users || r.item >= num_items {
                return Err(GraphError::InvalidArgument(format!(
                    "record {k}: id out of range"
                )));
            }
            if !(r.timestamp.is_finite() && r.timestamp >= 0.0) {
                return Err(GraphError::InvalidArgument(format!(
                    "record {k}: bad timestamp {}",
                    r.timestamp
                )));
            }
            if r.features.len() != feature_dim {
                return Err(GraphError::InvalidArgument(format!(
                    "record {k}: {} features, expected {feature_dim}",
                    r.features.len()
                )));
            }
        }
        records.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        Ok(InteractionNetwork {
            num_users,
            num_items,
            feature_dim,
            records,
            user_names: (0..num_users).map(|i| i.to_string()).collect(),
            item_names: (0..num_items).map(|i| i.to_string()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn num_nodes(&self, side: Side) -> usize {
        match side {
            Side::User => self.num_users,
            Side::Item => self.num_items,
        }
    }

    /// Content hash of ids, timestamps, labels and features.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update((self.num_users as u64).to_le_bytes());
        h.update((self.num_items as u64).to_le_bytes());
        for r in &self.records {
            h.update((r.user as u64).to_le_bytes());
            h.update((r.item as u64).to_le_bytes());
            h.update(r.timestamp.to_bits().to_le_bytes());
            h.update(r.label.map_or(u64::MAX, f64::to_bits).to_le_bytes());
            for f in &r.features {
                h.update(f.to_bits().to_le_bytes());
            }
        }
        hex::encode(&h.finalize()[..16])
    }

    pub fn time_span(&self) -> Option<(f64, f64)> {
        Some((self.records.first()?.timestamp, self.records.last()?.timestamp))
    }

    /// Same id space, different records.
    fn with_records(&self, records: Vec<InteractionRecord>) -> Self {
        InteractionNetwork {
            records,
            ..self.clone_header()
        }
    }

    fn clone_header(&self) -> Self {
        InteractionNetwork {
            num_users: self.num_users,
            num_items: self.num_items,
            feature_dim: self.feature_dim,
            records: Vec::new(),
            user_names: self.user_names.clone(),
            item_names: self.item_names.clone(),
        }
    }
}

/// Records of one time window plus per-node adjacency.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBatch {
    pub index: usize,
    pub start: f64,
    pub end: f64,
    pub records: Vec<InteractionRecord>,
    /// user → positions in `records`
    pub by_user: BTreeMap<usize, Vec<usize>>,
    /// item → positions in `records`
    pub by_item: BTreeMap<usize, Vec<usize>>,
}

impl IntervalBatch {
    pub fn new(index: usize, start: f64, end: f64, records: Vec<InteractionRecord>) -> Self {
        let mut by_user: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut by_item: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (k, r) in records.iter().enumerate() {
            by_user.entry(r.user).or_default().push(k);
            by_item.entry(r.item).or_default().push(k);
        }
        IntervalBatch {
            index,
            start,
            end,
            records,
            by_user,
            by_item,
        }
    }

    pub fn adjacency(&self, side: Side) -> &BTreeMap<usize, Vec<usize>> {
        match side {
            Side::User => &self.by_user,
            Side::Item => &self.by_item,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Split `[t_min, t_max]` into `n` equal-width windows. A timestamp on an
/// inner boundary belongs to the later window; `t_max` to the last one.
pub fn partition_intervals(
    net: &InteractionNetwork,
    n: usize,
) -> Result<Vec<IntervalBatch>, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidArgument("n_intervals must be >= 1".into()));
    }
    if n > net.len() {
        log::warn!(
            "{n} intervals for {} records; some batches will be empty",
            net.len()
        );
    }
    let (t0, t1) = net.time_span().unwrap_or((0.0, 0.0));
    let width = (t1 - t0) / n as f64;
    let boundary = |k: usize| if k == n { t1 } else { t0 + k as f64 * width };
    let mut buckets: Vec<Vec<InteractionRecord>> = vec![Vec::new(); n];
    for r in &net.records {
        buckets[window_of(r.timestamp, t0, t1, width, n)].push(r.clone());
    }
    Ok(buckets
        .into_iter()
        .enumerate()
        .map(|(k, recs)| IntervalBatch::new(k, boundary(k), boundary(k + 1), recs))
        .collect())
}

fn window_of(t: f64, t0: f64, t1: f64, width: f64, n: usize) -> usize {
    if t >= t1 || width <= 0.0 {
        return n - 1;
    }
    let mut k = (((t - t0) / width).floor().max(0.0) as usize).min(n - 1);
    while k + 1 < n && t >= t0 + (k + 1) as f64 * width {
        k += 1;
    }
    while k > 0 && t < t0 + k as f64 * width {
        k -= 1;
    }
    k
}

/// Earliest-first record-count split into train, validation and test.
pub fn chronological_split(
    net: &InteractionNetwork,
    ratios: [f64; 3],
) -> Result<(InteractionNetwork, InteractionNetwork, InteractionNetwork), GraphError> {
    let total: f64 = ratios.iter().sum();
    if ratios.iter().any(|r| !(*r > 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(GraphError::InvalidRatios(ratios));
    }
    let n = net.len();
    if n < 3 {
        return Err(GraphError::TooFewRecords(n));
    }
    let n_train = ((ratios[0] * n as f64).round() as usize).clamp(1, n - 2);
    let upto = ((ratios[0] + ratios[1]) * n as f64).round() as usize;
    let n_valid = upto.saturating_sub(n_train).clamp(1, n - n_train - 1);
    let recs = &net.records;
    Ok((
        net.with_records(recs[..n_train].to_vec()),
        net.with_records(recs[n_train..n_train + n_valid].to_vec()),
        net.with_records(recs[n_train + n_valid..].to_vec()),
    ))
}

/// Histogram degree → node count, where degree counts interactions.
pub fn degree_distribution(net: &InteractionNetwork, side: Side) -> BTreeMap<usize, usize> {
    let mut deg = vec![0usize; net.num_nodes(side)];
    for r in &net.records {
        deg[r.node(side)] += 1;
    }
    let mut hist = BTreeMap::new();
    for d in deg {
        *hist.entry(d).or_insert(0) += 1;
    }
    hist
}

#[cfg(test)]
mod tests;
