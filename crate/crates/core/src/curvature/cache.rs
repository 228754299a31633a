use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{observe_sectional, ricci_vector, CurvatureError, CurvatureObservation, RicciVector};
use crate::graph::{project_records, splitmix, IntervalBatch, InteractionRecord, Side};

pub const CACHE_VERSION: u32 = 1;

/// Settings of the per-interval curvature computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RicciConfig {
    pub alpha: f64,
    pub sample_ratio: f64,
    pub seed: u64,
    pub observe_iterations: usize,
    /// Project over all records up to the interval instead of the interval only.
    pub cumulative: bool,
}

impl Default for RicciConfig {
    fn default() -> Self {
        RicciConfig {
            alpha: 0.5,
            sample_ratio: 0.15,
            seed: 0,
            observe_iterations: 10,
            cumulative: false,
        }
    }
}

/// Everything that determines the cached values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RicciKey {
    pub version: u32,
    pub dataset: String,
    pub n_intervals: usize,
    pub config: RicciConfig,
}

impl RicciKey {
    pub fn new(dataset: &str, n_intervals: usize, config: &RicciConfig) -> Self {
        RicciKey {
            version: CACHE_VERSION,
            dataset: dataset.to_string(),
            n_intervals,
            config: config.clone(),
        }
    }

    pub fn namespace(&self) -> String {
        let text = serde_json::to_string(self).expect("key serialises");
        hex::encode(&Sha256::digest(text.as_bytes())[..8])
    }
}

/// Curvature data of one interval and side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalCurvature {
    pub interval: usize,
    pub side: Side,
    pub nodes: usize,
    pub ricci: RicciVector,
    /// `None` when the projected graph is too sparse to observe.
    pub observation: Option<CurvatureObservation>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    key: RicciKey,
    entry: IntervalCurvature,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub recomputed_edges: usize,
}

/// On-disk store of per-interval curvature, one directory per key.
#[derive(Debug)]
pub struct RicciCache {
    root: PathBuf,
    hits: AtomicUsize,
    misses: AtomicUsize,
    recomputed_edges: AtomicUsize,
}

impl RicciCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RicciCache {
            root: root.into(),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            recomputed_edges: AtomicUsize::new(0),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn namespace_dir(&self, key: &RicciKey) -> PathBuf {
        self.root.join(key.namespace())
    }

    fn file(&self, key: &RicciKey, interval: usize, side: Side) -> PathBuf {
        self.namespace_dir(key)
            .join(format!("interval_{interval}_{side}.json"))
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            recomputed_edges: self.recomputed_edges.load(Ordering::Relaxed),
        }
    }

    pub fn load(&self, key: &RicciKey, interval: usize, side: Side) -> Option<IntervalCurvature> {
        let path = self.file(key, interval, side);
        let text = fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<CacheFile>(&text) {
            Ok(f) if f.key == *key && f.entry.interval == interval && f.entry.side == side => {
                Some(f.entry)
            }
            Ok(_) => {
                log::warn!("{}: key mismatch, recomputing", path.display());
                None
            }
            Err(e) => {
                log::warn!("{}: corrupt cache entry ({e}), recomputing", path.display());
                None
            }
        }
    }

    pub fn store(&self, key: &RicciKey, entry: &IntervalCurvature) -> Result<(), CurvatureError> {
        let dir = self.namespace_dir(key);
        fs::create_dir_all(&dir)?;
        let meta = dir.join("key.json");
        if !meta.exists() {
            fs::write(&meta, serde_json::to_string_pretty(key).expect("key serialises"))?;
        }
        let path = self.file(key, entry.interval, entry.side);
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string(&CacheFile {
            key: key.clone(),
            entry: entry.clone(),
        })
        .map_err(|e| CurvatureError::Cache(e.to_string()))?;
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

fn compute(
    records: &[InteractionRecord],
    interval: usize,
    side: Side,
    cfg: &RicciConfig,
) -> Result<IntervalCurvature, CurvatureError> {
    let seed = splitmix(cfg.seed ^ splitmix(interval as u64));
    let g = project_records(records, side, cfg.sample_ratio, seed)?;
    let ricci = ricci_vector(&g, cfg.alpha)?;
    let observation = match observe_sectional(&g, cfg.observe_iterations, seed) {
        Ok(o) => Some(o),
        Err(CurvatureError::TooSparse) => None,
        Err(e) => return Err(e),
    };
    Ok(IntervalCurvature {
        interval,
        side,
        nodes: g.len(),
        ricci,
        observation,
    })
}

/// Ricci vectors and observations for every interval and both sides,
/// served from `cache` where possible. Result is indexed `[interval][side]`
/// with users first.
pub fn interval_curvatures(
    batches: &[IntervalBatch],
    dataset: &str,
    cfg: &RicciConfig,
    cache: Option<&RicciCache>,
) -> Result<Vec<[IntervalCurvature; 2]>, CurvatureError> {
    let key = RicciKey::new(dataset, batches.len(), cfg);
    let tasks: Vec<(usize, Side)> = (0..batches.len())
        .flat_map(|n| Side::BOTH.map(|s| (n, s)))
        .collect();
    let results = tasks
        .par_iter()
        .map(|&(n, side)| {
            if let Some(c) = cache {
                if let Some(hit) = c.load(&key, n, side) {
                    c.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(hit);
                }
            }
            let entry = if cfg.cumulative {
                let recs: Vec<InteractionRecord> = batches[..=n]
                    .iter()
                    .flat_map(|b| b.records.iter().cloned())
                    .collect();
                compute(&recs, n, side, cfg)?
            } else {
                compute(&batches[n].records, n, side, cfg)?
            };
            if let Some(c) = cache {
                c.misses.fetch_add(1, Ordering::Relaxed);
                c.recomputed_edges
                    .fetch_add(entry.ricci.len(), Ordering::Relaxed);
                c.store(&key, &entry)?;
            }
            Ok(entry)
        })
        .collect::<Result<Vec<_>, CurvatureError>>()?;
    let mut it = results.into_iter();
    let mut out = Vec::with_capacity(batches.len());
    while let (Some(u), Some(i)) = (it.next(), it.next()) {
        out.push([u, i]);
    }
    Ok(out)
}
