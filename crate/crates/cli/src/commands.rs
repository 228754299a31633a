use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use coevolve_core::curvature::{
    delta_hyperbolicity, interval_curvatures, ricci_vector, RicciCache, RicciKey,
};
use coevolve_core::graph::{
    chronological_split, degree_distribution, ingest as read_csv, partition_intervals, project_bipartite, write_csv,
    InteractionNetwork, Side, SimpleGraph,
};
use coevolve_core::train_eval::{evaluate as eval_model, restore, train as train_model, Mode, Model};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::CliError;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::User(format!("{}: {e}", path.display()))
}

fn print_json(v: &Value) {
    // a closed pipe downstream is not an error worth reporting
    let text = serde_json::to_string_pretty(v).expect("json value serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn load_split(cfg: &RunConfig) -> Result<(InteractionNetwork, [InteractionNetwork; 3]), CliError> {
    let (net, _) = read_csv(cfg.dataset()?)?;
    let (tr, va, te) = chronological_split(&net, cfg.split)?;
    Ok((net, [tr, va, te]))
}

pub fn ingest(data: &Path, out: Option<&Path>, dry_run: bool) -> Result<(), CliError> {
    let (net, report) = read_csv(data)?;
    let value = serde_json::to_value(&report).expect("report serializes");
    if !dry_run {
        let out = out.ok_or_else(|| CliError::User("--out is required unless --dry-run".into()))?;
        fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
        write_csv(&net, &out.join("dataset.csv"))?;
        let path = out.join("report.json");
        fs::write(&path, serde_json::to_string_pretty(&value).expect("json")).map_err(|e| io_err(&path, e))?;
    }
    eprintln!(
        "{} records, {} users, {} items, {} feature columns",
        report.records, report.users, report.items, report.feature_dim
    );
    print_json(&value);
    Ok(())
}

fn cache_dir(cfg: &RunConfig) -> PathBuf {
    cfg.cache_dir.clone().unwrap_or_else(|| PathBuf::from("ricci_cache"))
}

pub fn precompute_ricci(cfg: &RunConfig, intervals: &[usize]) -> Result<(), CliError> {
    cfg.train.validate()?;
    let (_, [train, _, _]) = load_split(cfg)?;
    let counts = if intervals.is_empty() {
        vec![cfg.train.n_intervals]
    } else {
        intervals.to_vec()
    };
    let ricci = cfg.train.ricci();
    let fingerprint = train.fingerprint();
    let root = cache_dir(cfg);
    let mut rows = Vec::new();
    for &n in &counts {
        if n == 0 {
            return Err(CliError::User("interval counts must be positive".into()));
        }
        let cache = RicciCache::new(&root);
        let batches = partition_intervals(&train, n)?;
        interval_curvatures(&batches, &fingerprint, &ricci, Some(&cache))?;
        let stats = cache.stats();
        let key = RicciKey::new(&fingerprint, n, &ricci);
        eprintln!(
            "{n} intervals: namespace {}, {} hits, {} recomputed entries ({} edges)",
            key.namespace(),
            stats.hits,
            stats.misses,
            stats.recomputed_edges
        );
        rows.push(json!({
            "n_intervals": n,
            "namespace": key.namespace(),
            "entries": 2 * n,
            "hits": stats.hits,
            "misses": stats.misses,
            "recomputed_edges": stats.recomputed_edges,
        }));
    }
    print_json(&json!({ "cache_dir": root, "namespaces": rows }));
    Ok(())
}

pub fn train(cfg: &RunConfig, compute_missing: bool) -> Result<(), CliError> {
    let t = &cfg.train;
    t.validate()?;
    let out = cfg
        .out_dir
        .clone()
        .ok_or_else(|| CliError::User("no output directory (--out or `out_dir =`)".into()))?;
    let (_, [train, valid, _]) = load_split(cfg)?;
    let batches = partition_intervals(&train, t.n_intervals)?;
    let cache = RicciCache::new(cache_dir(cfg));
    let fingerprint = train.fingerprint();
    let key = RicciKey::new(&fingerprint, t.n_intervals, &t.ricci());
    if t.mode == Mode::Full && !compute_missing {
        let missing = (0..batches.len())
            .flat_map(|n| Side::BOTH.map(|s| (n, s)))
            .filter(|&(n, s)| cache.load(&key, n, s).is_none())
            .count();
        if missing > 0 {
            return Err(CliError::User(format!(
                "{missing} Ricci cache entries missing under {}; run precompute-ricci or pass --compute-missing",
                cache.namespace_dir(&key).display()
            )));
        }
    }
    fs::create_dir_all(&out).map_err(|e| io_err(&out, e))?;
    let metrics_path = out.join("metrics.jsonl");
    let mut metrics = BufWriter::new(File::create(&metrics_path).map_err(|e| io_err(&metrics_path, e))?);
    let mut write_err = None;
    let outcome = train_model(&train, Some(&valid), t, Some(&cache), |line| {
        let res = serde_json::to_writer(&mut metrics, line)
            .map_err(std::io::Error::from)
            .and_then(|_| metrics.write_all(b"\n"))
            .and_then(|_| metrics.flush());
        if let Err(e) = res {
            write_err.get_or_insert(e);
        }
        eprintln!(
            "epoch {:>3}  loss {:>12.4}  kappa ({:+.3}, {:+.3})  val mrr {}",
            line.epoch,
            line.loss,
            line.kappa_u,
            line.kappa_i,
            line.val_mrr.map_or("-".into(), |m| format!("{m:.4}"))
        );
    });
    if let Some(e) = write_err {
        return Err(CliError::Internal(format!("writing {}: {e}", metrics_path.display())));
    }
    let outcome = outcome?;
    outcome.model.checkpoint(&out.join("model.json"))?;
    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": "train",
        "mode": t.mode,
        "seed": t.seed,
        "config_hash": t.fingerprint(),
        "config": cfg,
        "dataset_fingerprint": fingerprint,
        "ricci_namespace": key.namespace(),
        "epochs_run": outcome.log.len(),
        "best_epoch": outcome.best_epoch,
    });
    let path = out.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest).expect("json")).map_err(|e| io_err(&path, e))?;
    eprintln!("best epoch {}; wrote {}", outcome.best_epoch, out.display());
    Ok(())
}

fn checked_model(path: &Path, net: &InteractionNetwork) -> Result<Model, CliError> {
    if !path.exists() {
        return Err(CliError::User(format!("checkpoint {} not found", path.display())));
    }
    let model = restore(path)?;
    if model.config.num_users != net.num_users || model.config.num_items != net.num_items {
        return Err(CliError::User(format!(
            "checkpoint has {} users / {} items but the dataset has {} / {}",
            model.config.num_users, model.config.num_items, net.num_users, net.num_items
        )));
    }
    Ok(model)
}

pub fn evaluate(cfg: &RunConfig, checkpoint: &Path, extra_k: &[usize]) -> Result<(), CliError> {
    if extra_k.contains(&0) {
        return Err(CliError::User("--k must be positive".into()));
    }
    let (net, [_, _, test]) = load_split(cfg)?;
    let model = checked_model(checkpoint, &net)?;
    let mut ks = vec![10];
    ks.extend_from_slice(extra_k);
    ks.sort_unstable();
    ks.dedup();
    let report = eval_model(&model, &test, &ks);
    let mut out = serde_json::Map::new();
    out.insert("mrr".into(), json!(report.mrr));
    for (k, r) in &report.recall {
        out.insert(format!("recall@{k}"), json!(r));
    }
    out.insert("queries".into(), json!(report.queries));
    out.insert("unseen_users".into(), json!(report.unseen_users));
    out.insert("unseen_items".into(), json!(report.unseen_items));
    eprintln!("{} test queries, MRR {:.4}", report.queries, report.mrr);
    print_json(&Value::Object(out));
    Ok(())
}

pub struct AnalyzeOpts {
    pub delta: bool,
    pub degrees: bool,
    pub ricci: bool,
    pub side: String,
    pub interval: String,
    pub node_cap: usize,
}

/// At most `cap` nodes of the largest component, grown breadth-first from
/// its highest-degree node so the sample stays connected.
fn connected_sample(g: &SimpleGraph, cap: usize) -> SimpleGraph {
    let big = g.largest_component();
    if big.len() <= cap {
        return big;
    }
    let hub = (0..big.len()).max_by_key(|&v| (big.degree(v), std::cmp::Reverse(v))).unwrap_or(0);
    let dist = big.bfs(hub);
    let mut order: Vec<usize> = (0..big.len()).collect();
    order.sort_by_key(|&v| (dist[v], v));
    order.truncate(cap);
    order.sort_unstable();
    big.induced(&order)
}

pub fn analyze(cfg: &RunConfig, opts: AnalyzeOpts) -> Result<(), CliError> {
    if !(opts.delta || opts.degrees || opts.ricci) {
        return Err(CliError::User("choose at least one of --delta, --degrees, --ricci".into()));
    }
    let sides: Vec<Side> = match opts.side.as_str() {
        "both" => Side::BOTH.to_vec(),
        s => vec![s
            .parse::<Side>()
            .map_err(|_| CliError::User(format!("unknown side `{s}`")))?],
    };
    let (net, _) = read_csv(cfg.dataset()?)?;
    let mut out = serde_json::Map::new();
    if opts.degrees {
        let mut d = serde_json::Map::new();
        for &s in &sides {
            d.insert(s.to_string(), json!(degree_distribution(&net, s)));
        }
        out.insert("degrees".into(), Value::Object(d));
    }
    if opts.delta || opts.ricci {
        let t = &cfg.train;
        let batches = partition_intervals(&net, t.n_intervals)?;
        let n = batches.len();
        let picked: Vec<usize> = match opts.interval.as_str() {
            "start" => vec![0],
            "middle" => vec![n / 2],
            "end" => vec![n - 1],
            "all" => (0..n).collect(),
            other => match other.parse::<usize>() {
                Ok(k) if k < n => vec![k],
                _ => return Err(CliError::User(format!("bad --interval `{other}`"))),
            },
        };
        let mut rows = Vec::new();
        for &k in &picked {
            for &s in &sides {
                let proj = project_bipartite(&batches[k], s, t.sample_ratio, t.seed)?;
                let g = &proj.graph;
                let mut row = serde_json::Map::new();
                row.insert("interval".into(), json!(k));
                row.insert("side".into(), json!(s));
                row.insert("nodes".into(), json!(g.len()));
                row.insert("edges".into(), json!(g.num_edges()));
                if opts.delta {
                    let sample = connected_sample(g, opts.node_cap);
                    let delta = delta_hyperbolicity(&sample, opts.node_cap)?;
                    row.insert("delta".into(), json!(delta));
                    row.insert("delta_nodes".into(), json!(sample.len()));
                }
                if opts.ricci {
                    let rv = ricci_vector(g, t.alpha)?;
                    let v = &rv.values;
                    let summary = if v.is_empty() {
                        json!({ "count": 0 })
                    } else {
                        json!({
                            "count": v.len(),
                            "min": v.iter().copied().fold(f64::INFINITY, f64::min),
                            "mean": v.iter().sum::<f64>() / v.len() as f64,
                            "max": v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                        })
                    };
                    row.insert("ricci".into(), summary);
                }
                rows.push(Value::Object(row));
            }
        }
        out.insert("intervals".into(), Value::Array(rows));
    }
    let summary: BTreeMap<&str, usize> = [("users", net.num_users), ("items", net.num_items), ("records", net.len())].into();
    eprintln!("{summary:?}");
    print_json(&Value::Object(out));
    Ok(())
}

pub fn predict(cfg: &RunConfig, checkpoint: &Path, user: &str, k: usize) -> Result<(), CliError> {
    let (net, _) = read_csv(cfg.dataset()?)?;
    let model = checked_model(checkpoint, &net)?;
    let uid = net
        .user_names
        .iter()
        .position(|n| n == user)
        .ok_or_else(|| CliError::User(format!("unknown user `{user}`")))?;
    let items: Vec<Value> = model
        .top_k(uid, k)
        .into_iter()
        .map(|(i, p)| json!({ "item": net.item_names[i], "score": p }))
        .collect();
    print_json(&json!({ "user": user, "items": items }));
    Ok(())
}
