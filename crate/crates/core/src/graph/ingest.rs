use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use super::{GraphError, InteractionNetwork, InteractionRecord};

/// Summary of an ingested file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IngestReport {
    pub records: usize,
    pub users: usize,
    pub items: usize,
    pub feature_dim: usize,
    pub has_label: bool,
    pub t_min: f64,
    pub t_max: f64,
    /// Rows whose position changed when sorting by timestamp.
    pub reordered: usize,
}

struct RawRow {
    user: String,
    item: String,
    record: InteractionRecord,
}

/// Read `user_id,item_id,timestamp[,state_label][,features...]` with a
/// header line. Ids are re-indexed densely by first appearance in time
/// order.
pub fn ingest(path: &Path) -> Result<(InteractionNetwork, IngestReport), GraphError> {
    let file = std::fs::File::open(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ingest_reader(file)
}

pub(crate) fn ingest_reader<R: Read>(
    reader: R,
) -> Result<(InteractionNetwork, IngestReport), GraphError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| GraphError::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.len() < 3 {
        return Err(GraphError::Malformed {
            line: 1,
            message: "header needs user_id,item_id,timestamp".into(),
        });
    }
    let has_label = headers.get(3).is_some_and(|h| h.contains("label"));
    let feat_start = if has_label { 4 } else { 3 };

    let mut rows = Vec::new();
    let mut feature_dim = None;
    for result in rdr.records() {
        let rec = result.map_err(|e| GraphError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let bad = |message: String| GraphError::Malformed { line, message };
        if rec.len() < 3 {
            return Err(bad(format!("expected at least 3 fields, got {}", rec.len())));
        }
        let num = |k: usize, what: &str| -> Result<f64, GraphError> {
            rec[k]
                .parse::<f64>()
                .map_err(|_| bad(format!("{what} `{}` is not a number", &rec[k])))
        };
        let timestamp = num(2, "timestamp")?;
        if !(timestamp.is_finite() && timestamp >= 0.0) {
            return Err(bad(format!("timestamp {timestamp} must be finite and >= 0")));
        }
        let label = if has_label && rec.len() > 3 {
            Some(num(3, "label")?)
        } else {
            None
        };
        let features = (feat_start..rec.len())
            .map(|k| num(k, "feature"))
            .collect::<Result<Vec<_>, _>>()?;
        match feature_dim {
            None => feature_dim = Some(features.len()),
            Some(d) if d != features.len() => {
                return Err(bad(format!("{} features, expected {d}", features.len())))
            }
            _ => {}
        }
        rows.push(RawRow {
            user: rec[0].to_string(),
            item: rec[1].to_string(),
            record: InteractionRecord {
                user: 0,
                item: 0,
                timestamp,
                label,
                features,
            },
        });
    }
    if rows.is_empty() {
        return Err(GraphError::NoRecords);
    }

    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].record.timestamp.total_cmp(&rows[b].record.timestamp));
    let reordered = order.iter().enumerate().filter(|(k, &o)| *k != o).count();
    if reordered > 0 {
        log::warn!("{reordered} rows were out of time order and have been sorted");
    }

    let mut users: HashMap<String, usize> = HashMap::new();
    let mut items: HashMap<String, usize> = HashMap::new();
    let mut user_names = Vec::new();
    let mut item_names = Vec::new();
    let mut records = Vec::with_capacity(rows.len());
    for k in order {
        let row = &rows[k];
        let u = *users.entry(row.user.clone()).or_insert_with(|| {
            user_names.push(row.user.clone());
            user_names.len() - 1
        });
        let i = *items.entry(row.item.clone()).or_insert_with(|| {
            item_names.push(row.item.clone());
            item_names.len() - 1
        });
        let mut r = row.record.clone();
        r.user = u;
        r.item = i;
        records.push(r);
    }
    let net = InteractionNetwork {
        num_users: user_names.len(),
        num_items: item_names.len(),
        feature_dim: feature_dim.unwrap_or(0),
        records,
        user_names,
        item_names,
    };
    let (t_min, t_max) = net.time_span().unwrap_or((0.0, 0.0));
    let report = IngestReport {
        records: net.len(),
        users: net.num_users,
        items: net.num_items,
        feature_dim: net.feature_dim,
        has_label,
        t_min,
        t_max,
        reordered,
    };
    log::info!(
        "ingested {} records, {} users, {} items",
        report.records,
        report.users,
        report.items
    );
    Ok((net, report))
}

/// Write the network with dense ids in the ingestible format.
pub fn write_csv(net: &InteractionNetwork, path: &Path) -> Result<(), GraphError> {
    let io = |e: csv::Error| GraphError::Io {
        path: path.display().to_string(),
        source: e.into(),
    };
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(io)?;
    let has_label = net.records.iter().any(|r| r.label.is_some());
    let mut header = vec!["user_id".to_string(), "item_id".into(), "timestamp".into()];
    if has_label {
        header.push("state_label".into());
    }
    header.extend((0..net.feature_dim).map(|k| format!("f{k}")));
    w.write_record(&header).map_err(io)?;
    for r in &net.records {
        let mut row = vec![r.user.to_string(), r.item.to_string(), r.timestamp.to_string()];
        if has_label {
            row.push(r.label.unwrap_or(0.0).to_string());
        }
        row.extend(r.features.iter().map(|f| f.to_string()));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })
}
