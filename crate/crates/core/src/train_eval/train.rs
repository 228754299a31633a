use serde::{Deserialize, Serialize};

use super::{evaluate, Mode, Model, TrainConfig, TrainError};
use crate::curvature::{estimate_curvature, interval_curvatures, IntervalCurvature, RicciCache};
use crate::diff::{adam_step, Tape, Var};
use crate::graph::{partition_intervals, splitmix, IntervalBatch, InteractionNetwork};
use crate::manifold::Curvature;
use crate::model::{aggregate_interval, loss, negative_sample, score, LossTerms, ModelConfig, ModelParams};
use crate::scalar::Real;

/// One metrics line per epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean loss over supervised intervals.
    pub loss: f64,
    pub kappa_u: f64,
    pub kappa_i: f64,
    pub val_mrr: Option<f64>,
    pub val_recall10: Option<f64>,
}

#[derive(Debug)]
pub struct TrainOutcome {
    /// Best model by validation MRR (last epoch without validation data).
    pub model: Model,
    pub log: Vec<EpochLog>,
    pub best_epoch: usize,
}

fn next_kappa<S: Real>(
    mode: Mode,
    cfg: &TrainConfig,
    params: &ModelParams<S>,
    curv: Option<&[IntervalCurvature; 2]>,
    current: [f64; 2],
) -> ([S; 2], Vec<S>) {
    match mode {
        Mode::Full => {
            let mut penalties = Vec::new();
            let mut out = [S::zero(); 2];
            for side in 0..2 {
                let c = curv.map(|c| &c[side]);
                let ricci: &[f64] = c.map_or(&[], |c| c.ricci.values.as_slice());
                let est = estimate_curvature(&params.curv, ricci, Some(S::from_f64(current[side])));
                let k = est.kappa.clamp(-cfg.curvature_bound, cfg.curvature_bound);
                if !est.carried {
                    if let Some(obs) = c.and_then(|c| c.observation.as_ref()) {
                        penalties.push(k - S::from_f64(obs.kappa_o));
                    }
                }
                out[side] = k;
            }
            (out, penalties)
        }
        _ => (current.map(S::from_f64), Vec::new()),
    }
}

/// Nodes whose state has moved off the table during the current pass.
struct Touched {
    users: Vec<bool>,
    items: Vec<bool>,
}

/// Replace table rows of touched nodes by their (constant) current state.
fn overlay<S: Real>(p: &mut ModelParams<S>, model: &Model, touched: &Touched) {
    let d = model.config.dim;
    for (table, state, flags) in [
        (&mut p.user_table, &model.user_state, &touched.users),
        (&mut p.item_table, &model.item_state, &touched.items),
    ] {
        for (r, _) in flags.iter().enumerate().filter(|(_, t)| **t) {
            for (dst, src) in table.data[r * d..(r + 1) * d].iter_mut().zip(state.row(r)) {
                *dst = S::from_f64(*src);
            }
        }
    }
}

fn stream(seed: u64, epoch: usize, interval: usize) -> u64 {
    splitmix(seed ^ splitmix((epoch as u64) << 32 | interval as u64))
}

/// Loss of interval `batch` aggregated at `kappa`, scored against the records
/// of `next` and the given negatives.
#[derive(Clone, Debug)]
pub struct IntervalLoss<S> {
    pub terms: LossTerms<S>,
    pub positives: Vec<((usize, usize), S)>,
    pub negatives: Vec<((usize, usize), S)>,
}

#[allow(clippy::too_many_arguments)]
pub fn interval_loss<S: Real>(
    p: &ModelParams<S>,
    mc: &ModelConfig,
    cfg: &TrainConfig,
    batch: &IntervalBatch,
    next: &IntervalBatch,
    curv: Option<&[IntervalCurvature; 2]>,
    kappa: [f64; 2],
    negatives: &[(usize, usize)],
) -> IntervalLoss<S> {
    let (k_next, penalties) = next_kappa::<S>(cfg.mode, cfg, p, curv, kappa);
    let ku = Curvature::new(S::from_f64(kappa[0]));
    let ki = Curvature::new(S::from_f64(kappa[1]));
    let out = aggregate_interval(p, mc, batch, &ku, &ki);
    let (nu, ni) = (Curvature::new(k_next[0]), Curvature::new(k_next[1]));
    let user = |u: usize| out.users.get(&u).cloned().unwrap_or_else(|| p.user_table.row(u).to_vec());
    let item = |i: usize| out.items.get(&i).cloned().unwrap_or_else(|| p.item_table.row(i).to_vec());
    let prob = |&(u, i): &(usize, usize)| ((u, i), score(&user(u), &item(i), &nu, &ni, p.rho, mc.fd_r, mc.fd_t));
    let positives: Vec<_> = next.records.iter().map(|r| prob(&(r.user, r.item))).collect();
    let negatives: Vec<_> = negatives.iter().map(prob).collect();
    let pos: Vec<S> = positives.iter().map(|x| x.1).collect();
    let neg: Vec<S> = negatives.iter().map(|x| x.1).collect();
    IntervalLoss {
        terms: loss(&pos, &neg, &penalties),
        positives,
        negatives,
    }
}

/// One supervised step on interval `n` against the records of `next`.
#[allow(clippy::too_many_arguments)]
fn supervised_step(
    model: &mut Model,
    cfg: &TrainConfig,
    batch: &IntervalBatch,
    next: &IntervalBatch,
    curv: Option<&[IntervalCurvature; 2]>,
    kappa: [f64; 2],
    epoch: usize,
    touched: &Touched,
) -> Result<f64, TrainError> {
    let tape = Tape::with_capacity(1 << 16);
    let bound = model.store.bind(&tape);
    let mut p = ModelParams::bind(&model.config, model.layout(), &bound);
    overlay(&mut p, model, touched);
    let positives: Vec<(usize, usize)> = next.records.iter().map(|r| (r.user, r.item)).collect();
    let negatives = negative_sample(
        &positives,
        model.config.num_items,
        cfg.neg_rate,
        cfg.neg_per_positive,
        stream(cfg.seed, epoch, batch.index),
    );
    let il: IntervalLoss<Var> = interval_loss(&p, &model.config, cfg, batch, next, curv, kappa, &negatives);
    let value = il.terms.total.value();
    if !value.is_finite() {
        let culprit = il
            .positives
            .iter()
            .chain(&il.negatives)
            .find(|(_, p)| !p.value().is_finite())
            .map_or("curvature penalty".to_string(), |(e, _)| format!("edge {e:?}"));
        return Err(TrainError::NonFinite {
            epoch,
            interval: batch.index,
            detail: culprit,
        });
    }
    let grads = tape.gradient(il.terms.total)?;
    model.store.accumulate(&bound, &grads);
    drop(bound);
    adam_step(&mut model.store, &cfg.adam());
    clip_tables(model);
    Ok(value)
}

/// Recompute the interval with current parameters and move the active nodes'
/// state forward; returns the next curvatures.
fn advance(
    model: &mut Model,
    cfg: &TrainConfig,
    batch: &IntervalBatch,
    curv: Option<&[IntervalCurvature; 2]>,
    kappa: [f64; 2],
    touched: &mut Touched,
) -> [f64; 2] {
    let mut p = model.params();
    overlay(&mut p, model, touched);
    let (k_next, _) = next_kappa::<f64>(cfg.mode, cfg, &p, curv, kappa);
    let out = aggregate_interval(
        &p,
        &model.config,
        batch,
        &Curvature::new(kappa[0]),
        &Curvature::new(kappa[1]),
    );
    let d = model.config.dim;
    for (u, v) in &out.users {
        model.user_state.data[u * d..(u + 1) * d].copy_from_slice(v);
        touched.users[*u] = true;
    }
    for (i, v) in &out.items {
        model.item_state.data[i * d..(i + 1) * d].copy_from_slice(v);
        touched.items[*i] = true;
    }
    k_next
}

/// Nodes idle for the whole pass sit at their (updated) table rows.
fn sync_untouched(model: &mut Model, touched: &Touched) {
    let d = model.config.dim;
    let (ut, it) = (model.layout().user_table, model.layout().item_table);
    for (r, _) in touched.users.iter().enumerate().filter(|(_, t)| !**t) {
        let row = &model.store.value(ut)[r * d..(r + 1) * d];
        model.user_state.data[r * d..(r + 1) * d].copy_from_slice(row);
    }
    for (r, _) in touched.items.iter().enumerate().filter(|(_, t)| !**t) {
        let row = &model.store.value(it)[r * d..(r + 1) * d];
        model.item_state.data[r * d..(r + 1) * d].copy_from_slice(row);
    }
}

fn clip_tables(model: &mut Model) {
    let (d, max_norm) = (model.config.dim, model.config.max_norm);
    let ids = [model.layout().user_table, model.layout().item_table];
    for id in ids {
        for row in model.store.value_mut(id).chunks_mut(d) {
            let n = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > max_norm {
                row.iter_mut().for_each(|x| *x *= max_norm / n);
            }
        }
    }
}

/// Train on `train`, selecting the epoch with the best validation MRR.
/// `on_epoch` sees every log line as soon as it is produced.
pub fn train(
    train: &InteractionNetwork,
    valid: Option<&InteractionNetwork>,
    cfg: &TrainConfig,
    cache: Option<&RicciCache>,
    mut on_epoch: impl FnMut(&EpochLog),
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    let batches = partition_intervals(train, cfg.n_intervals)?;
    let curvs = match cfg.mode {
        Mode::Full => Some(interval_curvatures(
            &batches,
            &train.fingerprint(),
            &cfg.ricci(),
            cache,
        )?),
        _ => None,
    };
    let (t0, t1) = train.time_span().unwrap_or((0.0, 1.0));
    let mut mc = ModelConfig::new(train.num_users, train.num_items, cfg.embedding_dim);
    mc.feature_dim = train.feature_dim;
    mc.fusion = cfg.fusion;
    mc.fd_r = cfg.fd_r;
    mc.fd_t = cfg.fd_t;
    mc.curvature_bound = cfg.curvature_bound;
    mc.max_norm = cfg.max_norm;
    mc.time_origin = t0;
    mc.time_scale = if t1 > t0 { t1 - t0 } else { 1.0 };
    let mut model = Model::new(mc, cfg.seed, cfg.start_kappa())?;
    for r in &train.records {
        model.user_seen[r.user] = true;
        model.item_seen[r.item] = true;
    }

    let ks = [cfg.eval_k.min(10), cfg.eval_k.max(10)];
    let mut log = Vec::new();
    let mut best: Option<(f64, usize, Model)> = None;
    let mut stale = 0;
    for epoch in 1..=cfg.epochs {
        let mut kappa = cfg.start_kappa();
        let mut touched = Touched {
            users: vec![false; train.num_users],
            items: vec![false; train.num_items],
        };
        let mut schedule = vec![kappa];
        let (mut total, mut steps) = (0.0, 0usize);
        for n in 0..batches.len() {
            let curv = curvs.as_ref().map(|c| &c[n]);
            if n + 1 < batches.len() && !batches[n + 1].is_empty() {
                total += supervised_step(&mut model, cfg, &batches[n], &batches[n + 1], curv, kappa, epoch, &touched)?;
                steps += 1;
            }
            kappa = advance(&mut model, cfg, &batches[n], curv, kappa, &mut touched);
            schedule.push(kappa);
        }
        model.schedule = schedule;
        sync_untouched(&mut model, &touched);
        let (val_mrr, val_recall10) = match valid {
            Some(v) if !v.is_empty() => {
                let rep = evaluate(&model, v, &ks);
                (Some(rep.mrr), rep.recall.get(&10).copied())
            }
            _ => (None, None),
        };
        let line = EpochLog {
            epoch,
            loss: if steps > 0 { total / steps as f64 } else { 0.0 },
            kappa_u: kappa[0],
            kappa_i: kappa[1],
            val_mrr,
            val_recall10,
        };
        log::info!(
            "epoch {epoch}: loss {:.4} kappa ({:.3}, {:.3}) val_mrr {:?}",
            line.loss,
            kappa[0],
            kappa[1],
            val_mrr
        );
        on_epoch(&line);
        log.push(line);
        let metric = val_mrr.unwrap_or(f64::NEG_INFINITY);
        match &best {
            Some((b, _, _)) if metric <= *b && val_mrr.is_some() => {
                stale += 1;
                if stale >= cfg.patience {
                    log::info!("no validation improvement for {stale} epochs; stopping");
                    break;
                }
            }
            _ => {
                stale = 0;
                best = Some((metric, epoch, model.clone()));
            }
        }
    }
    let (model, best_epoch) = match best {
        Some((_, e, m)) => (m, e),
        None => (model, 0),
    };
    Ok(TrainOutcome {
        model,
        log,
        best_epoch,
    })
}
