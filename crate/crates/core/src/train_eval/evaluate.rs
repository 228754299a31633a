use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::state::Scorer;
use super::Model;
use crate::graph::InteractionNetwork;

/// One ranked test interaction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankingResult {
    pub user: usize,
    pub item: usize,
    pub rank: usize,
    pub top_k: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub queries: usize,
    pub mrr: f64,
    /// Recall@k for every requested k.
    pub recall: BTreeMap<usize, f64>,
    /// Queries whose user or item had no training interaction.
    pub unseen_users: usize,
    pub unseen_items: usize,
    #[serde(skip)]
    pub results: Vec<RankingResult>,
}

/// 1-based rank of `truth`; ties go to the lower item id.
pub fn rank_of(scores: &[f64], truth: usize) -> usize {
    let s = scores[truth];
    1 + scores
        .iter()
        .enumerate()
        .filter(|&(i, &x)| x > s || (x == s && i < truth))
        .count()
}

/// MRR and Recall@k from ranks.
pub fn metrics_from_ranks(ranks: &[usize], ks: &[usize]) -> (f64, BTreeMap<usize, f64>) {
    if ranks.is_empty() {
        return (0.0, ks.iter().map(|&k| (k, 0.0)).collect());
    }
    let n = ranks.len() as f64;
    let mrr = ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / n;
    let recall = ks
        .iter()
        .map(|&k| (k, ranks.iter().filter(|&&r| r <= k).count() as f64 / n))
        .collect();
    (mrr, recall)
}

/// Rank every test interaction's item among all items for its user.
pub fn evaluate(model: &Model, test: &InteractionNetwork, ks: &[usize]) -> EvalReport {
    let scorer = Scorer::new(model);
    let top = ks.iter().copied().max().unwrap_or(10);
    let (nu, ni) = (model.config.num_users, model.config.num_items);
    let queries: Vec<_> = test
        .records
        .iter()
        .filter(|r| r.user < nu && r.item < ni)
        .collect();
    if queries.len() < test.len() {
        log::warn!(
            "{} test records reference ids outside the model and were skipped",
            test.len() - queries.len()
        );
    }
    let results: Vec<RankingResult> = queries
        .par_iter()
        .map(|r| {
            let scores = scorer.scores(r.user);
            let mut idx: Vec<usize> = (0..scores.len()).collect();
            idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
            idx.truncate(top);
            RankingResult {
                user: r.user,
                item: r.item,
                rank: rank_of(&scores, r.item),
                top_k: idx,
            }
        })
        .collect();
    let ranks: Vec<usize> = results.iter().map(|r| r.rank).collect();
    let (mrr, recall) = metrics_from_ranks(&ranks, ks);
    let unseen_users = queries
        .iter()
        .filter(|r| !model.user_seen.get(r.user).copied().unwrap_or(false))
        .count();
    let unseen_items = queries
        .iter()
        .filter(|r| !model.item_seen.get(r.item).copied().unwrap_or(false))
        .count();
    EvalReport {
        queries: results.len(),
        mrr,
        recall,
        unseen_users,
        unseen_items,
        results,
    }
}
