use std::collections::{BTreeMap, BTreeSet};

use super::layers::{attention_weights, embed_interaction, encode_time, fuse_edges, Mlp};
use super::{FusionConfig, ModelConfig, ModelParams};
use crate::graph::{IntervalBatch, Side};
use crate::linalg::{clip_norm, Matrix};
use crate::manifold::Curvature;
use crate::scalar::Real;

/// `M_a⊗exp_o(h) ⊕ M_b⊗exp_o(e') ⊕ M_c⊗map(midpoint)` on the node's own
/// manifold. `h`, `edges` and `neighbors` are tangent vectors at the origin;
/// neighbours live on `other`. Returns a point of `own`.
#[allow(clippy::too_many_arguments)]
pub fn aggregate_node<S: Real>(
    h: &[S],
    edges: &[Vec<S>],
    neighbors: &[Vec<S>],
    own: &Curvature<S>,
    other: &Curvature<S>,
    m: [&Matrix<S>; 3],
    attn: &[S],
    fusion: &Mlp<S>,
    cfg: &FusionConfig,
) -> Vec<S> {
    let mut acc = own.mobius_matvec(m[0], &own.exp0(h));
    if let Some(e) = fuse_edges(edges, fusion, cfg) {
        let term = own.mobius_matvec(m[1], &own.exp0(&e));
        acc = own.mobius_add(&acc, &term);
    }
    if !neighbors.is_empty() {
        let alpha = attention_weights(h, neighbors, attn);
        let points: Vec<Vec<S>> = neighbors.iter().map(|n| other.exp0(n)).collect();
        let mid = other.gyromidpoint(&points, &alpha);
        let moved = other.transfer(&mid, own);
        let term = own.mobius_matvec(m[2], &moved);
        acc = own.mobius_add(&acc, &term);
    }
    acc
}

#[allow(clippy::too_many_arguments)]
pub fn aggregate_user<S: Real>(
    p: &ModelParams<S>,
    cfg: &FusionConfig,
    h: &[S],
    edges: &[Vec<S>],
    items: &[Vec<S>],
    ku: &Curvature<S>,
    ki: &Curvature<S>,
) -> Vec<S> {
    let m = [&p.m[0], &p.m[1], &p.m[2]];
    aggregate_node(h, edges, items, ku, ki, m, &p.attn_user, &p.fusion, cfg)
}

#[allow(clippy::too_many_arguments)]
pub fn aggregate_item<S: Real>(
    p: &ModelParams<S>,
    cfg: &FusionConfig,
    h: &[S],
    edges: &[Vec<S>],
    users: &[Vec<S>],
    ki: &Curvature<S>,
    ku: &Curvature<S>,
) -> Vec<S> {
    let m = [&p.m[3], &p.m[4], &p.m[5]];
    aggregate_node(h, edges, users, ki, ku, m, &p.attn_item, &p.fusion, cfg)
}

/// New tangent coordinates of every node active in an interval.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalOutput<S> {
    pub users: BTreeMap<usize, Vec<S>>,
    pub items: BTreeMap<usize, Vec<S>>,
}

impl<S: Real> IntervalOutput<S> {
    pub fn get(&self, side: Side, node: usize) -> Option<&Vec<S>> {
        match side {
            Side::User => self.users.get(&node),
            Side::Item => self.items.get(&node),
        }
    }
}

/// Run `layers` synchronous aggregation rounds over the nodes of `batch`,
/// starting from the embedding tables.
pub fn aggregate_interval<S: Real>(
    p: &ModelParams<S>,
    cfg: &ModelConfig,
    batch: &IntervalBatch,
    ku: &Curvature<S>,
    ki: &Curvature<S>,
) -> IntervalOutput<S> {
    let edges: Vec<Vec<S>> = batch
        .records
        .iter()
        .map(|r| {
            let code = encode_time(cfg.normalize_time(r.timestamp), &p.omega, &p.theta);
            embed_interaction(&r.features, &code, &p.w1)
        })
        .collect();
    let partners = |adj: &[usize], side: Side| -> Vec<usize> {
        let set: BTreeSet<usize> = adj.iter().map(|&k| batch.records[k].node(side)).collect();
        set.into_iter().collect()
    };
    let user_nb: BTreeMap<usize, Vec<usize>> = batch
        .by_user
        .iter()
        .map(|(&u, adj)| (u, partners(adj, Side::Item)))
        .collect();
    let item_nb: BTreeMap<usize, Vec<usize>> = batch
        .by_item
        .iter()
        .map(|(&i, adj)| (i, partners(adj, Side::User)))
        .collect();
    let own_edges = |adj: &[usize]| -> Vec<Vec<S>> { adj.iter().map(|&k| edges[k].clone()).collect() };

    let mut cur = IntervalOutput {
        users: batch
            .by_user
            .keys()
            .map(|&u| (u, p.user_table.row(u).to_vec()))
            .collect(),
        items: batch
            .by_item
            .keys()
            .map(|&i| (i, p.item_table.row(i).to_vec()))
            .collect(),
    };
    for _ in 0..cfg.fusion.layers {
        let mut next = IntervalOutput {
            users: BTreeMap::new(),
            items: BTreeMap::new(),
        };
        for (&u, adj) in &batch.by_user {
            let nb: Vec<Vec<S>> = user_nb[&u].iter().map(|i| cur.items[i].clone()).collect();
            let x = aggregate_user(p, &cfg.fusion, &cur.users[&u], &own_edges(adj), &nb, ku, ki);
            next.users.insert(u, clip_norm(&ku.log0(&x), cfg.max_norm));
        }
        for (&i, adj) in &batch.by_item {
            let nb: Vec<Vec<S>> = item_nb[&i].iter().map(|u| cur.users[u].clone()).collect();
            let x = aggregate_item(p, &cfg.fusion, &cur.items[&i], &own_edges(adj), &nb, ki, ku);
            next.items.insert(i, clip_norm(&ki.log0(&x), cfg.max_norm));
        }
        cur = next;
    }
    cur
}
