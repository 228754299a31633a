use super::{FusionConfig, FusionMode, Pooling};
use crate::linalg::{self, Matrix};
use crate::scalar::Real;

/// Harmonic encoding `√(1/d)·cos(ω t + θ)`.
pub fn encode_time<S: Real>(t: f64, omega: &[S], theta: &[S]) -> Vec<S> {
    let scale = S::from_f64((1.0 / omega.len() as f64).sqrt());
    let t = S::from_f64(t);
    omega
        .iter()
        .zip(theta)
        .map(|(&w, &th)| scale * (w * t + th).cos())
        .collect()
}

/// `tanh(W1 · [features ; φ(t)])`.
pub fn embed_interaction<S: Real>(features: &[f64], time_code: &[S], w1: &Matrix<S>) -> Vec<S> {
    let mut input: Vec<S> = features.iter().map(|&f| S::from_f64(f)).collect();
    input.extend_from_slice(time_code);
    linalg::tanh(&w1.matvec(&input))
}

/// One dense layer, optionally followed by tanh.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<S> {
    pub w: Matrix<S>,
    pub b: Vec<S>,
    pub tanh: bool,
}

impl<S: Real> Mlp<S> {
    pub fn identity(d: usize) -> Self {
        Mlp {
            w: Matrix::identity(d),
            b: vec![S::zero(); d],
            tanh: false,
        }
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        let y = linalg::add(&self.w.matvec(x), &self.b);
        if self.tanh {
            linalg::tanh(&y)
        } else {
            y
        }
    }
}

fn pool<S: Real>(xs: &[Vec<S>], pooling: Pooling) -> Vec<S> {
    match pooling {
        Pooling::Mean => linalg::mean_pool(xs),
        Pooling::Max => linalg::max_pool(xs),
    }
}

/// Early fusion `MLP(pool(e))` or late fusion `pool(MLP(e))`. An empty edge
/// list gives `None`.
pub fn fuse_edges<S: Real>(edges: &[Vec<S>], mlp: &Mlp<S>, cfg: &FusionConfig) -> Option<Vec<S>> {
    if edges.is_empty() {
        return None;
    }
    Some(match cfg.mode {
        FusionMode::Early => mlp.apply(&pool(edges, cfg.pooling)),
        FusionMode::Late => {
            let mapped: Vec<Vec<S>> = edges.iter().map(|e| mlp.apply(e)).collect();
            pool(&mapped, cfg.pooling)
        }
    })
}

/// Softmax over `Σ_d a_d q_d n_d` for every neighbour `n`.
pub fn attention_weights<S: Real>(query: &[S], neighbors: &[Vec<S>], score: &[S]) -> Vec<S> {
    if neighbors.len() == 1 {
        return vec![S::one()];
    }
    let q = linalg::mul(query, score);
    let logits: Vec<S> = neighbors.iter().map(|n| S::dot(&q, n)).collect();
    let shift = logits
        .iter()
        .map(|l| l.value())
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = S::from_f64(shift);
    let exps: Vec<S> = logits.iter().map(|&l| (l - shift).exp()).collect();
    let total = S::sum(&exps);
    exps.into_iter().map(|e| e / total).collect()
}
