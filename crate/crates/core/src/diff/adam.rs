use serde::{Deserialize, Serialize};

use super::store::ParameterStore;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 3e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update over every parameter; clears gradients.
pub fn adam_step(store: &mut ParameterStore, cfg: &AdamConfig) {
    store.step += 1;
    let t = store.step as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    for p in store.params_mut() {
        for k in 0..p.value.len() {
            let g = p.grad[k];
            p.m[k] = cfg.beta1 * p.m[k] + (1.0 - cfg.beta1) * g;
            p.v[k] = cfg.beta2 * p.v[k] + (1.0 - cfg.beta2) * g * g;
            let mhat = p.m[k] / c1;
            let vhat = p.v[k] / c2;
            p.value[k] -= cfg.learning_rate * mhat / (vhat.sqrt() + cfg.eps);
            p.grad[k] = 0.0;
        }
    }
}
