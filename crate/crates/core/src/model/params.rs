use rand::Rng;

use super::{ModelConfig, Mlp};
use crate::curvature::CurvNN;
use crate::diff::{BoundParams, DiffError, ParamId, ParameterStore, Var};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Positions of every model parameter inside a [`ParameterStore`].
#[derive(Clone, Debug, PartialEq)]
pub struct ParamLayout {
    pub user_table: ParamId,
    pub item_table: ParamId,
    pub m: [ParamId; 6],
    pub w1: ParamId,
    pub omega: ParamId,
    pub theta: ParamId,
    pub attn_user: ParamId,
    pub attn_item: ParamId,
    pub fusion_w: ParamId,
    pub fusion_b: ParamId,
    pub rho: ParamId,
    pub curv_w_in: ParamId,
    pub curv_b_in: ParamId,
    pub curv_w_hidden: ParamId,
    pub curv_b_hidden: ParamId,
    pub curv_w2: ParamId,
}

const M_NAMES: [&str; 6] = ["m1", "m2", "m3", "m4", "m5", "m6"];

impl ParamLayout {
    /// Look every parameter up by name.
    pub fn from_store(store: &ParameterStore) -> Result<Self, DiffError> {
        let id = |n: &str| store.id(n);
        Ok(ParamLayout {
            user_table: id("user_table")?,
            item_table: id("item_table")?,
            m: [
                id(M_NAMES[0])?,
                id(M_NAMES[1])?,
                id(M_NAMES[2])?,
                id(M_NAMES[3])?,
                id(M_NAMES[4])?,
                id(M_NAMES[5])?,
            ],
            w1: id("w1")?,
            omega: id("time_omega")?,
            theta: id("time_theta")?,
            attn_user: id("attn_user")?,
            attn_item: id("attn_item")?,
            fusion_w: id("fusion_w")?,
            fusion_b: id("fusion_b")?,
            rho: id("rho")?,
            curv_w_in: id("curv_w_in")?,
            curv_b_in: id("curv_b_in")?,
            curv_w_hidden: id("curv_w_hidden")?,
            curv_b_hidden: id("curv_b_hidden")?,
            curv_w2: id("curv_w2")?,
        })
    }

    /// Fresh randomly initialised parameters.
    pub fn init<R: Rng>(cfg: &ModelConfig, rng: &mut R) -> Result<(ParameterStore, Self), DiffError> {
        let d = cfg.dim;
        let mut s = ParameterStore::new();
        let mut uni = |n: usize, lo: f64, hi: f64| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(lo..hi)).collect()
        };
        let diag = |scale: f64, noise: Vec<f64>| -> Vec<f64> {
            let mut m = noise;
            for k in 0..d {
                m[k * d + k] += scale;
            }
            m
        };
        s.add("user_table", &[cfg.num_users, d], uni(cfg.num_users * d, -0.1, 0.1))?;
        s.add("item_table", &[cfg.num_items, d], uni(cfg.num_items * d, -0.1, 0.1))?;
        for (k, name) in M_NAMES.iter().enumerate() {
            let scale = match k % 3 {
                0 => 1.0,
                1 => 0.1,
                _ => 0.3,
            };
            s.add(name, &[d, d], diag(scale, uni(d * d, -0.01, 0.01)))?;
        }
        let fan_in = cfg.feature_dim + d;
        let w = 1.0 / (fan_in as f64).sqrt();
        s.add("w1", &[d, fan_in], uni(d * fan_in, -w, w))?;
        s.add("time_omega", &[d], uni(d, 0.0, 10.0))?;
        s.add("time_theta", &[d], uni(d, 0.0, std::f64::consts::TAU))?;
        s.add("attn_user", &[d], vec![1.0; d])?;
        s.add("attn_item", &[d], vec![1.0; d])?;
        s.add("fusion_w", &[d, d], diag(1.0, uni(d * d, -0.01, 0.01)))?;
        s.add("fusion_b", &[d], vec![0.0; d])?;
        s.add("rho", &[1], vec![0.0])?;
        let nn = CurvNN::init(cfg.curv_hidden, cfg.curv_out, rng);
        s.add("curv_w_in", &[cfg.curv_hidden], nn.w_in)?;
        s.add("curv_b_in", &[cfg.curv_hidden], nn.b_in)?;
        s.add("curv_w_hidden", &[cfg.curv_out, cfg.curv_hidden], nn.w_hidden.data)?;
        s.add("curv_b_hidden", &[cfg.curv_out], nn.b_hidden)?;
        s.add("curv_w2", &[cfg.curv_out, cfg.curv_out], nn.w2.data)?;
        let layout = ParamLayout::from_store(&s)?;
        Ok((s, layout))
    }
}

/// All learnable quantities in matrix form, over any scalar.
#[derive(Clone, Debug)]
pub struct ModelParams<S> {
    pub user_table: Matrix<S>,
    pub item_table: Matrix<S>,
    pub m: [Matrix<S>; 6],
    pub w1: Matrix<S>,
    pub omega: Vec<S>,
    pub theta: Vec<S>,
    pub attn_user: Vec<S>,
    pub attn_item: Vec<S>,
    pub fusion: Mlp<S>,
    pub rho: S,
    pub curv: CurvNN<S>,
}

impl<S: Real> ModelParams<S> {
    pub fn assemble(cfg: &ModelConfig, l: &ParamLayout, get: impl Fn(ParamId) -> Vec<S>) -> Self {
        let d = cfg.dim;
        let sq = |id| Matrix::new(d, d, get(id));
        ModelParams {
            user_table: Matrix::new(cfg.num_users, d, get(l.user_table)),
            item_table: Matrix::new(cfg.num_items, d, get(l.item_table)),
            m: l.m.map(sq),
            w1: Matrix::new(d, cfg.feature_dim + d, get(l.w1)),
            omega: get(l.omega),
            theta: get(l.theta),
            attn_user: get(l.attn_user),
            attn_item: get(l.attn_item),
            fusion: Mlp {
                w: sq(l.fusion_w),
                b: get(l.fusion_b),
                tanh: true,
            },
            rho: get(l.rho)[0],
            curv: CurvNN {
                w_in: get(l.curv_w_in),
                b_in: get(l.curv_b_in),
                w_hidden: Matrix::new(cfg.curv_out, cfg.curv_hidden, get(l.curv_w_hidden)),
                b_hidden: get(l.curv_b_hidden),
                w2: Matrix::new(cfg.curv_out, cfg.curv_out, get(l.curv_w2)),
            },
        }
    }
}

impl<'t> ModelParams<Var<'t>> {
    /// Parameters as leaves of the tape `b` was bound to.
    pub fn bind(cfg: &ModelConfig, l: &ParamLayout, b: &BoundParams<'t>) -> Self {
        ModelParams::assemble(cfg, l, |id| b.get(id).to_vec())
    }
}

impl ModelParams<f64> {
    pub fn from_store(cfg: &ModelConfig, l: &ParamLayout, store: &ParameterStore) -> Self {
        ModelParams::assemble(cfg, l, |id| store.value(id).to_vec())
    }
}
