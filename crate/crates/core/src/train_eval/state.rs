use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::diff::ParameterStore;
use crate::linalg::Matrix;
use crate::manifold::Curvature;
use crate::model::{fermi_dirac, ModelConfig, ModelParams, ParamLayout};

/// Learnable parameters plus the curvature schedule of the last pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub config: ModelConfig,
    pub store: ParameterStore,
    /// `[κ_user, κ_item]` per interval boundary; the last entry is used for
    /// prediction.
    pub schedule: Vec<[f64; 2]>,
    pub user_seen: Vec<bool>,
    pub item_seen: Vec<bool>,
    /// Tangent coordinates of every node after the last pass; the tables in
    /// the store are the learnable starting points of each pass.
    pub user_state: Matrix<f64>,
    pub item_state: Matrix<f64>,
    #[serde(skip)]
    layout: Option<ParamLayout>,
}

impl Model {
    pub fn new(config: ModelConfig, seed: u64, start_kappa: [f64; 2]) -> Result<Self, TrainError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (store, layout) = ParamLayout::init(&config, &mut rng)?;
        let d = config.dim;
        Ok(Model {
            user_state: Matrix::new(config.num_users, d, store.value(layout.user_table).to_vec()),
            item_state: Matrix::new(config.num_items, d, store.value(layout.item_table).to_vec()),
            user_seen: vec![false; config.num_users],
            item_seen: vec![false; config.num_items],
            config,
            store,
            schedule: vec![start_kappa],
            layout: Some(layout),
        })
    }

    pub(crate) fn relink(&mut self) -> Result<(), TrainError> {
        self.layout = Some(ParamLayout::from_store(&self.store)?);
        Ok(())
    }

    pub fn layout(&self) -> &ParamLayout {
        self.layout.as_ref().expect("layout linked")
    }

    pub fn params(&self) -> ModelParams<f64> {
        ModelParams::from_store(&self.config, self.layout(), &self.store)
    }

    pub fn kappa(&self) -> [f64; 2] {
        *self.schedule.last().expect("schedule is never empty")
    }

    /// Probability of every item for one user, at the final curvatures.
    pub fn item_scores(&self, user: usize) -> Vec<f64> {
        Scorer::new(self).scores(user)
    }

    /// The `k` most likely items, ties broken by ascending id.
    pub fn top_k(&self, user: usize, k: usize) -> Vec<(usize, f64)> {
        let s = self.item_scores(user);
        let mut idx: Vec<usize> = (0..s.len()).collect();
        idx.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
        idx.into_iter().take(k).map(|i| (i, s[i])).collect()
    }
}

/// Items placed on both manifolds once, so scoring a user costs two
/// distances per item.
pub(crate) struct Scorer {
    ku: Curvature<f64>,
    ki: Curvature<f64>,
    users: Matrix<f64>,
    items_on_user: Vec<Vec<f64>>,
    items_on_item: Vec<Vec<f64>>,
    weight: f64,
    r: f64,
    t: f64,
}

impl Scorer {
    pub(crate) fn new(model: &Model) -> Self {
        let [a, b] = model.kappa();
        let (ku, ki) = (Curvature::new(a), Curvature::new(b));
        let p = model.params();
        let items_on_item: Vec<Vec<f64>> = (0..model.item_state.rows)
            .map(|i| ki.exp0(model.item_state.row(i)))
            .collect();
        let items_on_user = items_on_item.iter().map(|x| ki.transfer(x, &ku)).collect();
        Scorer {
            ku,
            ki,
            weight: 1.0 / (1.0 + (-p.rho).exp()),
            users: model.user_state.clone(),
            items_on_user,
            items_on_item,
            r: model.config.fd_r,
            t: model.config.fd_t,
        }
    }

    pub(crate) fn num_items(&self) -> usize {
        self.items_on_item.len()
    }

    pub(crate) fn scores(&self, user: usize) -> Vec<f64> {
        let u = self.ku.exp0(self.users.row(user));
        let u_on_item = self.ku.transfer(&u, &self.ki);
        (0..self.num_items())
            .map(|i| {
                let du = self.ku.distance(&u, &self.items_on_user[i]);
                let di = self.ki.distance(&u_on_item, &self.items_on_item[i]);
                self.weight * fermi_dirac(du, self.r, self.t)
                    + (1.0 - self.weight) * fermi_dirac(di, self.r, self.t)
            })
            .collect()
    }
}
