use rand::Rng;

use crate::linalg::{self, Matrix};
use crate::scalar::Real;

/// Per-edge encoder `r ↦ tanh(W_h · tanh(w_in·r + b_in) + b_h)`, mean-pooled
/// to `z`, then `κ = zᵀ W2 z`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvNN<S> {
    pub w_in: Vec<S>,
    pub b_in: Vec<S>,
    pub w_hidden: Matrix<S>,
    pub b_hidden: Vec<S>,
    pub w2: Matrix<S>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureEstimate<S> {
    pub kappa: S,
    /// True when the input was empty and the previous value was reused.
    pub carried: bool,
}

impl CurvNN<f64> {
    pub fn init<R: Rng>(hidden: usize, out: usize, rng: &mut R) -> Self {
        let mut u = |n: usize, s: f64| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-s..s)).collect() };
        CurvNN {
            w_in: u(hidden, 1.0),
            b_in: u(hidden, 0.5),
            w_hidden: Matrix::new(out, hidden, u(out * hidden, (1.0 / hidden as f64).sqrt())),
            b_hidden: u(out, 0.1),
            w2: Matrix::new(out, out, u(out * out, 0.5)),
        }
    }

    pub fn zeros(hidden: usize, out: usize) -> Self {
        CurvNN {
            w_in: vec![0.0; hidden],
            b_in: vec![0.0; hidden],
            w_hidden: Matrix::zeros(out, hidden),
            b_hidden: vec![0.0; out],
            w2: Matrix::zeros(out, out),
        }
    }
}

impl<S: Real> CurvNN<S> {
    pub fn hidden(&self) -> usize {
        self.w_in.len()
    }

    pub fn out(&self) -> usize {
        self.b_hidden.len()
    }

    pub fn encode(&self, r: f64) -> Vec<S> {
        let r = S::from_f64(r);
        let h: Vec<S> = self
            .w_in
            .iter()
            .zip(&self.b_in)
            .map(|(&w, &b)| (w * r + b).tanh())
            .collect();
        linalg::tanh(&linalg::add(&self.w_hidden.matvec(&h), &self.b_hidden))
    }

    /// Mean-pooled encoding; `None` for an empty input.
    pub fn pooled(&self, ricci: &[f64]) -> Option<Vec<S>> {
        if ricci.is_empty() {
            return None;
        }
        let mut sorted = ricci.to_vec();
        sorted.sort_by(f64::total_cmp);
        let total = sorted.len() as f64;
        let mut z = vec![S::zero(); self.out()];
        let mut k = 0;
        while k < sorted.len() {
            let mut j = k;
            while j < sorted.len() && sorted[j] == sorted[k] {
                j += 1;
            }
            let w = S::from_f64((j - k) as f64 / total);
            let e = self.encode(sorted[k]);
            for (zi, ei) in z.iter_mut().zip(e) {
                *zi = *zi + w * ei;
            }
            k = j;
        }
        Some(z)
    }

    pub fn estimate(&self, ricci: &[f64]) -> Option<S> {
        let z = self.pooled(ricci)?;
        Some(S::dot(&z, &self.w2.matvec(&z)))
    }
}

/// CurvNN estimate, falling back to `previous` (or 0) for an empty input.
pub fn estimate_curvature<S: Real>(
    params: &CurvNN<S>,
    ricci: &[f64],
    previous: Option<S>,
) -> CurvatureEstimate<S> {
    match params.estimate(ricci) {
        Some(kappa) => CurvatureEstimate {
            kappa,
            carried: false,
        },
        None => CurvatureEstimate {
            kappa: previous.unwrap_or_else(S::zero),
            carried: true,
        },
    }
}
