use serde::Serialize;

use crate::manifold::Curvature;
use crate::scalar::Real;

/// Probabilities are clamped to `[PROB_FLOOR, 1 - PROB_FLOOR]` inside the loss.
pub const PROB_FLOOR: f64 = 1e-12;

/// `1 / (exp((d - r)/t) + 1)`.
pub fn fermi_dirac<S: Real>(d: S, r: f64, t: f64) -> S {
    ((S::from_f64(r) - d) / S::from_f64(t)).sigmoid()
}

/// Link probability of a user and an item given as tangent vectors at the
/// origins of their manifolds: each side measures the distance after moving
/// the other node into its own space, and the two decoders are mixed by
/// `sigmoid(rho)`.
pub fn score<S: Real>(
    vu: &[S],
    vi: &[S],
    ku: &Curvature<S>,
    ki: &Curvature<S>,
    rho: S,
    r: f64,
    t: f64,
) -> S {
    let u = ku.exp0(vu);
    let i = ki.exp0(vi);
    let d_user = ku.distance(&u, &ki.transfer(&i, ku));
    let d_item = ki.distance(&ku.transfer(&u, ki), &i);
    let w = rho.sigmoid();
    w * fermi_dirac(d_user, r, t) + (S::one() - w) * fermi_dirac(d_item, r, t)
}

/// Move points from one manifold of the schedule to the next.
pub fn advance_interval<S: Real>(
    points: &[Vec<S>],
    from: &Curvature<S>,
    to: &Curvature<S>,
) -> Vec<Vec<S>> {
    if from.value() == to.value() {
        return points.to_vec();
    }
    points.iter().map(|x| from.transfer(x, to)).collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LossTerms<S> {
    pub total: S,
    /// `-Σ ln P` over positives.
    pub pull: S,
    /// `Σ ln P` over negatives.
    pub push: S,
    /// `Σ |κ_e - κ_o|` over sides.
    pub curvature: S,
}

pub fn loss<S: Real>(positives: &[S], negatives: &[S], penalties: &[S]) -> LossTerms<S> {
    let lnp = |p: &S| p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR).ln();
    let pull = -S::sum(&positives.iter().map(lnp).collect::<Vec<_>>());
    let push = S::sum(&negatives.iter().map(lnp).collect::<Vec<_>>());
    let curvature = S::sum(&penalties.iter().map(|d| d.abs()).collect::<Vec<_>>());
    LossTerms {
        total: pull + push + curvature,
        pull,
        push,
        curvature,
    }
}
