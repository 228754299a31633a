use thiserror::Error;

use super::Curvature;
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum ManifoldError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("curvature mismatch: {0} vs {1}")]
    CurvatureMismatch(f64, f64),
    #[error("point outside the manifold domain (-kappa * |x|^2 = {0} >= 1)")]
    OutsideDomain(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("tangent vector is not attached to the given base point")]
    BaseMismatch,
    #[error("empty input")]
    Empty,
    #[error("weights must be nonnegative with at least one positive entry")]
    InvalidWeights,
}

/// A point of a κ-stereographic manifold.
#[derive(Clone, Debug)]
pub struct ManifoldPoint<S> {
    pub coords: Vec<S>,
    pub curvature: Curvature<S>,
}

/// A tangent vector attached to a base point.
#[derive(Clone, Debug)]
pub struct TangentVector<S> {
    pub coords: Vec<S>,
    pub base: ManifoldPoint<S>,
}

impl<S: Real> ManifoldPoint<S> {
    /// Validates the domain and applies the boundary clamp.
    pub fn new(coords: Vec<S>, curvature: Curvature<S>) -> Result<Self, ManifoldError> {
        check_finite(&coords)?;
        check_domain(&coords, &curvature)?;
        let coords = curvature.project(coords);
        Ok(ManifoldPoint { coords, curvature })
    }

    pub fn origin(dim: usize, curvature: Curvature<S>) -> Self {
        ManifoldPoint {
            coords: vec![S::zero(); dim],
            curvature,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    fn wrap(&self, coords: Vec<S>) -> Self {
        ManifoldPoint {
            coords,
            curvature: self.curvature,
        }
    }
}

impl<S: Real> TangentVector<S> {
    pub fn new(coords: Vec<S>, base: ManifoldPoint<S>) -> Result<Self, ManifoldError> {
        if coords.len() != base.dim() {
            return Err(ManifoldError::DimensionMismatch(coords.len(), base.dim()));
        }
        check_finite(&coords)?;
        Ok(TangentVector { coords, base })
    }
}

fn check_finite<S: Real>(x: &[S]) -> Result<(), ManifoldError> {
    if x.iter().all(|c| c.value().is_finite()) {
        Ok(())
    } else {
        Err(ManifoldError::NonFinite)
    }
}

fn check_domain<S: Real>(x: &[S], k: &Curvature<S>) -> Result<(), ManifoldError> {
    if k.contains(x) {
        Ok(())
    } else {
        let n2: f64 = x.iter().map(|c| c.value() * c.value()).sum();
        Err(ManifoldError::OutsideDomain(-k.value() * n2))
    }
}

fn same_space<S: Real>(x: &ManifoldPoint<S>, y: &ManifoldPoint<S>) -> Result<(), ManifoldError> {
    if x.dim() != y.dim() {
        return Err(ManifoldError::DimensionMismatch(x.dim(), y.dim()));
    }
    let (a, b) = (x.curvature.value(), y.curvature.value());
    if a != b {
        return Err(ManifoldError::CurvatureMismatch(a, b));
    }
    Ok(())
}

pub fn conformal_factor<S: Real>(x: &ManifoldPoint<S>) -> Result<S, ManifoldError> {
    check_domain(&x.coords, &x.curvature)?;
    Ok(x.curvature.conformal_factor(&x.coords))
}

pub fn mobius_add<S: Real>(
    x: &ManifoldPoint<S>,
    y: &ManifoldPoint<S>,
) -> Result<ManifoldPoint<S>, ManifoldError> {
    same_space(x, y)?;
    Ok(x.wrap(x.curvature.mobius_add(&x.coords, &y.coords)))
}

pub fn mobius_scalar_mul<S: Real>(
    r: S,
    x: &ManifoldPoint<S>,
) -> Result<ManifoldPoint<S>, ManifoldError> {
    if !r.value().is_finite() {
        return Err(ManifoldError::NonFinite);
    }
    Ok(x.wrap(x.curvature.mobius_scalar_mul(r, &x.coords)))
}

pub fn mobius_matvec<S: Real>(
    m: &Matrix<S>,
    x: &ManifoldPoint<S>,
) -> Result<ManifoldPoint<S>, ManifoldError> {
    if m.cols != x.dim() {
        return Err(ManifoldError::DimensionMismatch(m.cols, x.dim()));
    }
    Ok(x.wrap(x.curvature.mobius_matvec(m, &x.coords)))
}

pub fn exp_map<S: Real>(
    base: &ManifoldPoint<S>,
    v: &TangentVector<S>,
) -> Result<ManifoldPoint<S>, ManifoldError> {
    same_space(base, &v.base)?;
    if v.base.coords.iter().zip(&base.coords).any(|(a, b)| a.value() != b.value()) {
        return Err(ManifoldError::BaseMismatch);
    }
    Ok(base.wrap(base.curvature.exp(&base.coords, &v.coords)))
}

pub fn log_map<S: Real>(
    base: &ManifoldPoint<S>,
    y: &ManifoldPoint<S>,
) -> Result<TangentVector<S>, ManifoldError> {
    same_space(base, y)?;
    Ok(TangentVector {
        coords: base.curvature.log(&base.coords, &y.coords),
        base: base.clone(),
    })
}

pub fn distance<S: Real>(x: &ManifoldPoint<S>, y: &ManifoldPoint<S>) -> Result<S, ManifoldError> {
    same_space(x, y)?;
    Ok(x.curvature.distance(&x.coords, &y.coords))
}

pub fn gyromidpoint<S: Real>(
    points: &[ManifoldPoint<S>],
    weights: &[S],
) -> Result<ManifoldPoint<S>, ManifoldError> {
    let first = points.first().ok_or(ManifoldError::Empty)?;
    if points.len() != weights.len() {
        return Err(ManifoldError::DimensionMismatch(points.len(), weights.len()));
    }
    for p in &points[1..] {
        same_space(first, p)?;
    }
    if weights.iter().any(|w| !(w.value() >= 0.0)) || weights.iter().all(|w| w.value() == 0.0) {
        return Err(ManifoldError::InvalidWeights);
    }
    let coords: Vec<Vec<S>> = points.iter().map(|p| p.coords.clone()).collect();
    Ok(first.wrap(first.curvature.gyromidpoint(&coords, weights)))
}

pub fn transfer<S: Real>(x: &ManifoldPoint<S>, target: Curvature<S>) -> ManifoldPoint<S> {
    ManifoldPoint {
        coords: x.curvature.transfer(&x.coords, &target),
        curvature: target,
    }
}
