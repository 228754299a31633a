//! κ-stereographic model of constant-curvature space.
//!
//! One parameterisation covers the Poincaré ball (κ < 0), Euclidean space
//! (κ = 0) and the stereographically projected sphere (κ > 0). The kernel in
//! this file works on raw coordinate slices and is what the model calls in
//! its inner loops; [`point`] wraps it with checked point/tangent types.
//!
//! Conventions:
//! * `tan_κ` is `tan` for κ > 0 and `tanh` for κ < 0, always used with the
//!   `√|κ|` scaling so every formula has a finite κ → 0 limit;
//! * |κ| below [`Tolerances::flat_eps`] takes dedicated Euclidean branches;
//! * Möbius products of the origin return the origin;
//! * every returned point is radially pulled back inside the ball of radius
//!   `(1 - boundary_eps)/√|κ|` when κ < 0, and capped at `max_norm` otherwise.

mod point;

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, Matrix};
use crate::scalar::Real;

pub use point::{
    conformal_factor, distance, exp_map, gyromidpoint, log_map, mobius_add, mobius_matvec,
    mobius_scalar_mul, transfer, ManifoldError, ManifoldPoint, TangentVector,
};

/// Numerical guards of the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// |κ| below this uses the Euclidean branch.
    pub flat_eps: f64,
    /// Relative margin kept from the Poincaré boundary.
    pub boundary_eps: f64,
    /// Norm cap for κ ≥ 0.
    pub max_norm: f64,
    /// Smallest admissible magnitude of a denominator.
    pub min_denom: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            flat_eps: 1e-7,
            boundary_eps: 1e-5,
            max_norm: 1e8,
            min_denom: 1e-15,
        }
    }
}

/// Which closed form an operation evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Hyperbolic,
    Flat,
    Spherical,
}

thread_local! {
    static FLAT_CALLS: Cell<u64> = const { Cell::new(0) };
    static CURVED_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Per-thread count of kernel calls by branch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BranchCounts {
    pub flat: u64,
    pub curved: u64,
}

pub fn branch_counts() -> BranchCounts {
    BranchCounts {
        flat: FLAT_CALLS.with(Cell::get),
        curved: CURVED_CALLS.with(Cell::get),
    }
}

pub fn reset_branch_counts() {
    FLAT_CALLS.with(|c| c.set(0));
    CURVED_CALLS.with(|c| c.set(0));
}

/// Sectional curvature of a κ-stereographic space together with its
/// numerical guards. `S` may be a differentiable scalar, so curvature itself
/// can receive gradients.
#[derive(Clone, Copy, Debug)]
pub struct Curvature<S> {
    pub kappa: S,
    pub tol: Tolerances,
}

impl<S: Real> Curvature<S> {
    pub fn new(kappa: S) -> Self {
        Curvature {
            kappa,
            tol: Tolerances::default(),
        }
    }

    pub fn with_tolerances(kappa: S, tol: Tolerances) -> Self {
        Curvature { kappa, tol }
    }

    pub fn flat() -> Self {
        Self::new(S::zero())
    }

    pub fn value(&self) -> f64 {
        self.kappa.value()
    }

    pub fn geometry(&self) -> Geometry {
        let k = self.kappa.value();
        if k.abs() < self.tol.flat_eps {
            Geometry::Flat
        } else if k < 0.0 {
            Geometry::Hyperbolic
        } else {
            Geometry::Spherical
        }
    }

    /// Same curvature value, different scalar type.
    pub fn cast<T: Real>(&self, f: impl Fn(S) -> T) -> Curvature<T> {
        Curvature {
            kappa: f(self.kappa),
            tol: self.tol,
        }
    }

    fn branch(&self) -> Geometry {
        let g = self.geometry();
        match g {
            Geometry::Flat => FLAT_CALLS.with(|c| c.set(c.get() + 1)),
            _ => CURVED_CALLS.with(|c| c.set(c.get() + 1)),
        }
        g
    }

    fn sqrt_abs(&self) -> S {
        self.kappa.abs().sqrt()
    }

    fn tan_k(&self, g: Geometry, z: S) -> S {
        match g {
            Geometry::Spherical => z.tan(),
            _ => z.tanh(),
        }
    }

    fn artan_k(&self, g: Geometry, z: S) -> S {
        match g {
            Geometry::Spherical => z.atan(),
            _ => z.atanh(),
        }
    }

    fn guard_denom(&self, d: S) -> S {
        let m = self.tol.min_denom;
        let v = d.value();
        if v.abs() >= m {
            d
        } else if v >= 0.0 {
            S::from_f64(m)
        } else {
            S::from_f64(-m)
        }
    }

    /// Largest admissible Euclidean norm of a coordinate vector.
    pub fn max_radius(&self) -> f64 {
        match self.geometry() {
            Geometry::Hyperbolic => (1.0 - self.tol.boundary_eps) / self.kappa.value().abs().sqrt(),
            _ => self.tol.max_norm,
        }
    }

    /// `−κ‖x‖² < 1`.
    pub fn contains(&self, x: &[S]) -> bool {
        let n2: f64 = x.iter().map(|c| c.value() * c.value()).sum();
        n2.is_finite() && -self.kappa.value() * n2 < 1.0
    }

    /// Radially rescale `x` back inside the admissible region.
    pub fn project(&self, x: Vec<S>) -> Vec<S> {
        let limit = self.max_radius();
        let n2: f64 = x.iter().map(|c| c.value() * c.value()).sum();
        if n2 <= limit * limit {
            return x;
        }
        let n = linalg::norm2(&x);
        let target = match self.geometry() {
            Geometry::Hyperbolic => S::from_f64(1.0 - self.tol.boundary_eps) / self.sqrt_abs(),
            _ => S::from_f64(self.tol.max_norm),
        };
        linalg::scale(&x, target / n)
    }

    /// `λ_x = 2 / (1 + κ‖x‖²)`.
    pub fn conformal_factor(&self, x: &[S]) -> S {
        match self.branch() {
            Geometry::Flat => S::from_f64(2.0),
            _ => {
                let one = S::one();
                S::from_f64(2.0) / (one + self.kappa * linalg::norm_sq(x))
            }
        }
    }

    /// Möbius addition `x ⊕ y`.
    pub fn mobius_add(&self, x: &[S], y: &[S]) -> Vec<S> {
        match self.branch() {
            Geometry::Flat => linalg::add(x, y),
            _ => {
                let k = self.kappa;
                let one = S::one();
                let two = S::from_f64(2.0);
                let xy = S::dot(x, y);
                let x2 = linalg::norm_sq(x);
                let y2 = linalg::norm_sq(y);
                let a = one - two * k * xy - k * y2;
                let b = one + k * x2;
                let den = self.guard_denom(one - two * k * xy + k * k * x2 * y2);
                self.project(linalg::axpby(a / den, x, b / den, y))
            }
        }
    }

    /// Möbius scalar multiplication `r ⊗ x`.
    pub fn mobius_scalar_mul(&self, r: S, x: &[S]) -> Vec<S> {
        let g = self.branch();
        if g == Geometry::Flat {
            return linalg::scale(x, r);
        }
        if is_zero(x) {
            return vec![S::zero(); x.len()];
        }
        let sk = self.sqrt_abs();
        let n = linalg::norm2(x);
        let mag = self.tan_k(g, r * self.artan_k(g, sk * n)) / sk;
        self.project(linalg::scale(x, mag / n))
    }

    /// Möbius matrix-vector multiplication `M ⊗ x`.
    pub fn mobius_matvec(&self, m: &Matrix<S>, x: &[S]) -> Vec<S> {
        let g = self.branch();
        let mx = m.matvec(x);
        if g == Geometry::Flat {
            return mx;
        }
        if is_zero(&mx) || is_zero(x) {
            return vec![S::zero(); m.rows];
        }
        let sk = self.sqrt_abs();
        let xn = linalg::norm2(x);
        let mxn = linalg::norm2(&mx);
        let mag = self.tan_k(g, (mxn / xn) * self.artan_k(g, sk * xn)) / sk;
        self.project(linalg::scale(&mx, mag / mxn))
    }

    /// Exponential map at `x` applied to tangent vector `v`.
    pub fn exp(&self, x: &[S], v: &[S]) -> Vec<S> {
        let g = self.branch();
        if g == Geometry::Flat {
            return linalg::add(x, v);
        }
        if is_zero(v) {
            return x.to_vec();
        }
        let sk = self.sqrt_abs();
        let lambda = self.conformal_factor(x);
        let vn = linalg::norm2(v);
        let mag = self.tan_k(g, sk * lambda * vn / S::from_f64(2.0)) / (sk * vn);
        let step = linalg::scale(v, mag);
        self.mobius_add(x, &step)
    }

    /// Logarithmic map at `x` of point `y`.
    pub fn log(&self, x: &[S], y: &[S]) -> Vec<S> {
        let g = self.branch();
        if g == Geometry::Flat {
            return linalg::sub(y, x);
        }
        if x.iter().zip(y).all(|(a, b)| a.value() == b.value()) {
            return vec![S::zero(); x.len()];
        }
        let w = self.mobius_add(&linalg::neg(x), y);
        if is_zero(&w) {
            return vec![S::zero(); x.len()];
        }
        let sk = self.sqrt_abs();
        let lambda = self.conformal_factor(x);
        let wn = linalg::norm2(&w);
        let mag = S::from_f64(2.0) * self.artan_k(g, sk * wn) / (lambda * sk * wn);
        linalg::scale(&w, mag)
    }

    /// Exponential map at the origin.
    pub fn exp0(&self, v: &[S]) -> Vec<S> {
        let g = self.branch();
        if g == Geometry::Flat {
            return self.project(v.to_vec());
        }
        if is_zero(v) {
            return v.to_vec();
        }
        let sk = self.sqrt_abs();
        let vn = linalg::norm2(v);
        let mag = self.tan_k(g, sk * vn) / (sk * vn);
        self.project(linalg::scale(v, mag))
    }

    /// Logarithmic map at the origin.
    pub fn log0(&self, y: &[S]) -> Vec<S> {
        let g = self.branch();
        if g == Geometry::Flat {
            return y.to_vec();
        }
        if is_zero(y) {
            return y.to_vec();
        }
        let sk = self.sqrt_abs();
        let yn = linalg::norm2(y);
        let mag = self.artan_k(g, sk * yn) / (sk * yn);
        linalg::scale(y, mag)
    }

    /// Geodesic distance.
    pub fn distance(&self, x: &[S], y: &[S]) -> S {
        let g = self.branch();
        let w = match g {
            Geometry::Flat => linalg::sub(y, x),
            _ => self.mobius_add(&linalg::neg(x), y),
        };
        if is_zero(&w) {
            return S::zero();
        }
        let wn = linalg::norm2(&w);
        match g {
            Geometry::Flat => S::from_f64(2.0) * wn,
            _ => {
                let sk = self.sqrt_abs();
                S::from_f64(2.0) * self.artan_k(g, sk * wn) / sk
            }
        }
    }

    /// Weighted gyro-midpoint of `points` with nonnegative `weights`.
    ///
    /// Panics on empty input or mismatched lengths; the checked wrapper in
    /// [`point`] reports those as errors.
    pub fn gyromidpoint(&self, points: &[Vec<S>], weights: &[S]) -> Vec<S> {
        assert!(!points.is_empty(), "gyromidpoint of empty set");
        assert_eq!(points.len(), weights.len());
        let dim = points[0].len();
        let g = self.branch();
        let coeffs: Vec<S> = match g {
            Geometry::Flat => {
                let total = S::sum(weights);
                weights.iter().map(|&w| w / total).collect()
            }
            _ => {
                let one = S::one();
                let lambdas: Vec<S> = points.iter().map(|p| self.conformal_factor(p)).collect();
                let shifted: Vec<S> = lambdas.iter().map(|&l| l - one).collect();
                let denom = self.guard_denom(S::dot(weights, &shifted));
                weights
                    .iter()
                    .zip(&lambdas)
                    .map(|(&w, &l)| w * l / denom)
                    .collect()
            }
        };
        let combined: Vec<S> = (0..dim)
            .map(|k| {
                let col: Vec<S> = points.iter().map(|p| p[k]).collect();
                S::dot(&coeffs, &col)
            })
            .collect();
        match g {
            Geometry::Flat => combined,
            _ => self.mobius_scalar_mul(S::from_f64(0.5), &combined),
        }
    }

    /// `exp_o^{target}(log_o^{self}(x))`.
    pub fn transfer(&self, x: &[S], target: &Curvature<S>) -> Vec<S> {
        target.exp0(&self.log0(x))
    }
}

fn is_zero<S: Real>(x: &[S]) -> bool {
    x.iter().all(|c| c.value() == 0.0)
}
