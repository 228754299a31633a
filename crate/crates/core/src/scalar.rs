//! Scalar abstraction shared by every numeric kernel in the crate.
//!
//! All geometry, estimator and model code is written against [`Real`], so the
//! same source runs on plain `f32`/`f64` and on the reverse-mode
//! [`Var`](crate::diff::Var) used during training.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// A real scalar: plain floating point or a differentiable variable.
///
/// Comparisons (`PartialOrd`) and [`Real::value`] always act on the primal
/// value, which is what branch selection in the kernels relies on.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;

    /// Primal value as `f64`.
    fn value(self) -> f64;

    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn tanh(self) -> Self;
    fn tan(self) -> Self;
    fn atan(self) -> Self;
    fn cos(self) -> Self;
    fn abs(self) -> Self;

    /// Inverse hyperbolic tangent with the argument clamped to
    /// `[-1 + 1e-12, 1 - 1e-12]`.
    fn atanh(self) -> Self;

    /// Clamp to `[lo, hi]`. Outside the interval the result is constant and
    /// carries no gradient.
    fn clamp(self, lo: f64, hi: f64) -> Self;

    fn sigmoid(self) -> Self {
        let one = Self::from_f64(1.0);
        one / (one + (-self).exp())
    }

    /// Larger of two values; the gradient follows the selected operand.
    fn maximum(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Inner product of two equal-length slices.
    fn dot(a: &[Self], b: &[Self]) -> Self {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .fold(Self::zero(), |acc, (&x, &y)| acc + x * y)
    }

    fn sum(xs: &[Self]) -> Self {
        xs.iter().fold(Self::zero(), |acc, &x| acc + x)
    }

    /// `a * x + b * y`.
    fn lin2(a: Self, x: Self, b: Self, y: Self) -> Self {
        a * x + b * y
    }
}

impl<T> Real for T
where
    T: Float + FromPrimitive + ToPrimitive + Debug,
{
    #[inline]
    fn from_f64(x: f64) -> Self {
        T::from_f64(x).expect("f64 representable")
    }

    #[inline]
    fn value(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn sqrt(self) -> Self {
        Float::sqrt(self)
    }

    #[inline]
    fn exp(self) -> Self {
        Float::exp(self)
    }

    #[inline]
    fn ln(self) -> Self {
        Float::ln(self)
    }

    #[inline]
    fn tanh(self) -> Self {
        Float::tanh(self)
    }

    #[inline]
    fn tan(self) -> Self {
        Float::tan(self)
    }

    #[inline]
    fn atan(self) -> Self {
        Float::atan(self)
    }

    #[inline]
    fn cos(self) -> Self {
        Float::cos(self)
    }

    #[inline]
    fn abs(self) -> Self {
        Float::abs(self)
    }

    #[inline]
    fn atanh(self) -> Self {
        let lim = <Self as Real>::from_f64(1.0 - ATANH_MARGIN);
        let x = if self > lim {
            lim
        } else if self < -lim {
            -lim
        } else {
            self
        };
        Float::atanh(x)
    }

    #[inline]
    fn clamp(self, lo: f64, hi: f64) -> Self {
        let v = self.value();
        if v < lo {
            <Self as Real>::from_f64(lo)
        } else if v > hi {
            <Self as Real>::from_f64(hi)
        } else {
            self
        }
    }
}

/// Margin kept from ±1 inside `atanh`.
pub const ATANH_MARGIN: f64 = 1e-12;

/// Convert a slice of plain values into any scalar type.
pub fn lift<S: Real>(xs: &[f64]) -> Vec<S> {
    xs.iter().map(|&x| S::from_f64(x)).collect()
}

/// Primal values of a slice.
pub fn values<S: Real>(xs: &[S]) -> Vec<f64> {
    xs.iter().map(|x| x.value()).collect()
}
