//! Vector and matrix primitives over any [`Real`].
//!
//! These are the tensor-level building blocks the differentiable model is
//! assembled from (matmul, concat, sum, mean, max-pool, norm, broadcast).

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Real> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![S::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::from_f64(s);
        }
        m
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        self.data[r * self.cols + c]
    }

    /// `self · x`.
    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows).map(|r| S::dot(self.row(r), x)).collect()
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut data = Vec::with_capacity(self.rows * other.cols);
        let cols: Vec<Vec<S>> = (0..other.cols)
            .map(|c| (0..other.rows).map(|r| other.get(r, c)).collect())
            .collect();
        for r in 0..self.rows {
            for col in &cols {
                data.push(S::dot(self.row(r), col));
            }
        }
        Matrix::new(self.rows, other.cols, data)
    }

    pub fn map<T: Real>(&self, f: impl Fn(S) -> T) -> Matrix<T> {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|&x| f(x)).collect())
    }
}

pub fn add<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn sub<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn mul<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).collect()
}

pub fn scale<S: Real>(a: &[S], s: S) -> Vec<S> {
    a.iter().map(|&x| x * s).collect()
}

pub fn neg<S: Real>(a: &[S]) -> Vec<S> {
    a.iter().map(|&x| -x).collect()
}

/// `a·x + b·y` elementwise.
pub fn axpby<S: Real>(a: S, x: &[S], b: S, y: &[S]) -> Vec<S> {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(&xi, &yi)| S::lin2(a, xi, b, yi)).collect()
}

pub fn concat<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v
}

pub fn broadcast<S: Real>(s: S, n: usize) -> Vec<S> {
    vec![s; n]
}

pub fn norm_sq<S: Real>(a: &[S]) -> S {
    S::dot(a, a)
}

/// Euclidean norm.
pub fn norm2<S: Real>(a: &[S]) -> S {
    norm_sq(a).sqrt()
}

pub fn mean<S: Real>(a: &[S]) -> S {
    S::sum(a) / S::from_f64(a.len() as f64)
}

/// Elementwise mean of equal-length vectors.
pub fn mean_pool<S: Real>(xs: &[Vec<S>]) -> Vec<S> {
    assert!(!xs.is_empty(), "mean_pool of empty set");
    let n = xs[0].len();
    let inv = S::from_f64(1.0 / xs.len() as f64);
    (0..n)
        .map(|k| {
            let col: Vec<S> = xs.iter().map(|x| x[k]).collect();
            S::sum(&col) * inv
        })
        .collect()
}

/// Elementwise maximum of equal-length vectors.
pub fn max_pool<S: Real>(xs: &[Vec<S>]) -> Vec<S> {
    assert!(!xs.is_empty(), "max_pool of empty set");
    let n = xs[0].len();
    (0..n)
        .map(|k| {
            xs[1..]
                .iter()
                .fold(xs[0][k], |acc, x| acc.maximum(x[k]))
        })
        .collect()
}

/// Rescale `a` onto the ball of radius `max` if it lies outside.
pub fn clip_norm<S: Real>(a: &[S], max: f64) -> Vec<S> {
    let n = norm2(a);
    if n.value() > max {
        scale(a, S::from_f64(max) / n)
    } else {
        a.to_vec()
    }
}

pub fn tanh<S: Real>(a: &[S]) -> Vec<S> {
    a.iter().map(|&x| x.tanh()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_matches_hand_product() {
        let a = Matrix::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = Matrix::new(3, 2, vec![7.0, 8.0, 9.0, 10.0, 11.0, 12.0]);
        let c = a.matmul(&b);
        assert_eq!(c.data, vec![58.0, 64.0, 139.0, 154.0]);
    }

    #[test]
    fn pools() {
        let xs = vec![vec![1.0, -2.0], vec![3.0, -4.0], vec![-1.0, 0.5]];
        assert_eq!(max_pool(&xs), vec![3.0, 0.5]);
        assert_eq!(mean_pool(&xs), vec![1.0, -5.5 / 3.0]);
    }
}
