//! Wengert-list reverse-mode differentiation.
//!
//! Every operation on a [`Var`] records its primal value together with the
//! local partial derivative towards each parent. `backward` is then a single
//! reverse sweep over the list. Vectors and matrices are slices of `Var`;
//! inner products and sums are recorded as one fused node each.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{Real, ATANH_MARGIN};

use super::DiffError;

/// Operation tag kept per node, used in diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Leaf,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Sqrt,
    Exp,
    Ln,
    Tanh,
    Tan,
    Atan,
    Atanh,
    Cos,
    Abs,
    Clamp,
    Sigmoid,
    Dot,
    Sum,
    Lin2,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Default)]
struct TapeData {
    values: Vec<f64>,
    ops: Vec<Op>,
    starts: Vec<u32>,
    parents: Vec<u32>,
    partials: Vec<f64>,
    kinks: Vec<bool>,
}

/// Recording tape. Variables borrow it, so one tape lives for one
/// forward/backward pass.
#[derive(Default)]
pub struct Tape {
    data: RefCell<TapeData>,
}

const CONST: u32 = u32::MAX;

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(nodes: usize) -> Self {
        let data = TapeData {
            values: Vec::with_capacity(nodes),
            ops: Vec::with_capacity(nodes),
            starts: Vec::with_capacity(nodes),
            parents: Vec::with_capacity(nodes * 4),
            partials: Vec::with_capacity(nodes * 4),
            kinks: Vec::new(),
        };
        Tape {
            data: RefCell::new(data),
        }
    }

    /// New independent variable.
    pub fn var(&self, value: f64) -> Var<'_> {
        let idx = self.push(value, Op::Leaf, std::iter::empty());
        Var {
            tape: Some(self),
            idx,
            val: value,
        }
    }

    pub fn vars(&self, values: &[f64]) -> Vec<Var<'_>> {
        values.iter().map(|&v| self.var(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.data.borrow().values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Branch decisions taken by clamps, absolute values and maxima, in
    /// recording order.
    pub fn kink_signature(&self) -> Vec<bool> {
        self.data.borrow().kinks.clone()
    }

    fn record_kink(&self, side: bool) {
        self.data.borrow_mut().kinks.push(side);
    }

    fn push(&self, value: f64, op: Op, parents: impl Iterator<Item = (u32, f64)>) -> u32 {
        let mut d = self.data.borrow_mut();
        let idx = d.values.len() as u32;
        let start = d.parents.len() as u32;
        d.values.push(value);
        d.ops.push(op);
        d.starts.push(start);
        for (p, w) in parents {
            d.parents.push(p);
            d.partials.push(w);
        }
        idx
    }

    /// Reverse sweep from a scalar output.
    pub fn gradient(&self, output: Var<'_>) -> Result<Gradients, DiffError> {
        let d = self.data.borrow();
        if !output.val.is_finite() {
            let (node, op) = d
                .values
                .iter()
                .zip(&d.ops)
                .position(|(v, _)| !v.is_finite())
                .map(|i| (i, d.ops[i]))
                .unwrap_or((output.idx as usize, Op::Leaf));
            return Err(DiffError::NonFinite { node, op });
        }
        let mut grads = vec![0.0; d.values.len()];
        if output.idx == CONST {
            return Ok(Gradients { grads });
        }
        grads[output.idx as usize] = 1.0;
        for i in (0..=output.idx as usize).rev() {
            let g = grads[i];
            if g == 0.0 {
                continue;
            }
            let start = d.starts[i] as usize;
            let end = d
                .starts
                .get(i + 1)
                .map(|&s| s as usize)
                .unwrap_or(d.parents.len());
            for k in start..end {
                grads[d.parents[k] as usize] += d.partials[k] * g;
            }
        }
        Ok(Gradients { grads })
    }
}

/// Adjoints of every node on a tape.
#[derive(Clone, Debug)]
pub struct Gradients {
    grads: Vec<f64>,
}

impl Gradients {
    pub fn wrt(&self, v: &Var<'_>) -> f64 {
        if v.idx == CONST {
            0.0
        } else {
            self.grads[v.idx as usize]
        }
    }

    pub fn wrt_all(&self, vs: &[Var<'_>]) -> Vec<f64> {
        vs.iter().map(|v| self.wrt(v)).collect()
    }

    /// Raw adjoint by node index.
    pub fn node(&self, idx: usize) -> f64 {
        self.grads[idx]
    }
}

/// A differentiable scalar. Constants carry no tape.
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: Option<&'t Tape>,
    idx: u32,
    val: f64,
}

impl fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Var({})", self.val)
    }
}

impl<'t> Var<'t> {
    pub fn constant(val: f64) -> Self {
        Var {
            tape: None,
            idx: CONST,
            val,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.idx == CONST
    }

    /// Node index on the tape, `None` for constants.
    pub fn index(&self) -> Option<usize> {
        (self.idx != CONST).then_some(self.idx as usize)
    }

    fn unary(self, val: f64, op: Op, partial: f64) -> Self {
        match self.tape {
            None => Var::constant(val),
            Some(t) => Var {
                tape: Some(t),
                idx: t.push(val, op, std::iter::once((self.idx, partial))),
                val,
            },
        }
    }

    fn binary(self, other: Self, val: f64, op: Op, da: f64, db: f64) -> Self {
        match self.tape.or(other.tape) {
            None => Var::constant(val),
            Some(t) => {
                let ps = [(self.idx, da), (other.idx, db)];
                let idx = t.push(val, op, ps.into_iter().filter(|(i, _)| *i != CONST));
                Var {
                    tape: Some(t),
                    idx,
                    val,
                }
            }
        }
    }

    fn kink(&self, side: bool) {
        if let Some(t) = self.tape {
            t.record_kink(side);
        }
    }

}

impl PartialEq for Var<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.val == other.val
    }
}

impl PartialOrd for Var<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.val.partial_cmp(&other.val)
    }
}

impl<'t> Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Self) -> Self {
        self.binary(rhs, self.val + rhs.val, Op::Add, 1.0, 1.0)
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Self) -> Self {
        self.binary(rhs, self.val - rhs.val, Op::Sub, 1.0, -1.0)
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Self) -> Self {
        self.binary(rhs, self.val * rhs.val, Op::Mul, rhs.val, self.val)
    }
}

impl<'t> Div for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: Self) -> Self {
        let q = self.val / rhs.val;
        self.binary(rhs, q, Op::Div, 1.0 / rhs.val, -q / rhs.val)
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Self {
        self.unary(-self.val, Op::Neg, -1.0)
    }
}

impl<'t> Real for Var<'t> {
    fn from_f64(x: f64) -> Self {
        Var::constant(x)
    }

    fn value(self) -> f64 {
        self.val
    }

    fn sqrt(self) -> Self {
        let s = self.val.sqrt();
        self.unary(s, Op::Sqrt, 0.5 / s)
    }

    fn exp(self) -> Self {
        let e = self.val.exp();
        self.unary(e, Op::Exp, e)
    }

    fn ln(self) -> Self {
        self.unary(self.val.ln(), Op::Ln, 1.0 / self.val)
    }

    fn tanh(self) -> Self {
        let t = self.val.tanh();
        self.unary(t, Op::Tanh, 1.0 - t * t)
    }

    fn tan(self) -> Self {
        let t = self.val.tan();
        self.unary(t, Op::Tan, 1.0 + t * t)
    }

    fn atan(self) -> Self {
        self.unary(self.val.atan(), Op::Atan, 1.0 / (1.0 + self.val * self.val))
    }

    fn cos(self) -> Self {
        self.unary(self.val.cos(), Op::Cos, -self.val.sin())
    }

    fn abs(self) -> Self {
        self.kink(self.val >= 0.0);
        let sign = if self.val >= 0.0 { 1.0 } else { -1.0 };
        self.unary(self.val.abs(), Op::Abs, sign)
    }

    fn atanh(self) -> Self {
        let lim = 1.0 - ATANH_MARGIN;
        let inside = self.val.abs() <= lim;
        self.kink(inside);
        if inside {
            self.unary(self.val.atanh(), Op::Atanh, 1.0 / (1.0 - self.val * self.val))
        } else {
            Var::constant(self.val.clamp(-lim, lim).atanh())
        }
    }

    fn clamp(self, lo: f64, hi: f64) -> Self {
        let inside = self.val >= lo && self.val <= hi;
        self.kink(inside);
        if inside {
            self.unary(self.val, Op::Clamp, 1.0)
        } else {
            Var::constant(self.val.clamp(lo, hi))
        }
    }

    fn sigmoid(self) -> Self {
        let s = if self.val >= 0.0 {
            1.0 / (1.0 + (-self.val).exp())
        } else {
            let e = self.val.exp();
            e / (1.0 + e)
        };
        self.unary(s, Op::Sigmoid, s * (1.0 - s))
    }

    fn maximum(self, other: Self) -> Self {
        let pick_self = self.val >= other.val;
        if let Some(t) = self.tape.or(other.tape) {
            t.record_kink(pick_self);
        }
        if pick_self {
            self
        } else {
            other
        }
    }

    fn dot(a: &[Self], b: &[Self]) -> Self {
        debug_assert_eq!(a.len(), b.len());
        let val: f64 = a.iter().zip(b).map(|(x, y)| x.val * y.val).sum();
        let tape = a.iter().chain(b).find_map(|v| v.tape);
        match tape {
            None => Var::constant(val),
            Some(t) => {
                let ps = a
                    .iter()
                    .zip(b)
                    .flat_map(|(x, y)| [(x.idx, y.val), (y.idx, x.val)])
                    .filter(|(i, _)| *i != CONST);
                Var {
                    tape: Some(t),
                    idx: t.push(val, Op::Dot, ps),
                    val,
                }
            }
        }
    }

    fn sum(xs: &[Self]) -> Self {
        let val: f64 = xs.iter().map(|x| x.val).sum();
        match xs.iter().find_map(|v| v.tape) {
            None => Var::constant(val),
            Some(t) => {
                let ps = xs
                    .iter()
                    .map(|x| (x.idx, 1.0))
                    .filter(|(i, _)| *i != CONST);
                Var {
                    tape: Some(t),
                    idx: t.push(val, Op::Sum, ps),
                    val,
                }
            }
        }
    }

    fn lin2(a: Self, x: Self, b: Self, y: Self) -> Self {
        let val = a.val * x.val + b.val * y.val;
        match a.tape.or(x.tape).or(b.tape).or(y.tape) {
            None => Var::constant(val),
            Some(t) => {
                let ps = [
                    (a.idx, x.val),
                    (x.idx, a.val),
                    (b.idx, y.val),
                    (y.idx, b.val),
                ];
                let idx = t.push(val, Op::Lin2, ps.into_iter().filter(|(i, _)| *i != CONST));
                Var {
                    tape: Some(t),
                    idx,
                    val,
                }
            }
        }
    }
}
