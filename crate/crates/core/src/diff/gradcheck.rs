use super::tape::{Tape, Var};
use crate::scalar::Real;

/// Outcome for one input coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordStatus {
    Smooth,
    /// A clamp, absolute value or max switched branch inside the stencil.
    NonSmooth,
    NonFinite,
}

#[derive(Clone, Debug)]
pub struct CoordCheck {
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
    pub status: CoordStatus,
}

#[derive(Clone, Debug)]
pub struct GradCheckReport {
    pub coords: Vec<CoordCheck>,
    /// Largest relative error over smooth coordinates.
    pub max_rel_error: f64,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error < self.tolerance
            && self
                .coords
                .iter()
                .all(|c| c.status != CoordStatus::NonFinite)
    }

    pub fn non_smooth(&self) -> Vec<usize> {
        self.coords
            .iter()
            .filter(|c| c.status == CoordStatus::NonSmooth)
            .map(|c| c.index)
            .collect()
    }
}

/// Relative error floor below which gradients are compared absolutely.
const SCALE_FLOOR: f64 = 1e-3;

fn evaluate<F>(f: &F, x: &[f64]) -> (f64, Vec<bool>)
where
    F: for<'t> Fn(&[Var<'t>]) -> Var<'t>,
{
    let tape = Tape::new();
    let vars = tape.vars(x);
    let y = f(&vars);
    (y.value(), tape.kink_signature())
}

/// Compare reverse-mode gradients of `f` at `point` with central finite
/// differences of step `step`.
pub fn gradient_check<F>(f: F, point: &[f64], step: f64, tolerance: f64) -> GradCheckReport
where
    F: for<'t> Fn(&[Var<'t>]) -> Var<'t>,
{
    let tape = Tape::new();
    let vars = tape.vars(point);
    let y = f(&vars);
    let base_kinks = tape.kink_signature();
    let analytic = match tape.gradient(y) {
        Ok(g) => g.wrt_all(&vars),
        Err(_) => vec![f64::NAN; point.len()],
    };
    drop(vars);

    let mut coords = Vec::with_capacity(point.len());
    let mut max_rel_error: f64 = 0.0;
    for i in 0..point.len() {
        let mut xp = point.to_vec();
        let mut xm = point.to_vec();
        xp[i] += step;
        xm[i] -= step;
        let (fp, kp) = evaluate(&f, &xp);
        let (fm, km) = evaluate(&f, &xm);
        let numeric = (fp - fm) / (2.0 * step);
        let a = analytic[i];
        let status = if !a.is_finite() || !numeric.is_finite() {
            CoordStatus::NonFinite
        } else if kp != base_kinks || km != base_kinks {
            CoordStatus::NonSmooth
        } else {
            CoordStatus::Smooth
        };
        let scale = a.abs().max(numeric.abs()).max(SCALE_FLOOR);
        let rel_error = (a - numeric).abs() / scale;
        if status == CoordStatus::Smooth {
            max_rel_error = max_rel_error.max(rel_error);
        }
        coords.push(CoordCheck {
            index: i,
            analytic: a,
            numeric,
            rel_error,
            status,
        });
    }
    GradCheckReport {
        coords,
        max_rel_error,
        tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;


    #[test]
    fn linear_function_is_exact() {
        let r = gradient_check(
            |x| Var::from_f64(3.0) * x[0] - Var::from_f64(2.0) * x[1] + x[2],
            &[0.1, 0.2, 0.3],
            1e-6,
            1e-4,
        );
        assert!(r.passed());
        assert!(r.max_rel_error < 1e-8, "{}", r.max_rel_error);
    }

    #[test]
    fn norm_gradient_at_three_four() {
        let r = gradient_check(|x| linalg::norm2(x), &[3.0, 4.0], 1e-6, 1e-4);
        assert!(r.passed());
        assert!((r.coords[0].analytic - 0.6).abs() < 1e-15);
        assert!((r.coords[1].analytic - 0.8).abs() < 1e-15);
    }

    #[test]
    fn active_clamp_boundary_is_flagged() {
        let r = gradient_check(
            |x| x[0].clamp(-1.0, 1.0) * x[1],
            &[1.0, 2.0],
            1e-6,
            1e-4,
        );
        assert_eq!(r.non_smooth(), vec![0]);
        assert_eq!(r.coords[1].status, CoordStatus::Smooth);
    }

    #[test]
    fn non_finite_is_reported() {
        let r = gradient_check(|x| x[0].ln(), &[0.0], 1e-6, 1e-4);
        assert_eq!(r.coords[0].status, CoordStatus::NonFinite);
        assert!(!r.passed());
    }
}
