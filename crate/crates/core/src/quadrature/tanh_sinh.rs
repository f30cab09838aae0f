use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use super::spec::{Estimate, QuadratureSpec};
use crate::error::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait QValue: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

const T_MAX: f64 = 4.5;
const MIN_LEVEL: u32 = 3;

/// Double-exponential (tanh-sinh) quadrature of `f` over `[a, b]`.
///
/// The step is halved until two successive levels agree to `tol` (absolute)
/// or `max_level` is reached; that difference is the reported error. Nodes
/// are placed by their distance to the nearer endpoint, so integrable endpoint
/// singularities are never sampled. Non-finite samples are dropped.
pub fn tanh_sinh<T: QValue>(f: impl Fn(f64) -> T, a: f64, b: f64, tol: f64, max_level: u32) -> Estimate<T> {
    if !(b > a) {
        return Estimate::exact(T::zero());
    }
    let half = 0.5 * (b - a);
    let sample = |t: f64| -> T {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch) * half;
        if !(w > 0.0) {
            return T::zero();
        }
        let e = (-2.0 * u.abs()).exp();
        let dist = half * 2.0 * e / (1.0 + e);
        let x = if t == 0.0 {
            a + half
        } else if t > 0.0 {
            b - dist
        } else {
            a + dist
        };
        if x <= a || x >= b {
            return T::zero();
        }
        let v = f(x);
        if v.is_finite_value() {
            v * w
        } else {
            T::zero()
        }
    };

    let n0 = T_MAX as i64;
    let mut sum = T::zero();
    for k in -n0..=n0 {
        sum = sum + sample(k as f64);
    }
    let mut h = 1.0;
    let mut prev = sum * h;
    let mut error = f64::INFINITY;
    let max_level = max_level.max(MIN_LEVEL);
    for level in 1..=max_level {
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            sum = sum + sample(t) + sample(-t);
            t += 2.0 * h;
        }
        let cur = sum * h;
        error = (cur + prev * -1.0).magnitude();
        prev = cur;
        if level >= MIN_LEVEL && error <= tol {
            break;
        }
    }
    Estimate::new(prev, error)
}

/// Sums [`tanh_sinh`] over the pieces cut out of `[a, b]` by `breaks`.
///
/// Break points outside `(a, b)` are ignored; the tolerance is shared evenly.
pub fn integrate_pieces<T: QValue>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
    max_level: u32,
) -> Estimate<T> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b && x.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (b - a));
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(a);
    edges.extend(pts);
    edges.push(b);
    let share = tol / (edges.len() - 1) as f64;
    let mut total = Estimate::exact(T::zero());
    for w in edges.windows(2) {
        let piece = tanh_sinh(&f, w[0], w[1], share, max_level);
        total.value = total.value + piece.value;
        total.error += piece.error;
    }
    total
}

/// `∫_a^b f` to `spec.target_tol`, failing when the tolerance is not met.
pub fn integrate_interval(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    let est = integrate_pieces(f, a, b, breaks, spec.target_tol, MIN_LEVEL + spec.max_refine);
    if est.error > spec.target_tol || !est.value.is_finite() {
        return Err(Error::Nonconvergence { value: est.value, error: est.error });
    }
    Ok(est)
}

/// Level cap used when a spec drives nested tanh-sinh rules.
pub(crate) fn level_cap(spec: &QuadratureSpec) -> u32 {
    (MIN_LEVEL + spec.max_refine).min(12)
}
