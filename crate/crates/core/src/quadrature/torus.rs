use std::f64::consts::TAU;

use num_complex::Complex64;

use super::spec::{Estimate, QuadratureSpec};
use super::tanh_sinh::QValue;
use crate::error::{Error, Result};

/// Largest tensor grid (total points) the trapezoid rules will build.
const GRID_CAP: usize = 1 << 24;

/// Equal-weight rule on `𝕋^k` in angle coordinates, doubling the per-axis
/// count from `n0` until two successive grids agree to `tol`.
///
/// Points of the coarser grid are reused, so each doubling costs only the
/// new nodes. Stops at `n_max` points per axis (or the grid cap) and reports
/// the last difference as the error.
pub fn trapezoid_progressive<T: QValue>(
    k: usize,
    f: impl Fn(&[f64]) -> T,
    n0: usize,
    tol: f64,
    n_max: usize,
) -> Estimate<T> {
    if k == 0 {
        return Estimate::exact(f(&[]));
    }
    let mut n = n0.max(1);
    let mut raw = grid_sum(k, n, &f, false);
    let mut prev = raw * (1.0 / (n as f64).powi(k as i32));
    let mut error = f64::INFINITY;
    loop {
        let next = 2 * n;
        if next > n_max || next.checked_pow(k as u32).map_or(true, |m| m > GRID_CAP) {
            break;
        }
        raw = raw + grid_sum(k, next, &f, true);
        n = next;
        let cur = raw * (1.0 / (n as f64).powi(k as i32));
        error = (cur + prev * -1.0).magnitude();
        prev = cur;
        if error <= tol {
            break;
        }
    }
    Estimate::new(prev, error)
}

/// Raw sum over the `n^k` grid; with `skip_even`, nodes whose indices are all
/// even (the previous grid) are left out.
fn grid_sum<T: QValue>(k: usize, n: usize, f: &impl Fn(&[f64]) -> T, skip_even: bool) -> T {
    let mut idx = vec![0usize; k];
    let mut theta = vec![0.0; k];
    let mut acc = T::zero();
    let h = TAU / n as f64;
    loop {
        if !(skip_even && idx.iter().all(|i| i % 2 == 0)) {
            for (t, &i) in theta.iter_mut().zip(&idx) {
                *t = h * i as f64;
            }
            acc = acc + f(&theta);
        }
        let mut d = 0;
        loop {
            if d == k {
                return acc;
            }
            idx[d] += 1;
            if idx[d] < n {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// `∫_{𝕋^k} f dm_k` by the tensor trapezoid rule.
///
/// Starts with `spec.angular_points` nodes per axis, estimates the error
/// against the half grid, and doubles up to `spec.max_refine` times.
pub fn torus_integrate(
    k: usize,
    f: impl Fn(&[Complex64]) -> Complex64,
    spec: &QuadratureSpec,
) -> Result<Estimate<Complex64>> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::invalid("torus dimension must be at least 1"));
    }
    let n0 = spec.angular_points / 2;
    if n0.checked_pow(k as u32).map_or(true, |m| m > GRID_CAP) {
        return Err(Error::BudgetExceeded(format!("{}^{k} grid points", spec.angular_points)));
    }
    let n_max = spec.angular_points << spec.max_refine;
    let est = trapezoid_progressive(
        k,
        |theta: &[f64]| {
            let z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            f(&z)
        },
        n0,
        spec.target_tol,
        n_max,
    );
    if est.error > spec.target_tol {
        return Err(Error::Nonconvergence { value: est.value.norm(), error: est.error });
    }
    Ok(est)
}
