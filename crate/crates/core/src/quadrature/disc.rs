use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::gauss_jacobi::radial_rule;
use super::spec::{Estimate, QuadratureSpec};
use super::tanh_sinh::{integrate_pieces, level_cap};
use crate::error::{Error, Result};

/// `∫_𝔻 f dA` with `A(𝔻) = 1`.
///
/// Without flagged points this is a polar product rule: Gauss in `r` for the
/// weight `2r dr` times the trapezoid rule in the angle, with the error taken
/// against the rule of half the size in both directions. With `singular`
/// points the integral is computed as iterated tanh-sinh, cut at the radius
/// and the angle of each flagged point, which handles `|w − w₀|^σ`, `σ > −2`.
pub fn disc_integrate(
    f: impl Fn(Complex64) -> Complex64,
    spec: &QuadratureSpec,
    singular: &[Complex64],
) -> Result<Estimate<Complex64>> {
    spec.validate()?;
    let est = if singular.is_empty() { polar_product(&f, spec) } else { iterated(&f, spec, singular) };
    if est.error > spec.target_tol || !(est.value.re.is_finite() && est.value.im.is_finite()) {
        return Err(Error::Nonconvergence { value: est.value.norm(), error: est.error });
    }
    Ok(est)
}

fn product_rule(f: &impl Fn(Complex64) -> Complex64, order: usize, n: usize) -> Complex64 {
    let rule = radial_rule(order);
    let h = TAU / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(r, w) in rule.iter() {
        let mut ring = Complex64::new(0.0, 0.0);
        for k in 0..n {
            ring += f(Complex64::from_polar(r, h * k as f64));
        }
        acc += ring * (w / n as f64);
    }
    acc
}

fn polar_product(f: &impl Fn(Complex64) -> Complex64, spec: &QuadratureSpec) -> Estimate<Complex64> {
    let (mut order, mut n) = (spec.radial_order, spec.angular_points);
    let mut coarse = product_rule(f, (order / 2).max(2), n / 2);
    for _ in 0..=spec.max_refine {
        let fine = product_rule(f, order, n);
        let err = (fine - coarse).norm();
        if err <= spec.target_tol {
            return Estimate::new(fine, err);
        }
        coarse = fine;
        order *= 2;
        n *= 2;
        if order > 512 {
            return Estimate::new(fine, err);
        }
    }
    Estimate::new(coarse, f64::INFINITY)
}

fn iterated(f: &impl Fn(Complex64) -> Complex64, spec: &QuadratureSpec, singular: &[Complex64]) -> Estimate<Complex64> {
    let levels = level_cap(spec);
    let radii: Vec<f64> = singular.iter().map(|w| w.norm()).collect();
    let angles: Vec<f64> = singular.iter().map(|w| w.arg().rem_euclid(TAU)).collect();
    let tol = spec.target_tol;
    let inner_err = std::cell::Cell::new(0.0_f64);
    let outer = integrate_pieces(
        |r: f64| {
            let e = integrate_pieces(|t: f64| f(Complex64::from_polar(r, t)), 0.0, TAU, &angles, tol * 0.1, levels);
            inner_err.set(inner_err.get().max(e.error * r));
            e.value * (r / PI)
        },
        0.0,
        1.0,
        &radii,
        tol * 0.5,
        levels,
    );
    // Each inner error is weighted by r/π in the outer integral.
    Estimate::new(outer.value, outer.error + inner_err.get() / PI)
}
