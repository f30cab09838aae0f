//! Khintchin constants for Steinhaus sums `Σ c_j z_j`.
//!
//! With `‖c‖₂ = 1`, the functional `𝒦ₚ(c) = ‖Σ c_j z_j‖_{H^p}` lies between
//! `aₚ = min(1, Γ(1+p/2)^{1/p})` and `bₚ = max(1, Γ(1+p/2)^{1/p})`. Its
//! critical points on the sphere are the 1-homogeneous Hilbert points.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{linear_even_moment, PValue};
use crate::multinomial::equal_moment;
use crate::polyalg::{rat_to_f64, CoefVec};
use crate::quadrature::{torus_mean_power, Estimate, QuadratureSpec};
use crate::special::ln_gamma_signed;

/// Largest dimension handled by quadrature when `p` is not an even integer.
pub const QUADRATURE_MAX_D: usize = 6;

/// Finite-difference step on the sphere.
pub const GRADIENT_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KhintchinConstants {
    pub p: f64,
    pub a_p: f64,
    pub b_p: f64,
}

/// `Γ(1+p/2)^{1/p}`, the `p`-th moment root of a standard complex Gaussian.
pub fn gaussian_moment_root(p: f64) -> f64 {
    (ln_gamma_signed(1.0 + 0.5 * p).0 / p).exp()
}

pub fn constants(p: f64) -> Result<KhintchinConstants> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be a finite number ≥ 1, got {p}")));
    }
    let g = if p == 2.0 { 1.0 } else { gaussian_moment_root(p) };
    Ok(KhintchinConstants { p, a_p: g.min(1.0), b_p: g.max(1.0) })
}

fn check_unit(c: &CoefVec) -> Result<()> {
    let n = c.h2_norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("the coefficient vector must have unit norm, got {n}")));
    }
    Ok(())
}

/// `‖Σ c_j z_j‖_{H^p}` for a unit vector `c`; exact moments at even `p`.
pub fn k_functional(c: &CoefVec, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_unit(c)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be a finite number ≥ 1, got {p}")));
    }
    if let Some(n) = PValue::Finite(p).even_index() {
        let m = linear_even_moment(c, n + 1).to_c64().re;
        return Ok(Estimate::exact(m.powf(1.0 / p)));
    }
    let m = torus_mean_power(&c.moduli(), p, spec)?;
    Ok(root_estimate(m, p))
}

/// `E^{1/p}` with the error carried through the derivative of the root.
fn root_estimate(m: Estimate, p: f64) -> Estimate {
    let v = m.value.powf(1.0 / p);
    Estimate::new(v, v / (p * m.value) * m.error)
}

/// `‖d^{−1/2}(z₁+⋯+z_d)‖_{2n}^{2n} = Σ_{|α|=n} C(n,α)² / dⁿ`, exactly.
pub fn equal_coeff_moment_even(d: usize, n: u32) -> Result<BigRational> {
    if d == 0 {
        return Err(Error::invalid("d must be at least 1"));
    }
    let num = BigInt::from(equal_moment(d, n));
    Ok(BigRational::new(num, BigInt::from(d).pow(n)))
}

/// `‖d^{−1/2}(z₁+⋯+z_d)‖_{H^p}`, exact at even `p` and by quadrature for
/// other `p` up to [`QUADRATURE_MAX_D`] variables.
pub fn equal_coeff_norm(d: usize, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if d == 0 {
        return Err(Error::invalid("d must be at least 1"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be a finite number ≥ 1, got {p}")));
    }
    if let Some(n) = PValue::Finite(p).even_index() {
        let m = rat_to_f64(&equal_coeff_moment_even(d, n + 1)?);
        return Ok(Estimate::exact(m.powf(1.0 / p)));
    }
    if d > QUADRATURE_MAX_D {
        return Err(Error::BudgetExceeded(format!(
            "d = {d} is beyond the quadrature budget (d ≤ {QUADRATURE_MAX_D}) at p = {p}; use an even p for larger d"
        )));
    }
    let m = torus_mean_power(&vec![(d as f64).powf(-0.5); d], p, spec)?;
    Ok(root_estimate(m, p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltRow {
    pub d: usize,
    pub norm: f64,
    pub error: f64,
    pub bound: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltReport {
    pub p: f64,
    pub b_p: f64,
    pub rows: Vec<CltRow>,
    /// Whether the norms increase strictly along `d_list` (beyond their errors).
    pub monotone: bool,
    pub final_gap: f64,
}

/// Tabulates [`equal_coeff_norm`] against `bₚ` for `p > 2`, where the norms
/// increase towards the Gaussian moment as `d → ∞`.
pub fn clt_limit_check(p: f64, d_list: &[usize], spec: &QuadratureSpec) -> Result<CltReport> {
    if !(p > 2.0) {
        return Err(Error::invalid(format!("the limit check needs p > 2, got {p}")));
    }
    let b_p = constants(p)?.b_p;
    let mut rows = Vec::with_capacity(d_list.len());
    for &d in d_list {
        let e = equal_coeff_norm(d, p, spec)?;
        rows.push(CltRow { d, norm: e.value, error: e.error, bound: b_p, gap: b_p - e.value });
    }
    let monotone = rows.windows(2).all(|w| w[1].d > w[0].d && w[1].norm - w[0].norm > w[0].error + w[1].error);
    let final_gap = rows.last().map_or(f64::NAN, |r| r.gap);
    Ok(CltReport { p, b_p, rows, monotone, final_gap })
}

/// Gradient of `𝒦ₚ` restricted to the unit sphere of `ℂ^d = ℝ^{2d}`.
///
/// Components are taken along an orthonormal basis of the tangent space at
/// `c` by central differences along great circles with step
/// [`GRADIENT_STEP`]. Returns the `2d − 1` components.
pub fn sphere_gradient(c: &CoefVec, p: f64, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    check_unit(c)?;
    let x: Vec<f64> = c.to_c64().iter().flat_map(|z| [z.re, z.im]).collect();
    let n = x.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for b in std::iter::once(&x).chain(basis.iter()) {
            let dot: f64 = v.iter().zip(b).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(b).for_each(|(a, b)| *a -= dot * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 && basis.len() < n - 1 {
            v.iter_mut().for_each(|a| *a /= norm);
            basis.push(v);
        }
    }
    let h = GRADIENT_STEP;
    let eval = |v: &[f64], t: f64| -> Result<f64> {
        let y: Vec<num_complex::Complex64> = (0..n / 2)
            .map(|j| {
                let re = t.cos() * x[2 * j] + t.sin() * v[2 * j];
                let im = t.cos() * x[2 * j + 1] + t.sin() * v[2 * j + 1];
                num_complex::Complex64::new(re, im)
            })
            .collect();
        Ok(k_functional(&CoefVec::from_c64(&y)?, p, spec)?.value)
    };
    basis.iter().map(|v| Ok((eval(v, h)? - eval(v, -h)?) / (2.0 * h))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_examples() {
        let c2 = constants(2.0).unwrap();
        assert_eq!((c2.a_p, c2.b_p), (1.0, 1.0));
        assert!((constants(4.0).unwrap().b_p - 2f64.powf(0.25)).abs() < 1e-14);
        let a1 = constants(1.0).unwrap().a_p;
        assert!((a1 - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        assert!(constants(0.5).is_err());
    }

    #[test]
    fn even_norms_are_closed_form() {
        for d in 1..=10usize {
            let m = equal_coeff_moment_even(d, 2).unwrap();
            let want = BigRational::new(BigInt::from(2 * d - 1), BigInt::from(d));
            assert_eq!(m, want);
        }
    }

    #[test]
    fn clt_rejects_p_two() {
        assert!(clt_limit_check(2.0, &[1, 2], &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn large_d_needs_even_p() {
        let spec = QuadratureSpec::default();
        assert!(matches!(equal_coeff_norm(7, 3.0, &spec), Err(Error::BudgetExceeded(_))));
        assert!(equal_coeff_norm(50, 6.0, &spec).is_ok());
    }
}
