//! The projection `P(|φ|^{p−2} φ)` of a 1-homogeneous polynomial `φ = Σ c_j z_j`.
//!
//! The result is again 1-homogeneous, with `j`-th coefficient
//! `(p/2) c_j I_j`, where
//!
//! ```text
//! I_j = ∫₀¹ ∫_{𝕋^d} |φ(z₁, …, r z_j, …, z_d)|^{p−2} dm_d(z) 2r dr .
//! ```
//!
//! Each `I_j` depends only on the moduli `|c_k|`. Writing `w = r z_j` turns it
//! into an area integral over the unit disc; one of the remaining torus
//! variables is fixed by rotation invariance, the next is removed by
//! [`ring_moduli`], and the disc integral collapses to a radial integral over
//! circles `|u| = ρ` weighted by the arc length they cut out of the disc.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multinomial::{compositions, multinomial};
use crate::polyalg::{Coef, CoefVec};
use crate::quadrature::{integrate_pieces, ring_moduli, torus_mean_power, trapezoid_progressive, Estimate, QuadratureSpec};

/// Default bound on `n·d` for the exact even-exponent formula.
pub const EVEN_ENUMERATION_CAP: u64 = 64;

const LEVEL_CAP: u32 = 12;

/// The integrals `I_1, …, I_d` for one coefficient vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IjValues {
    pub p: f64,
    pub values: Vec<f64>,
    pub error_estimates: Vec<f64>,
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be a finite number ≥ 1, got {p}")));
    }
    Ok(())
}

fn check_nontrivial(c: &CoefVec) -> Result<()> {
    if c.is_trivial() {
        return Err(Error::invalid("the zero polynomial has no projection direction"));
    }
    Ok(())
}

/// `2·arccos(x)` from `u = 1 − x` and `v = 1 + x`, each given in product form
/// so that no cancellation happens near `x = ±1`.
fn arc_from(u: f64, v: f64) -> f64 {
    4.0 * u.max(0.0).sqrt().atan2(v.max(0.0).sqrt())
}

/// `(1/(πa²)) ∫_{|u−c|<a} h(|u|) dArea(u)` for `a > 0`, `c ≥ 0`, i.e. the mean of
/// `h(|a w + c|)` over `w ∈ 𝔻`.
///
/// Written as `∫ h(ρ) L(ρ) ρ dρ` where `L(ρ)` is the angle of the circle
/// `|u| = ρ` inside the disc. The variable is shifted to the offset from `c`
/// (or from `a` when the disc contains the origin) so that `L` keeps full
/// relative precision even for very small or very eccentric discs.
pub(crate) fn disc_mean(a: f64, c: f64, h: impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> Estimate {
    let area = PI * a * a;
    let itol = tol * area;
    let e = if c >= a {
        let f = |dl: f64| {
            let rho = c + dl;
            if rho <= 0.0 {
                return 0.0;
            }
            let den = 2.0 * rho * c;
            let u = (a - dl) * (a + dl) / den;
            let v = (2.0 * c + dl - a) * (2.0 * c + dl + a) / den;
            h(rho) * arc_from(u, v) * rho
        };
        let shifted: Vec<f64> = breaks.iter().map(|b| b - c).collect();
        integrate_pieces(f, -a, a, &shifted, itol, LEVEL_CAP)
    } else {
        let inner = integrate_pieces(|rho: f64| h(rho) * 2.0 * PI * rho, 0.0, a - c, breaks, 0.5 * itol, LEVEL_CAP);
        let f = |dl: f64| {
            let rho = a + dl;
            let den = 2.0 * rho * c;
            let u = (c - dl) * (2.0 * a + dl - c) / den;
            let v = (dl + c) * (2.0 * a + dl + c) / den;
            h(rho) * arc_from(u, v) * rho
        };
        let shifted: Vec<f64> = breaks.iter().map(|b| b - a).collect();
        let outer = integrate_pieces(f, -c, c, &shifted, 0.5 * itol, LEVEL_CAP);
        Estimate::new(inner.value + outer.value, inner.error + outer.error)
    };
    Estimate::new(e.value / area, e.error / area)
}

/// `I_j` from `a = |c_j|` and the moduli of the other coefficients.
///
/// `others` may be in any order and may contain zeros.
pub fn ij_from_moduli(a: f64, others: &[f64], p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_p(p)?;
    let s = p - 2.0;
    if s == 0.0 {
        return Ok(Estimate::exact(1.0));
    }
    let mut b: Vec<f64> = others.iter().copied().filter(|&x| x > 0.0).collect();
    b.sort_by(|x, y| y.total_cmp(x));
    if a == 0.0 {
        return torus_mean_power(&b, s, spec);
    }
    let scale = (a * a + b.iter().map(|x| x * x).sum::<f64>()).powf(0.5 * s);
    let tol = spec.target_tol * scale;
    let est = match b.len() {
        0 => Estimate::exact(2.0 * a.powf(s) / p),
        1 => disc_mean(a, b[0], |rho| rho.powf(s), &[], tol),
        2 => disc_mean(a, b[0], |rho| ring_moduli(rho, b[1], s), &[b[1]], tol),
        m => {
            let (first, ring_b, rest) = (b[0], b[1], &b[2..]);
            let f = |theta: &[f64]| {
                let centre: Complex64 =
                    rest.iter().zip(theta).map(|(&bk, &t)| Complex64::from_polar(bk, t)).sum::<Complex64>() + first;
                disc_mean(a, centre.norm(), |rho| ring_moduli(rho, ring_b, s), &[ring_b], tol * 0.1).value
            };
            let n_max = spec.angular_points << spec.max_refine;
            trapezoid_progressive(m - 2, f, 8, tol, n_max)
        }
    };
    if !est.value.is_finite() {
        return Err(Error::Divergent(format!("I_j with a={a}, others={others:?}, p={p}")));
    }
    if est.error > tol {
        return Err(Error::Nonconvergence { value: est.value, error: est.error });
    }
    Ok(est)
}

/// `I_j` for the coefficient vector `c` (0-based `j`).
pub fn ij_integral(c: &CoefVec, p: f64, j: usize, spec: &QuadratureSpec) -> Result<Estimate> {
    check_p(p)?;
    check_nontrivial(c)?;
    if j >= c.dim() {
        return Err(Error::invalid(format!("index {j} out of range for dimension {}", c.dim())));
    }
    let m = c.moduli();
    let others: Vec<f64> = m.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect();
    ij_from_moduli(m[j], &others, p, spec)
}

/// All `I_j`.
pub fn ij_values(c: &CoefVec, p: f64, spec: &QuadratureSpec) -> Result<IjValues> {
    let mut values = Vec::with_capacity(c.dim());
    let mut errs = Vec::with_capacity(c.dim());
    for j in 0..c.dim() {
        let e = ij_integral(c, p, j, spec)?;
        values.push(e.value);
        errs.push(e.error);
    }
    Ok(IjValues { p, values, error_estimates: errs })
}

/// `P(|φ|^{p−2}φ)` together with the `I_j` it was built from.
///
/// Zero coefficients stay exact zeros and each nonzero coefficient is scaled
/// by a positive real, so phases are untouched.
pub fn project_linear_detailed(c: &CoefVec, p: f64, spec: &QuadratureSpec) -> Result<(CoefVec, IjValues)> {
    check_p(p)?;
    check_nontrivial(c)?;
    if p == 2.0 {
        let ij = IjValues { p, values: vec![1.0; c.dim()], error_estimates: vec![0.0; c.dim()] };
        return Ok((c.clone(), ij));
    }
    let ij = ij_values(c, p, spec)?;
    let out = c
        .coeffs()
        .iter()
        .zip(&ij.values)
        .map(|(cj, &i)| if cj.is_zero() { Coef::zero() } else { Coef::Float(cj.to_c64() * (0.5 * p * i)) })
        .collect();
    Ok((CoefVec::new(out)?, ij))
}

pub fn project_linear(c: &CoefVec, p: f64, spec: &QuadratureSpec) -> Result<CoefVec> {
    project_linear_detailed(c, p, spec).map(|(v, _)| v)
}

/// Exact projection at `p = 2n + 2`:
/// `c_j (n+1) Σ_{|α|=n} C(n,α)² |c|^{2α} / (α_j + 1)`.
///
/// Exact coefficients give exact output.
pub fn project_linear_even(c: &CoefVec, n: u32) -> Result<CoefVec> {
    project_linear_even_capped(c, n, EVEN_ENUMERATION_CAP)
}

pub fn project_linear_even_capped(c: &CoefVec, n: u32, cap: u64) -> Result<CoefVec> {
    let d = c.dim();
    if n as u64 * d as u64 > cap {
        return Err(Error::BudgetExceeded(format!("n·d = {} exceeds the enumeration cap {cap}", n as u64 * d as u64)));
    }
    if n == 0 {
        return Ok(c.clone());
    }
    let sq: Vec<Coef> = c.coeffs().iter().map(Coef::norm_sqr).collect();
    // Powers |c_k|^{2e} for e = 0..=n.
    let pows: Vec<Vec<Coef>> = sq
        .iter()
        .map(|x| {
            let mut v = vec![Coef::one()];
            for e in 0..n as usize {
                let next = &v[e] * x;
                v.push(next);
            }
            v
        })
        .collect();
    let mut acc = vec![Coef::zero(); d];
    for alpha in compositions(n, d) {
        let m = multinomial(&alpha);
        let w = Coef::from_rational(num_rational::BigRational::from_integer((&m * &m).into()));
        let mono = alpha.iter().enumerate().fold(w, |t, (k, &e)| &t * &pows[k][e as usize]);
        if mono.is_zero() {
            continue;
        }
        for (j, slot) in acc.iter_mut().enumerate() {
            let share = &mono * &Coef::from_ratio(1, alpha[j] as i64 + 1);
            *slot = &*slot + &share;
        }
    }
    let np1 = Coef::from_integer(n as i64 + 1);
    let out = c
        .coeffs()
        .iter()
        .zip(acc)
        .map(|(cj, s)| if cj.is_zero() { Coef::zero() } else { &(cj * &np1) * &s })
        .collect();
    CoefVec::new(out)
}

/// The normalized operator `φ ↦ P(|φ|^{p−2}φ) / ‖P(|φ|^{p−2}φ)‖₂`.
pub fn normalized_op(c: &CoefVec, p: f64, spec: &QuadratureSpec) -> Result<CoefVec> {
    project_linear(c, p, spec)?.normalized()
}

/// `⟨P(|φ|^{p−2}φ), φ⟩ / ‖φ‖₂² = Σ (p/2)|c_j|² I_j / Σ |c_j|²`, which equals
/// `‖φ‖ₚᵖ / ‖φ‖₂²`.
pub fn lambda_from_ij(c: &CoefVec, ij: &IjValues) -> Estimate {
    let m = c.moduli();
    let norm2: f64 = m.iter().map(|x| x * x).sum();
    let half_p = 0.5 * ij.p;
    let value = m.iter().zip(&ij.values).map(|(x, i)| half_p * x * x * i).sum::<f64>() / norm2;
    let error = m.iter().zip(&ij.error_estimates).map(|(x, e)| half_p * x * x * e).sum::<f64>() / norm2;
    Estimate::new(value, error)
}

/// Both sides of the comparison between `∫_𝕋∫_𝔻 |aw + bz + c|^{p−2}` and
/// `∫_𝕋∫_𝔻 |az + bw + c|^{p−2}` (area measure in `w`, arc measure in `z`).
pub fn swapped_disc_pair(a: f64, b: f64, c: Complex64, p: f64, spec: &QuadratureSpec) -> Result<(Estimate, Estimate)> {
    check_p(p)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::invalid("a and b must be positive"));
    }
    Ok((disc_circle_mean(a, b, c.norm(), p, spec)?, disc_circle_mean(b, a, c.norm(), p, spec)?))
}

/// `∫_𝕋∫_𝔻 |x w + y z + c|^{p−2} dA(w) dm(z)` with `c ≥ 0` real.
fn disc_circle_mean(x: f64, y: f64, c: f64, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let s = p - 2.0;
    let scale = (x * x + y * y + c * c).powf(0.5 * s);
    let tol = spec.target_tol * scale;
    let f = |th: f64| {
        let centre = (c * c + y * y + 2.0 * c * y * th.cos()).max(0.0).sqrt();
        disc_mean(x, centre, |rho| rho.powf(s), &[], tol * 0.1).value
    };
    let mut breaks = Vec::new();
    if c > 0.0 {
        let cos_star = (x * x - c * c - y * y) / (2.0 * c * y);
        if cos_star.abs() < 1.0 {
            breaks.push(cos_star.acos());
        }
    }
    let e = integrate_pieces(f, 0.0, PI, &breaks, tol * PI, LEVEL_CAP);
    let est = Estimate::new(e.value / PI, e.error / PI);
    if est.error > tol || !est.value.is_finite() {
        return Err(Error::Nonconvergence { value: est.value, error: est.error });
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec { target_tol: 1e-10, ..Default::default() }
    }

    #[test]
    fn single_coordinate_fixed() {
        for &p in &[1.0, 1.5, 3.0, 7.5] {
            let e1 = CoefVec::unit(3, 0).unwrap();
            let i = ij_integral(&e1, p, 0, &spec()).unwrap();
            assert_abs_diff_eq!(i.value, 2.0 / p, epsilon = 1e-14);
            let out = project_linear(&e1, p, &spec()).unwrap();
            assert_abs_diff_eq!(out.distance(&e1), 0.0, epsilon = 1e-14);
            assert!(out.get(1).is_zero() && out.get(1).is_exact());
        }
    }

    #[test]
    fn p4_two_coefficients() {
        let (a, b) = (0.8, 0.6);
        let c = CoefVec::from_f64(&[a, b]).unwrap();
        let i1 = ij_integral(&c, 4.0, 0, &spec()).unwrap().value;
        assert_abs_diff_eq!(i1, a * a / 2.0 + b * b, epsilon = 1e-12);
        let out = project_linear(&c, 4.0, &spec()).unwrap().to_c64();
        assert_abs_diff_eq!(out[0].re, a * (a * a + 2.0 * b * b), epsilon = 1e-12);
        assert_abs_diff_eq!(out[1].re, b * (2.0 * a * a + b * b), epsilon = 1e-12);
        let n = normalized_op(&c, 4.0, &spec()).unwrap().to_c64();
        let (x, y): (f64, f64) = (0.8 * (0.64 + 0.72), 0.6 * (1.28 + 0.36));
        let h = (x * x + y * y).sqrt();
        assert_abs_diff_eq!(n[0].re, x / h, epsilon = 1e-12);
        assert_abs_diff_eq!(n[1].re, y / h, epsilon = 1e-12);
    }

    #[test]
    fn equal_moduli_give_identical_integrals() {
        let c = CoefVec::from_c64(&[
            Complex64::from_polar(0.5, 0.3),
            Complex64::from_polar(0.5, -1.1),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(0.5, 2.0),
        ])
        .unwrap();
        let ij = ij_values(&c, 1.3, &spec()).unwrap();
        assert_eq!(ij.values[0], ij.values[1]);
        assert_eq!(ij.values[0], ij.values[3]);
    }

    #[test]
    fn even_formula_examples() {
        let c = CoefVec::new(vec![Coef::one(), Coef::one(), Coef::one()]).unwrap();
        let out = project_linear_even(&c, 1).unwrap();
        assert!(out.coeffs().iter().all(|x| *x == Coef::from_integer(5)));
        assert_eq!(project_linear_even(&c, 0).unwrap(), c);
        let big = CoefVec::new(vec![Coef::one(); 9]).unwrap();
        assert!(matches!(project_linear_even(&big, 8), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn lambda_matches_norm_ratio() {
        // λ = ‖φ‖₄⁴/‖φ‖₂² = 6/4 for (1,1)/√2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = CoefVec::from_f64(&[r, r]).unwrap();
        let (out, ij) = project_linear_detailed(&c, 4.0, &spec()).unwrap();
        assert_abs_diff_eq!(lambda_from_ij(&c, &ij).value, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.to_c64()[0].re, 1.5 * r, epsilon = 1e-12);
    }

    #[test]
    fn disc_mean_of_constant_is_one() {
        for &(a, c) in &[(1.0, 0.0), (0.5, 0.7), (2.0, 0.3), (1.0, 1.0)] {
            assert_abs_diff_eq!(disc_mean(a, c, |_| 1.0, &[], 1e-12).value, 1.0, epsilon = 1e-11);
            // mean of |u|² over the disc is c² + a²/2
            assert_abs_diff_eq!(disc_mean(a, c, |r| r * r, &[], 1e-12).value, c * c + a * a / 2.0, epsilon = 1e-11);
        }
    }
}
