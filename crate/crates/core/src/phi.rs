//! The obstruction coefficient `Φ(p)` for `z₁³ + z₂³ + z₁z₂z₃`.
//!
//! `Φ(p) = ∫_{𝕋³} |ψ|^{p−2}ψ · ζ₁ζ₂ζ̄₃³ dm₃` with `ψ = ζ₁+ζ₂+ζ₃`; the
//! polynomial is a Hilbert point in `H^p(𝕋³)` exactly when it vanishes.
//! Three independent evaluations are provided: an exact multinomial sum at
//! even `p`, a Bergman-space integral for `p > 4`, and direct quadrature.

use std::cell::Cell;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::multinomial::{compositions, multinomial};
use crate::polyalg::rat_to_f64;
use crate::quadrature::{integrate_pieces, tanh_sinh, Estimate, QuadratureSpec};

/// Exponent of the obstruction coefficient among the Fourier modes of `|ψ|^{p−2}ψ`.
pub const PHI_ALPHA: [i32; 3] = [-1, -1, 3];

/// Deepest tanh-sinh level used by the nested rules here.
/// Below this radius `h(r) − h(0)` is dropped; the neglected part is
/// `O(r^{p−3})`.
const SUBTRACTION_FLOOR: f64 = 1e-9;

const LEVEL_CAP: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiMethod {
    MultinomialExact,
    Bergman,
    TorusQuadrature,
}

impl PhiMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PhiMethod::MultinomialExact => "multinomial-exact",
            PhiMethod::Bergman => "bergman",
            PhiMethod::TorusQuadrature => "torus-quadrature",
        }
    }
}

impl fmt::Display for PhiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for PhiMethod {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiSample {
    pub p: f64,
    pub value: f64,
    pub method: PhiMethod,
    pub error_estimate: f64,
    /// Size of the imaginary part left by quadrature; zero for the other methods.
    pub imaginary_residual: f64,
}

/// `Φ(2(n+1)) = (n+1) Σ_{|β|=n} C(n,β)² β₁β₂ / ((β₃+1)(β₃+2)(β₃+3))`, exactly.
pub fn phi_even(n: u32) -> BigRational {
    let mut total = BigRational::from_integer(BigInt::from(0));
    for beta in compositions(n, 3) {
        if beta[0] == 0 || beta[1] == 0 {
            continue;
        }
        let m = BigInt::from(multinomial(&beta));
        let b3 = BigInt::from(beta[2]);
        let num = &m * &m * BigInt::from(beta[0]) * BigInt::from(beta[1]);
        let den = (&b3 + 1) * (&b3 + 2) * (&b3 + 3);
        total += BigRational::new(num, den);
    }
    total * BigRational::from_integer(BigInt::from(n + 1))
}

/// [`phi_even`] as a sample at `p = 2n + 2`.
pub fn phi_even_sample(n: u32) -> PhiSample {
    PhiSample {
        p: 2.0 * n as f64 + 2.0,
        value: rat_to_f64(&phi_even(n)),
        method: PhiMethod::MultinomialExact,
        error_estimate: 0.0,
        imaginary_residual: 0.0,
    }
}

/// Density of `w₁ + w₂` at modulus `ρ ∈ [0, 2]` for independent uniform
/// points of the unit disc, relative to Lebesgue area.
fn sum_density(rho: f64) -> f64 {
    if rho >= 2.0 {
        return 0.0;
    }
    let h = 0.5 * rho;
    (2.0 * h.acos() - h * (4.0 - rho * rho).sqrt()) / (PI * PI)
}

/// Weighted density of `v = w₁ + w₂ + w₃` at modulus `r`, where `w₃` carries
/// the weight `3(1−|w₃|²)²` and the angle of `w₃ − v` is averaged out.
fn weighted_density(r: f64, tol: f64, inner_err: &Cell<f64>) -> f64 {
    let mut breaks = vec![r, 2.0 - r, r - 2.0];
    breaks.retain(|&x| x > 0.0 && x < 1.0);
    let e = integrate_pieces(
        |tau: f64| {
            let c = 1.0 - tau * tau;
            let w = 6.0 * c * c * tau;
            if r == 0.0 || tau == 0.0 {
                return w * sum_density((r - tau).abs());
            }
            // `|r − τe^{iθ}| = 2` cuts the angular integrand
            let cut = (r * r + tau * tau - 4.0) / (2.0 * r * tau);
            let angle_breaks: Vec<f64> = if cut.abs() < 1.0 { vec![cut.acos()] } else { Vec::new() };
            let a = integrate_pieces(
                |t: f64| sum_density((r * r + tau * tau - 2.0 * r * tau * t.cos()).max(0.0).sqrt()),
                0.0,
                PI,
                &angle_breaks,
                0.1 * tol,
                LEVEL_CAP,
            );
            inner_err.set(inner_err.get().max(a.error / PI));
            w * a.value / PI
        },
        0.0,
        1.0,
        &breaks,
        tol,
        LEVEL_CAP,
    );
    inner_err.set(inner_err.get().max(e.error));
    e.value
}

/// `Φ(p)` for `p > 4` through the Bergman-space representation
/// `C(p/2,3)(p−2)(p−4)/4 · ∫_{𝔻³} |w₁+w₂+w₃|^{p−6} 3(1−|w₃|²)² dA₃`.
///
/// The integral is taken as `∫₀³ r^{p−5} 2π h(r) dr` with `h` the weighted
/// radial density of the sum, so the only singularity is at the origin. On
/// `[0, 1]` the constant `h(0)` is integrated in closed form, which cancels the
/// factor `p − 4` analytically and keeps the quadrature well conditioned as
/// `p → 4`.
pub fn phi_bergman(p: f64, spec: &QuadratureSpec) -> Result<PhiSample> {
    spec.validate()?;
    if !(p > 4.0 && p.is_finite()) {
        return Err(Error::invalid(format!("the Bergman form of Φ needs p > 4, got {p}")));
    }
    let s = p - 6.0;
    let half = 0.5 * p;
    let reduced = half * (half - 1.0) * (half - 2.0) / 6.0 * (p - 2.0) / 4.0;
    let prefactor = reduced * (p - 4.0);
    let tol = spec.target_tol / (prefactor.abs() * 3f64.powf(s.max(0.0))).max(1.0);
    let h0_err = Cell::new(0.0f64);
    let h0 = weighted_density(0.0, 0.1 * tol, &h0_err);
    let inner_err = Cell::new(0.0f64);
    let outer = integrate_pieces(
        |r: f64| {
            if r < SUBTRACTION_FLOOR {
                return 0.0;
            }
            let h = weighted_density(r, 0.1 * tol, &inner_err);
            TAU * r.powf(s + 1.0) * if r < 1.0 { h - h0 } else { h }
        },
        0.0,
        3.0,
        &[1.0, 2.0],
        tol,
        LEVEL_CAP,
    );
    let error = (outer.error + 3f64.powf(s + 2.0) * TAU * inner_err.get()) * prefactor + reduced * TAU * h0_err.get();
    let value = prefactor * outer.value + reduced * TAU * h0;
    if !value.is_finite() || error > 10.0 * spec.target_tol.max(1e-12 * value.abs()) {
        return Err(Error::Nonconvergence { value, error });
    }
    Ok(PhiSample { p, value, method: PhiMethod::Bergman, error_estimate: error, imaginary_residual: 0.0 })
}

/// `∫_{𝕋³} |ψ|^{p−2}ψ · conj(ζ^α) dm₃` for `|α| = 1`.
///
/// Rotating every variable by `ζ₃` reduces this to
/// `∫_{𝕋²} |χ|^{p−2}χ η₁^{−α₁}η₂^{−α₂} dm₂` with `χ = 1 + η₁ + η₂`, which
/// vanishes at `(η₁, η₂) = (e^{±2πi/3}, e^{∓2πi/3})`. The outer angle is cut
/// where the inner integrand becomes singular, and the inner circle starts at
/// the minimum of `|χ|` so that the near-singularity sits at the endpoints.
pub fn torus_coefficient(p: f64, alpha: [i32; 3], spec: &QuadratureSpec) -> Result<Estimate<Complex64>> {
    spec.validate()?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be a finite number ≥ 1, got {p}")));
    }
    if alpha.iter().sum::<i32>() != 1 {
        return Err(Error::invalid("the exponent must have entries summing to 1"));
    }
    let (a1, a2) = (alpha[0] as f64, alpha[1] as f64);
    let tol = spec.target_tol * 4.0 * PI * PI;
    let inner_err = Cell::new(0.0f64);
    let breaks = [-2.0 * PI / 3.0, 0.0, 2.0 * PI / 3.0];
    let outer = integrate_pieces(
        |t2: f64| {
            let c = Complex64::new(1.0 + t2.cos(), t2.sin());
            let start = if c.norm() == 0.0 { 0.0 } else { (-c).arg() };
            let twist = Complex64::from_polar(1.0, -a2 * t2);
            let inner = tanh_sinh(
                |t1: f64| {
                    let chi = c + Complex64::from_polar(1.0, t1);
                    let r = chi.norm();
                    if r == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    chi * r.powf(p - 2.0) * Complex64::from_polar(1.0, -a1 * t1)
                },
                start,
                start + TAU,
                0.1 * tol / TAU,
                LEVEL_CAP,
            );
            inner_err.set(inner_err.get().max(inner.error));
            inner.value * twist
        },
        -PI,
        PI,
        &breaks,
        tol,
        LEVEL_CAP,
    );
    let norm = 1.0 / (4.0 * PI * PI);
    let value = outer.value * norm;
    let error = (outer.error + TAU * inner_err.get()) * norm;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Nonconvergence { value: value.re, error });
    }
    Ok(Estimate::new(value, error))
}

/// `Φ(p)` by direct quadrature on the 2-torus. The real part is returned and
/// the imaginary part, which vanishes by symmetry, is kept as a sanity check.
pub fn phi_quadrature(p: f64, spec: &QuadratureSpec) -> Result<PhiSample> {
    let est = torus_coefficient(p, PHI_ALPHA, spec)?;
    if est.error > spec.target_tol.max(1e-12 * est.value.re.abs()) {
        return Err(Error::Nonconvergence { value: est.value.re, error: est.error });
    }
    Ok(PhiSample {
        p,
        value: est.value.re,
        method: PhiMethod::TorusQuadrature,
        error_estimate: est.error + f64::EPSILON * 8.0,
        imaginary_residual: est.value.im.abs(),
    })
}

/// The grid `p_min, p_min + step, …, p_max`, with extra points approaching
/// the zeros at 2 and 4 from both sides.
pub fn phi_grid(p_min: f64, p_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(p_min >= 1.0 && p_max > p_min && p_max.is_finite()) {
        return Err(Error::invalid(format!("need 1 ≤ p_min < p_max, got [{p_min}, {p_max}]")));
    }
    if !(step > 0.0) {
        return Err(Error::invalid("step must be positive"));
    }
    let count = ((p_max - p_min) / step + 1e-9).floor() as usize;
    if count > 100_000 {
        return Err(Error::BudgetExceeded(format!("{count} grid points")));
    }
    let mut grid: Vec<f64> = (0..=count).map(|k| p_min + k as f64 * step).collect();
    if grid.last().is_some_and(|&x| (p_max - x) > 1e-9 * step) {
        grid.push(p_max);
    }
    for zero in [2.0, 4.0] {
        for k in 1..=3 {
            let off = step / f64::from(1u32 << (k + 1));
            for q in [zero - off, zero + off] {
                if q >= p_min && q <= p_max {
                    grid.push(q);
                }
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    Ok(grid)
}

/// Samples [`phi_quadrature`] on [`phi_grid`]. Failed samples are reported
/// per point rather than aborting the curve.
pub fn phi_curve(p_min: f64, p_max: f64, step: f64, spec: &QuadratureSpec) -> Result<Vec<(f64, Result<PhiSample>)>> {
    spec.validate()?;
    let grid = phi_grid(p_min, p_max, step)?;
    Ok(grid.into_par_iter().map(|p| (p, phi_quadrature(p, spec))).collect())
}
