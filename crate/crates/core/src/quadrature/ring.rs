use std::f64::consts::PI;

use num_complex::Complex64;

use super::tanh_sinh::tanh_sinh;
use crate::error::{Error, Result};

/// Above this value of `t = (min/max)²` the series is replaced by quadrature.
const SERIES_MAX_T: f64 = 0.999;
const SERIES_TOL: f64 = 1e-15;

/// `∫_𝕋 |a + bz|^s dm(z)` for moduli `a, b ≥ 0`.
///
/// Returns `+∞` in the divergent cases (`a = b = 0` with `s < 0`, or
/// `a = b` with `s ≤ −1`). Requires `s > −2`.
pub fn ring_moduli(a: f64, b: f64, s: f64) -> f64 {
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if s == 0.0 {
        return 1.0;
    }
    if big == 0.0 {
        return if s > 0.0 { 0.0 } else { f64::INFINITY };
    }
    if small == 0.0 {
        return big.powf(s);
    }
    let rho = small / big;
    let t = rho * rho;
    if t <= SERIES_MAX_T {
        return big.powf(s) * hyp_series(s, t);
    }
    if big == small && s <= -1.0 {
        return f64::INFINITY;
    }
    big.powf(s) * near_circle(s, rho, (big - small) / big)
}

/// `₂F₁(−s/2, −s/2; 1; t)`. All terms are nonnegative and the term ratio is
/// below `t` for `s > −2`, so the tail after a term `u` is at most `u·t/(1−t)`.
fn hyp_series(s: f64, t: f64) -> f64 {
    let h = -0.5 * s;
    let mut term = 1.0;
    let mut sum = 1.0;
    let tail = t / (1.0 - t);
    let mut k = 0.0;
    loop {
        let r = (k + h) / (k + 1.0);
        term *= r * r * t;
        sum += term;
        k += 1.0;
        if term * tail <= SERIES_TOL * sum {
            return sum;
        }
    }
}

/// `(1/π)∫₀^π ((1−ρ)² + 4ρ sin²(φ/2))^{s/2} dφ`, with `1−ρ` passed in
/// separately to keep its relative precision.
fn near_circle(s: f64, rho: f64, one_minus_rho: f64) -> f64 {
    let g2 = one_minus_rho * one_minus_rho;
    let f = |phi: f64| {
        let sn = (0.5 * phi).sin();
        (g2 + 4.0 * rho * sn * sn).powf(0.5 * s)
    };
    tanh_sinh(f, 0.0, PI, 1e-14, 12).value / PI
}

/// `∫_𝕋 |a + bz|^s dm(z)` for complex `a, b`; depends only on `|a|` and `|b|`.
pub fn ring_integral(a: Complex64, b: Complex64, s: f64) -> Result<f64> {
    if !(s > -2.0) {
        return Err(Error::invalid(format!("ring integral needs s > -2, got {s}")));
    }
    let v = ring_moduli(a.norm(), b.norm(), s);
    if v.is_infinite() {
        return Err(Error::Divergent(format!("∫|a+bz|^s dm with |a|={}, |b|={}, s={s}", a.norm(), b.norm())));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn direct(a: f64, b: f64, s: f64) -> f64 {
        // Brute-force circle average, parametrized so that the near-zero of
        // a + bz sits at the endpoint y = 0 (z = −e^{iy}).
        let f = |y: f64| (Complex64::new(a, 0.0) - Complex64::from_polar(b, y)).norm().powf(s);
        tanh_sinh(f, 0.0, PI, 1e-14, 12).value / PI
    }

    #[test]
    fn closed_cases() {
        let a = Complex64::new(0.3, -0.4);
        let b = Complex64::new(1.2, 0.0);
        assert_relative_eq!(ring_integral(a, b, 2.0).unwrap(), 0.25 + 1.44, max_relative = 1e-14);
        assert_eq!(ring_integral(a, b, 0.0).unwrap(), 1.0);
        assert!(matches!(ring_integral(Complex64::default(), Complex64::default(), -0.5), Err(Error::Divergent(_))));
        assert!(ring_integral(a, a, -1.0).is_err());
    }

    #[test]
    fn matches_direct_quadrature() {
        assert_relative_eq!(ring_moduli(1.0, 0.5, 1.0), direct(1.0, 0.5, 1.0), max_relative = 1e-10);
        for &(a, b, s) in &[(1.0, 0.9995, -0.5), (2.0, 1.999, 1.5), (1.0, 0.7, -1.0), (0.3, 1.0, 3.3), (1.0, 1.0, -0.7)] {
            assert_relative_eq!(ring_moduli(a, b, s), direct(a, b, s), max_relative = 1e-10);
        }
    }

    #[test]
    fn even_exponent_expansion() {
        // ∫|a+bz|^{2n} = Σ_j C(n,j)² a^{2(n−j)} b^{2j}
        let (a, b) = (0.7_f64, 1.3_f64);
        for n in 0..6u32 {
            let mut exact = 0.0;
            let mut c = 1.0;
            for j in 0..=n {
                exact += c * c * a.powi(2 * (n - j) as i32) * b.powi(2 * j as i32);
                c = c * (n - j) as f64 / (j + 1) as f64;
            }
            assert_relative_eq!(ring_moduli(a, b, 2.0 * n as f64), exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn continuity_across_series_cutoff() {
        let s = -0.8;
        let b_lo = SERIES_MAX_T.sqrt() * (1.0 - 1e-14);
        let b_hi = SERIES_MAX_T.sqrt() * (1.0 + 1e-14);
        assert_relative_eq!(ring_moduli(1.0, b_lo, s), ring_moduli(1.0, b_hi, s), max_relative = 1e-8);
    }
}
