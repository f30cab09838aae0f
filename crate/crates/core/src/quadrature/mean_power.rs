use std::f64::consts::PI;

use num_complex::Complex64;

use super::ring::ring_moduli;
use super::spec::{Estimate, QuadratureSpec};
use super::tanh_sinh::{integrate_pieces, level_cap};
use super::torus::trapezoid_progressive;
use crate::error::{Error, Result};

/// `∫_{𝕋^m} |Σ_k b_k z_k|^s dm_m` for nonnegative moduli `b_k`.
///
/// The largest modulus is fixed by rotation invariance, the next one is
/// removed with [`ring_moduli`], the third is integrated by tanh-sinh with a
/// break where the ring degenerates, and any further ones by a progressive
/// trapezoid rule. `spec.target_tol` is relative to `(Σ b_k²)^{s/2}`.
pub fn torus_mean_power(moduli: &[f64], s: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if moduli.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(Error::invalid("moduli must be finite and nonnegative"));
    }
    if !(s > -2.0) {
        return Err(Error::invalid(format!("exponent must exceed -2, got {s}")));
    }
    let mut b: Vec<f64> = moduli.iter().copied().filter(|&x| x > 0.0).collect();
    b.sort_by(|x, y| y.total_cmp(x));
    let scale = b.iter().map(|x| x * x).sum::<f64>().powf(0.5 * s);
    let tol = spec.target_tol * scale.max(f64::MIN_POSITIVE);
    let est = match b.len() {
        0 if s > 0.0 => Estimate::exact(0.0),
        0 if s == 0.0 => Estimate::exact(1.0),
        0 => return Err(Error::Divergent("zero function to a negative power".into())),
        1 => Estimate::exact(b[0].powf(s)),
        2 => Estimate::exact(ring_moduli(b[0], b[1], s)),
        3 => three_term(b[0], b[2], b[1], s, tol, level_cap(spec)),
        m => {
            let rest = &b[3..];
            let f = |theta: &[f64]| {
                let c: Complex64 = rest
                    .iter()
                    .zip(theta)
                    .map(|(&bk, &t)| Complex64::from_polar(bk, t))
                    .sum::<Complex64>()
                    + b[0];
                three_term(c.norm(), b[2], b[1], s, tol * 0.1, level_cap(spec)).value
            };
            let n_max = spec.angular_points << spec.max_refine;
            trapezoid_progressive(m - 3, f, 8, tol, n_max)
        }
    };
    if !est.value.is_finite() {
        return Err(Error::Divergent(format!("mean power with s={s} and moduli {moduli:?}")));
    }
    if est.error > tol {
        return Err(Error::Nonconvergence { value: est.value, error: est.error });
    }
    Ok(est)
}

/// `(1/π)∫₀^π ring(|c + b_o e^{iθ}|, b_r, s) dθ`.
pub(crate) fn three_term(c: f64, b_o: f64, b_r: f64, s: f64, tol: f64, max_level: u32) -> Estimate {
    let f = |th: f64| {
        let m = (c * c + b_o * b_o + 2.0 * c * b_o * th.cos()).max(0.0).sqrt();
        ring_moduli(m, b_r, s)
    };
    let mut breaks = Vec::new();
    if c > 0.0 && b_o > 0.0 {
        let cos_star = (b_r * b_r - c * c - b_o * b_o) / (2.0 * c * b_o);
        if cos_star.abs() < 1.0 {
            breaks.push(cos_star.acos());
        }
    }
    let e = integrate_pieces(f, 0.0, PI, &breaks, tol * PI, max_level);
    Estimate::new(e.value / PI, e.error / PI)
}
