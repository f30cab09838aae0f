//! Hilbert-point tests.
//!
//! A nontrivial `φ ∈ H^p` is a Hilbert point exactly when
//! `P(|φ|^{p−2}φ) = λφ` for some `λ > 0`; pairing with `φ` forces
//! `λ = ‖φ‖ₚᵖ / ‖φ‖₂²`. Every check here measures
//! `‖P(|φ|^{p−2}φ) − λφ‖₂ / ‖λφ‖₂`, exactly at even `p` and by quadrature
//! otherwise, except at `p = ∞` where 1-homogeneous `φ` have a closed form.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::multinomial::{compositions, multinomial};
use crate::polyalg::{h2_norm_sqr, hp_norm_even_pow, nonlinear_image_even, Coef, CoefVec, ExponentIndex, LaurentPoly};
use crate::projection::project_linear_detailed;
use crate::quadrature::{torus_mean_power, Estimate, QuadratureSpec};

/// Largest tensor grid used for the homogeneous-polynomial quadrature check.
const HOMOGENEOUS_GRID_CAP: usize = 1 << 22;
/// Bound on the number of term products in an exact even-`p` check.
const EXACT_WORK_CAP: f64 = 5e7;
/// Relative roundoff floor added to every quadrature error estimate.
const ROUNDOFF_FLOOR: f64 = 1e-13;

/// An exponent in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PValue {
    Finite(f64),
    Infinity,
}

impl PValue {
    pub fn parse(text: &str) -> Result<PValue> {
        let t = text.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "inf" | "infinity" | "∞") {
            return Ok(PValue::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| Error::invalid(format!("cannot read exponent {text:?}")))?;
        if !(p >= 1.0) {
            return Err(Error::invalid(format!("p must be at least 1, got {p}")));
        }
        Ok(if p.is_infinite() { PValue::Infinity } else { PValue::Finite(p) })
    }

    /// `n` with `p = 2n + 2`, when `p` is an even integer.
    pub fn even_index(self) -> Option<u32> {
        match self {
            PValue::Finite(p) if p >= 2.0 && p == p.floor() && (p as u64) % 2 == 0 && p < 1e6 => {
                Some((p as u32 - 2) / 2)
            }
            _ => None,
        }
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValue::Finite(p) => write!(f, "{p}"),
            PValue::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for PValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PValue::Finite(p) => s.serialize_f64(*p),
            PValue::Infinity => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    HilbertPoint,
    NotHilbertPoint,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::HilbertPoint => "hilbert-point",
            Verdict::NotHilbertPoint => "not-hilbert-point",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    EvenExact,
    Quadrature,
    InfinityClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::EvenExact => "even-exact",
            Method::Quadrature => "quadrature",
            Method::InfinityClosedForm => "infinity-closed-form",
        }
    }
}

macro_rules! serialize_as_str {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    )*};
}
serialize_as_str!(Verdict, Method);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HilbertReport {
    pub p: PValue,
    /// `‖φ‖ₚᵖ/‖φ‖₂²`; absent at `p = ∞`.
    pub lambda_expected: Option<f64>,
    /// `‖P(|φ|^{p−2}φ) − λφ‖₂ / ‖λφ‖₂` (at `p = ∞`, the closed-form defect).
    pub residual: f64,
    pub error_estimate: f64,
    pub verdict: Verdict,
    pub method: Method,
    pub note: Option<String>,
}

impl HilbertReport {
    fn inconclusive(p: PValue, method: Method, note: impl Into<String>) -> Self {
        HilbertReport {
            p,
            lambda_expected: None,
            residual: f64::NAN,
            error_estimate: f64::NAN,
            verdict: Verdict::Inconclusive,
            method,
            note: Some(note.into()),
        }
    }
}

/// Verdict from a residual and its error bound: below the bound is a Hilbert
/// point, beyond ten times the bound is not, and anything between is left open.
pub fn quadrature_verdict(residual: f64, error: f64) -> Verdict {
    if !residual.is_finite() || !error.is_finite() {
        Verdict::Inconclusive
    } else if residual <= error {
        Verdict::HilbertPoint
    } else if residual >= 10.0 * error {
        Verdict::NotHilbertPoint
    } else {
        Verdict::Inconclusive
    }
}

fn check_finite_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be a finite number ≥ 1, got {p}")));
    }
    Ok(())
}

/// `Σ_{|α|=n} C(n,α)² |c|^{2α} = ‖Σ c_j z_j‖_{2n}^{2n}`, exact for exact `c`.
pub fn linear_even_moment(c: &CoefVec, n: u32) -> Coef {
    let sq: Vec<Coef> = c.coeffs().iter().map(Coef::norm_sqr).collect();
    let mut total = Coef::zero();
    for alpha in compositions(n, c.dim()) {
        let m = multinomial(&alpha);
        let mut t = Coef::from_rational(BigRational::from_integer((&m * &m).into()));
        for (k, &e) in alpha.iter().enumerate() {
            for _ in 0..e {
                t = &t * &sq[k];
            }
        }
        total = &total + &t;
    }
    total
}

/// `λ = ‖φ‖ₚᵖ / ‖φ‖₂²` for `φ = Σ c_j z_j`.
///
/// Exact at even `p` (returned with zero error), by quadrature otherwise.
pub fn lambda_expected_linear(c: &CoefVec, p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_finite_p(p)?;
    if c.is_trivial() {
        return Err(Error::invalid("λ is undefined for the zero polynomial"));
    }
    let norm2: f64 = c.moduli().iter().map(|m| m * m).sum();
    if let Some(n) = PValue::Finite(p).even_index() {
        let num = linear_even_moment(c, n + 1);
        let den = c.coeffs().iter().fold(Coef::zero(), |acc, x| &acc + &x.norm_sqr());
        return Ok(Estimate::exact((&num / &den).to_c64().re));
    }
    let m = torus_mean_power(&c.moduli(), p, spec)?;
    Ok(Estimate::new(m.value / norm2, m.error / norm2))
}

/// Exact `λ = ‖f‖_{2n+2}^{2n+2} / ‖f‖₂²` for an analytic polynomial.
pub fn lambda_expected_poly(f: &LaurentPoly, n: u32) -> Result<Coef> {
    if f.is_zero() {
        return Err(Error::invalid("λ is undefined for the zero polynomial"));
    }
    let num = hp_norm_even_pow(f, n + 1)?;
    Ok(&num / &h2_norm_sqr(f))
}

/// Duality residual for `φ = Σ c_j z_j` by quadrature of the `I_j`.
pub fn residual_linear(c: &CoefVec, p: f64, spec: &QuadratureSpec) -> Result<HilbertReport> {
    check_finite_p(p)?;
    let lambda = lambda_expected_linear(c, p, spec)?;
    let (psi, ij) = project_linear_detailed(c, p, spec)?;
    let moduli = c.moduli();
    let norm = c.h2_norm();
    let lc: Vec<Complex64> = c.to_c64().iter().map(|z| z * lambda.value).collect();
    let diff: f64 = psi.to_c64().iter().zip(&lc).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let denom = lambda.value * norm;
    let residual = if p == 2.0 { 0.0 } else { diff / denom };
    let psi_err: f64 =
        moduli.iter().zip(&ij.error_estimates).map(|(m, e)| (0.5 * p * m * e).powi(2)).sum::<f64>().sqrt();
    let error = (psi_err + lambda.error * norm) / denom + ROUNDOFF_FLOOR;
    Ok(HilbertReport {
        p: PValue::Finite(p),
        lambda_expected: Some(lambda.value),
        residual,
        error_estimate: error,
        verdict: quadrature_verdict(residual, error),
        method: Method::Quadrature,
        note: None,
    })
}

/// Exact duality residual for `φ = Σ c_j z_j` at `p = 2n + 2`.
pub fn residual_linear_even(c: &CoefVec, n: u32) -> Result<HilbertReport> {
    if !c.is_exact() {
        return Err(Error::NotExact);
    }
    residual_even_poly(&c.to_poly(), n)
}

/// Exact test at `p = 2n + 2`: is `P(f^{n+1} f̄ⁿ)` equal to `λf`?
pub fn residual_even_poly(f: &LaurentPoly, n: u32) -> Result<HilbertReport> {
    if !f.is_exact() {
        return Err(Error::NotExact);
    }
    if !f.is_analytic() {
        return Err(Error::NotAnalytic);
    }
    if f.is_zero() {
        return Err(Error::invalid("the zero polynomial is not a candidate"));
    }
    let work = (f.len() as f64).powi(2 * n as i32 + 1);
    if work > EXACT_WORK_CAP {
        return Err(Error::BudgetExceeded(format!(
            "{} terms to the power {} is beyond the exact-expansion budget",
            f.len(),
            2 * n + 1
        )));
    }
    let p = 2.0 * n as f64 + 2.0;
    let lambda = lambda_expected_poly(f, n)?;
    let psi = nonlinear_image_even(f, n)?;
    let lf = f.scale(&lambda);
    let diff = psi.sub(&lf)?;
    let exact_zero = diff.is_zero();
    let residual =
        if exact_zero { 0.0 } else { (h2_norm_sqr(&diff).to_c64().re / h2_norm_sqr(&lf).to_c64().re).sqrt() };
    Ok(HilbertReport {
        p: PValue::Finite(p),
        lambda_expected: Some(lambda.to_c64().re),
        residual,
        error_estimate: 0.0,
        verdict: if exact_zero { Verdict::HilbertPoint } else { Verdict::NotHilbertPoint },
        method: Method::EvenExact,
        note: None,
    })
}

/// Quadrature residual for an `m`-homogeneous analytic polynomial.
///
/// `|f|^{p−2}f` is again `m`-homogeneous, so its analytic part lives on the
/// finitely many monomials of degree `m`; those coefficients and `‖f‖ₚᵖ` are
/// computed with a tensor trapezoid rule, and the half grid gives the error.
pub fn residual_homogeneous(f: &LaurentPoly, p: f64, spec: &QuadratureSpec) -> Result<HilbertReport> {
    check_finite_p(p)?;
    spec.validate()?;
    if !f.is_analytic() {
        return Err(Error::NotAnalytic);
    }
    let m = f
        .homogeneous_degree()
        .ok_or_else(|| Error::invalid("the quadrature check needs a homogeneous polynomial"))?;
    let d = f.dim();
    let mut n = spec.angular_points.max(2 * m as usize + 2);
    while n > 4 && n.checked_pow(d as u32).map_or(true, |g| g > HOMOGENEOUS_GRID_CAP) {
        n /= 2;
    }
    n -= n % 2;
    if n.checked_pow(d as u32).map_or(true, |g| g > HOMOGENEOUS_GRID_CAP) || n <= m as usize {
        return Err(Error::BudgetExceeded(format!("a degree-{m} polynomial in {d} variables is beyond the grid budget")));
    }
    let support: Vec<Vec<i32>> =
        compositions(m as u32, d).map(|a| a.into_iter().map(|x| x as i32).collect()).collect();
    let terms: Vec<(Vec<i32>, Complex64)> = f.terms().map(|(a, c)| (a.entries().to_vec(), c.to_c64())).collect();

    // Accumulate on the full grid and on the even sub-grid at once.
    let k = support.len();
    let mut fine = vec![Complex64::new(0.0, 0.0); k];
    let mut coarse = vec![Complex64::new(0.0, 0.0); k];
    let (mut norm_fine, mut norm_coarse) = (0.0, 0.0);
    let mut idx = vec![0usize; d];
    let h = TAU / n as f64;
    let mut z = vec![Complex64::new(1.0, 0.0); d];
    'grid: loop {
        for (zj, &i) in z.iter_mut().zip(&idx) {
            *zj = Complex64::from_polar(1.0, h * i as f64);
        }
        let fz: Complex64 = terms
            .iter()
            .map(|(a, c)| c * a.iter().zip(&z).map(|(&e, zj)| zj.powi(e)).product::<Complex64>())
            .sum();
        let r = fz.norm();
        let g = if r == 0.0 { Complex64::new(0.0, 0.0) } else { fz * r.powf(p - 2.0) };
        let rp = r.powf(p);
        let on_coarse = idx.iter().all(|i| i % 2 == 0);
        norm_fine += rp;
        if on_coarse {
            norm_coarse += rp;
        }
        for (s, alpha) in support.iter().enumerate() {
            let conj_mono: Complex64 = alpha.iter().zip(&z).map(|(&e, zj)| zj.conj().powi(e)).product();
            let v = g * conj_mono;
            fine[s] += v;
            if on_coarse {
                coarse[s] += v;
            }
        }
        let mut dpos = 0;
        loop {
            if dpos == d {
                break 'grid;
            }
            idx[dpos] += 1;
            if idx[dpos] < n {
                break;
            }
            idx[dpos] = 0;
            dpos += 1;
        }
    }
    let wf = 1.0 / (n as f64).powi(d as i32);
    let wc = 1.0 / ((n / 2) as f64).powi(d as i32);
    let norm2 = h2_norm_sqr(f).to_c64().re;
    let lambda = norm_fine * wf / norm2;
    let lambda_c = norm_coarse * wc / norm2;
    let fcoef = |alpha: &Vec<i32>| f.coeff(&ExponentIndex::new(alpha.clone())).to_c64();
    let resid = |coef: &[Complex64], w: f64, lam: f64| -> f64 {
        support.iter().zip(coef).map(|(a, g)| (g * w - fcoef(a) * lam).norm_sqr()).sum::<f64>().sqrt()
    };
    let denom = lambda * norm2.sqrt();
    let residual = resid(&fine, wf, lambda) / denom;
    let residual_c = resid(&coarse, wc, lambda_c) / (lambda_c * norm2.sqrt());
    let error = (residual - residual_c).abs() + (lambda - lambda_c).abs() / lambda + ROUNDOFF_FLOOR;
    Ok(HilbertReport {
        p: PValue::Finite(p),
        lambda_expected: Some(lambda),
        residual,
        error_estimate: error,
        verdict: quadrature_verdict(residual, error),
        method: Method::Quadrature,
        note: None,
    })
}

/// Closed-form test at `p = ∞` for `φ = Σ c_j z_j`:
/// `(max_j |c_j|)·Σ_j |c_j| = Σ_j |c_j|²`.
///
/// Exact when every `|c_j|` is rational, otherwise decided to `1e−12`.
pub fn hilbert_infinity_linear(c: &CoefVec) -> Result<HilbertReport> {
    if c.is_trivial() {
        return Err(Error::invalid("the zero polynomial is not a candidate"));
    }
    let exact: Option<Vec<BigRational>> = c.coeffs().iter().map(Coef::exact_modulus).collect();
    let (residual, holds, note) = match exact {
        Some(m) => {
            let max = m.iter().max().cloned().unwrap_or_else(BigRational::zero);
            let sum: BigRational = m.iter().sum();
            let sq: BigRational = m.iter().map(|x| x * x).sum();
            let defect = (&max * &sum - &sq) / &sq;
            let r = crate::polyalg::rat_to_f64(&defect).abs();
            (r, defect.is_zero(), None)
        }
        None => {
            let m = c.moduli();
            let max = m.iter().copied().fold(0.0, f64::max);
            let sum: f64 = m.iter().sum();
            let sq: f64 = m.iter().map(|x| x * x).sum();
            let r = ((max * sum - sq) / sq).abs();
            (r, r <= 1e-12, Some("moduli are not all rational; decided to 1e-12".to_string()))
        }
    };
    Ok(HilbertReport {
        p: PValue::Infinity,
        lambda_expected: None,
        residual,
        error_estimate: 0.0,
        verdict: if holds { Verdict::HilbertPoint } else { Verdict::NotHilbertPoint },
        method: Method::InfinityClosedForm,
        note,
    })
}

/// Chooses the strongest available test for `f` at `p`.
///
/// Even `p` with exact coefficients is decided exactly; `p = ∞` only for
/// 1-homogeneous input; other exponents by quadrature for homogeneous input.
/// Anything else yields an inconclusive report with an explanation.
pub fn check(f: &LaurentPoly, p: PValue, prefer_exact: bool, spec: &QuadratureSpec) -> Result<HilbertReport> {
    if f.is_zero() {
        return Err(Error::invalid("the zero polynomial is not a candidate"));
    }
    if !f.is_analytic() {
        return Err(Error::NotAnalytic);
    }
    let linear = CoefVec::from_poly(f);
    match p {
        PValue::Infinity => match linear {
            Some(c) => hilbert_infinity_linear(&c),
            // c·z^α is c times an inner function; the one-coefficient closed form applies
            None if f.len() == 1 => {
                let c = CoefVec::new(vec![f.terms().next().unwrap().1.clone()])?;
                hilbert_infinity_linear(&c).map(|mut r| {
                    r.note = Some("single monomial".into());
                    r
                })
            }
            None => Ok(HilbertReport::inconclusive(
                p,
                Method::InfinityClosedForm,
                "p = inf is only decided for 1-homogeneous polynomials",
            )),
        },
        PValue::Finite(x) => {
            if let Some(n) = p.even_index() {
                if f.is_exact() && (prefer_exact || linear.is_none()) {
                    return residual_even_poly(f, n);
                }
            }
            if prefer_exact && p.even_index().is_none() {
                return Ok(HilbertReport::inconclusive(p, Method::EvenExact, "exact checks need an even integer p"));
            }
            match linear {
                Some(c) => residual_linear(&c, x, spec),
                None if f.homogeneous_degree().is_some() => residual_homogeneous(f, x, spec),
                None => Ok(HilbertReport::inconclusive(
                    p,
                    Method::Quadrature,
                    "non-homogeneous polynomials are only decided at even p with exact coefficients",
                )),
            }
        }
    }
}
