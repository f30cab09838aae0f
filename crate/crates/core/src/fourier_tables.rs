//! Fourier coefficients `c_p(α)` of `|ζ₁+⋯+ζ_d|^{p−2}(ζ₁+⋯+ζ_d)` for
//! `d = 2, 3`, indexed by exponents with `|α| = 1`.
//!
//! In two variables there is a closed form in terms of the Gamma function.
//! In three variables the even-`p` coefficients are integers (a slice of the
//! hexagonal Pascal pyramid) produced exactly, and any `p` is reachable by
//! torus quadrature.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigUint;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multinomial::binomial;
use crate::phi::torus_coefficient;
use crate::polyalg::{Coef, ExponentIndex, LaurentPoly};
use crate::quadrature::{tanh_sinh, Estimate, QuadratureSpec};
use crate::special::{gamma, ln_gamma_signed, rgamma};

/// Largest `n` accepted by [`c3_even`].
pub const C3_EVEN_CAP: u32 = 64;

/// `c_p(α₁, 1−α₁) = Γ(p) / (Γ(p/2+α₁) Γ(p/2+1−α₁))`, zero whenever one of
/// the Gamma arguments is a nonpositive integer.
pub fn c2_closed(p: f64, alpha1: i64) -> f64 {
    let x1 = 0.5 * p + alpha1 as f64;
    let x2 = 0.5 * p + 1.0 - alpha1 as f64;
    if rgamma(x1) == 0.0 || rgamma(x2) == 0.0 {
        return 0.0;
    }
    if p < 170.0 && x1.abs() < 170.0 && x2.abs() < 170.0 {
        return gamma(p) * rgamma(x1) * rgamma(x2);
    }
    let (l0, s0) = ln_gamma_signed(p);
    let (l1, s1) = ln_gamma_signed(x1);
    let (l2, s2) = ln_gamma_signed(x2);
    s0 * s1 * s2 * (l0 - l1 - l2).exp()
}

/// The even-`p` value `c_{2n}(α₁, 1−α₁) = C(2n−1, n−1+α₁)`, zero outside the row.
pub fn c2_even(n: u32, alpha1: i64) -> BigUint {
    if n == 0 {
        return BigUint::from(0u32);
    }
    let k = n as i64 - 1 + alpha1;
    if k < 0 || k > 2 * n as i64 - 1 {
        return BigUint::from(0u32);
    }
    binomial(2 * n as u64 - 1, k as u64)
}

/// Largest defect of `c_{p+2}(α) = 2c_p(α) + c_p(α₁−1, α₂+1) + c_p(α₁+1, α₂−1)`
/// over `α₁` in `range`, using [`c2_closed`] on both sides.
pub fn c2_recursion_check(p: f64, range: std::ops::RangeInclusive<i64>) -> f64 {
    range
        .map(|a| (c2_closed(p + 2.0, a) - 2.0 * c2_closed(p, a) - c2_closed(p, a - 1) - c2_closed(p, a + 1)).abs())
        .fold(0.0, f64::max)
}

/// `∫_𝕋 |1+w|^{p−2}(1+w) w̄^{α₁} dm(w)` by tanh-sinh, which keeps the zero
/// of `1 + w` at an endpoint.
pub fn c2_quadrature(p: f64, alpha1: i64, spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be a finite number ≥ 1, got {p}")));
    }
    let a = alpha1 as f64;
    let e = tanh_sinh(
        |t: f64| {
            let v = Complex64::new(1.0 + t.cos(), t.sin());
            let r = v.norm();
            if r == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            v * r.powf(p - 2.0) * Complex64::from_polar(1.0, -a * t)
        },
        -PI,
        PI,
        spec.target_tol * 2.0 * PI,
        crate::quadrature::level_cap(spec),
    );
    let value = e.value / (2.0 * PI);
    let error = e.error / (2.0 * PI) + value.im.abs();
    if error > spec.target_tol {
        return Err(Error::Nonconvergence { value: value.re, error });
    }
    Ok(Estimate::new(value.re, error))
}

/// Coefficients `c_p(α)` over exponents with `Σα = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable {
    pub d: usize,
    pub p: f64,
    pub entries: BTreeMap<ExponentIndex, Coef>,
}

impl CoeffTable {
    pub fn get(&self, alpha: &[i32]) -> Coef {
        self.entries.get(&ExponentIndex::from(alpha)).cloned().unwrap_or_else(Coef::zero)
    }

    /// Largest `|t(α) − t(σα)|` over coordinate permutations `σ`.
    pub fn permutation_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (alpha, c) in &self.entries {
            let e = alpha.entries();
            for perm in permutations(e.len()) {
                let moved: Vec<i32> = perm.iter().map(|&i| e[i]).collect();
                worst = worst.max((c.to_c64() - self.get(&moved).to_c64()).norm());
            }
        }
        worst
    }

    /// The `d = 3` recursion: `c_{p+2}(α) = 3c_p(α) + Σ_{i≠j} c_p(α − e_i + e_j)`.
    ///
    /// Only meaningful when `self` holds the full support of `c_p`, which is
    /// the case for the even-`p` tables.
    pub fn advance(&self) -> Result<CoeffTable> {
        if self.d != 3 {
            return Err(Error::invalid("the recursion is implemented for d = 3"));
        }
        let mut out: BTreeMap<ExponentIndex, Coef> = BTreeMap::new();
        let three = Coef::from_integer(3);
        for (alpha, c) in &self.entries {
            let slot = out.entry(alpha.clone()).or_insert_with(Coef::zero);
            *slot = &*slot + &(&three * c);
            for i in 0..3 {
                for j in 0..3 {
                    if i == j {
                        continue;
                    }
                    // c(α) feeds the coefficient at α + e_i − e_j
                    let mut beta = alpha.entries().to_vec();
                    beta[i] += 1;
                    beta[j] -= 1;
                    let slot = out.entry(ExponentIndex::new(beta)).or_insert_with(Coef::zero);
                    *slot = &*slot + c;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(CoeffTable { d: 3, p: self.p + 2.0, entries: out })
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(k - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, k - 1);
            out.push(v);
        }
    }
    out
}

/// Exact `c_{2n}(α)` in three variables, read off `ψⁿ·ψ̄^{n−1}`.
pub fn c3_even(n: u32) -> Result<CoeffTable> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if n > C3_EVEN_CAP {
        return Err(Error::BudgetExceeded(format!("n = {n} exceeds the expansion cap {C3_EVEN_CAP}")));
    }
    let psi = (0..3).try_fold(LaurentPoly::zero(3)?, |acc, j| acc.add(&LaurentPoly::variable(3, j)?))?;
    let f = psi.pow(n).mul(&psi.conj().pow(n - 1))?;
    let entries = f.terms().map(|(a, c)| (a.clone(), c.clone())).collect();
    Ok(CoeffTable { d: 3, p: 2.0 * n as f64, entries })
}

/// `c_p(α)` in three variables by quadrature over `𝕋²`.
pub fn c3_quadrature(p: f64, alpha: [i32; 3], spec: &QuadratureSpec) -> Result<Estimate> {
    let e = torus_coefficient(p, alpha, spec)?;
    Ok(Estimate::new(e.value.re, e.error + e.value.im.abs()))
}

/// Largest defect of the `d = 3` recursion evaluated with [`c3_quadrature`]
/// at the listed exponents.
pub fn c3_recursion_defect(p: f64, alphas: &[[i32; 3]], spec: &QuadratureSpec) -> Result<Estimate> {
    let mut worst = Estimate::exact(0.0);
    for alpha in alphas {
        let lhs = c3_quadrature(p + 2.0, *alpha, spec)?;
        let mut rhs = c3_quadrature(p, *alpha, spec)?.map(|v| 3.0 * v);
        rhs.error *= 3.0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let mut beta = *alpha;
                    beta[i] -= 1;
                    beta[j] += 1;
                    let c = c3_quadrature(p, beta, spec)?;
                    rhs.value += c.value;
                    rhs.error += c.error;
                }
            }
        }
        let defect = (lhs.value - rhs.value).abs();
        if defect > worst.value {
            worst = Estimate::new(defect, lhs.error + rhs.error);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((c2_closed(4.0, 1) - 3.0).abs() < 1e-13);
        assert!((c2_closed(4.0, 2) - 1.0).abs() < 1e-13);
        assert_eq!(c2_closed(4.0, 3), 0.0);
        assert!((c2_closed(3.0, 1) - 16.0 / (3.0 * PI)).abs() < 1e-13);
        assert!((c2_closed(400.0, 3) - c2_closed(400.0, -2)).abs() <= 1e-10 * c2_closed(400.0, 3));
    }

    #[test]
    fn pascal_rows() {
        for n in 1..8u32 {
            for a in -3..=(n as i64 + 3) {
                let exact = c2_even(n, a);
                let closed = c2_closed(2.0 * n as f64, a);
                let want: f64 = exact.to_string().parse().unwrap();
                assert!((closed - want).abs() <= 1e-12 * want.max(1.0), "n={n} a={a}");
            }
        }
    }

    #[test]
    fn recursion_by_hand() {
        // c₄(1,0) = 2c₂(1,0) + c₂(0,1) + c₂(2,−1) = 2 + 1 + 0
        assert!((2.0 * c2_closed(2.0, 1) + c2_closed(2.0, 0) + c2_closed(2.0, 2) - c2_closed(4.0, 1)).abs() < 1e-14);
    }

    #[test]
    fn small_even_tables() {
        let t1 = c3_even(1).unwrap();
        assert_eq!(t1.entries.len(), 3);
        assert_eq!(t1.get(&[1, 0, 0]), Coef::one());
        let t2 = c3_even(2).unwrap();
        assert_eq!(t2.get(&[1, 0, 0]), Coef::from_integer(5));
        assert_eq!(t2.get(&[1, 1, -1]), Coef::from_integer(2));
        assert_eq!(t2.get(&[2, -1, 0]), Coef::from_integer(1));
        assert_eq!(t1.advance().unwrap(), t2);
        assert_eq!(t2.permutation_defect(), 0.0);
        assert!(c3_even(0).is_err());
    }
}
