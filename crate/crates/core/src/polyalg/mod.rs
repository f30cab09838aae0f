//! Exact sparse Laurent-polynomial arithmetic on `ℤ^d` exponents.
//!
//! Products, conjugation on the torus and the Riesz projection are exact
//! whenever the coefficients are rational, which makes this module the oracle
//! for every even-exponent computation elsewhere in the crate.

mod coef;
mod laurent;
mod serial;

pub use coef::{rational_sqrt, Coef, ExactComplex};
pub(crate) use coef::rat_to_f64;
pub use laurent::{
    h2_inner, h2_norm_sqr, hp_norm_even, hp_norm_even_pow, nonlinear_image_even, ExponentIndex,
    LaurentPoly,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients `c_j` of a 1-homogeneous polynomial `Σ c_j z_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefVec {
    coeffs: Vec<Coef>,
}

impl CoefVec {
    pub fn new(coeffs: Vec<Coef>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a coefficient vector needs at least one entry"));
        }
        Ok(CoefVec { coeffs })
    }

    pub fn from_f64(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Coef::from_f64(x)).collect())
    }

    pub fn from_c64(values: &[Complex64]) -> Result<Self> {
        Self::new(values.iter().map(|&z| Coef::Float(z)).collect())
    }

    /// The coordinate vector `e_{j+1}` in dimension `dim`.
    pub fn unit(dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(Error::invalid(format!("index {j} out of range for dimension {dim}")));
        }
        let mut v = vec![Coef::zero(); dim];
        v[j] = Coef::one();
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Coef] {
        &self.coeffs
    }

    pub fn get(&self, j: usize) -> &Coef {
        &self.coeffs[j]
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(Coef::to_c64).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.coeffs.iter().map(Coef::abs).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Coef::is_exact)
    }

    /// All coefficients zero.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Coef::is_zero)
    }

    /// Number of nonzero coefficients.
    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn h2_norm(&self) -> f64 {
        self.moduli().iter().map(|m| m * m).sum::<f64>().sqrt()
    }

    /// Scales to unit `H²` norm; zero entries stay exact zeros.
    pub fn normalized(&self) -> Result<CoefVec> {
        let n = self.h2_norm();
        if n == 0.0 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Self::new(
            self.coeffs
                .iter()
                .map(|c| if c.is_zero() { Coef::zero() } else { Coef::Float(c.to_c64() / n) })
                .collect(),
        )
    }

    /// The polynomial `Σ c_j z_j`.
    pub fn to_poly(&self) -> LaurentPoly {
        let d = self.dim();
        LaurentPoly::from_terms(
            d,
            self.coeffs.iter().enumerate().map(|(j, c)| (ExponentIndex::unit(d, j), c.clone())),
        )
        .expect("unit exponents match the dimension")
    }

    /// Reads the coefficients of a 1-homogeneous polynomial.
    pub fn from_poly(f: &LaurentPoly) -> Option<CoefVec> {
        let d = f.dim();
        let mut v = vec![Coef::zero(); d];
        for (alpha, c) in f.terms() {
            let e = alpha.entries();
            let j = e.iter().position(|&x| x == 1)?;
            if e.iter().enumerate().any(|(k, &x)| k != j && x != 0) {
                return None;
            }
            v[j] = c.clone();
        }
        if f.is_zero() {
            return None;
        }
        CoefVec::new(v).ok()
    }

    /// `H²` distance between two vectors of equal dimension.
    pub fn distance(&self, other: &CoefVec) -> f64 {
        self.to_c64()
            .iter()
            .zip(other.to_c64())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn small_poly(dim: usize, analytic: bool) -> impl Strategy<Value = LaurentPoly> {
        let lo = if analytic { 0 } else { -2 };
        prop::collection::vec(
            (prop::collection::vec(lo..3i32, dim), -4i64..5, 1i64..4, -3i64..4),
            0..5,
        )
        .prop_map(move |terms| {
            LaurentPoly::from_terms(
                dim,
                terms.into_iter().map(|(a, n, d, im)| {
                    let re = num_rational::BigRational::new(n.into(), d.into());
                    (ExponentIndex::new(a), Coef::from_exact(re, num_rational::BigRational::from_integer(im.into())))
                }),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn mul_commutative_and_associative(f in small_poly(2, false), g in small_poly(2, false), h in small_poly(2, false)) {
            prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
            prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
        }

        #[test]
        fn projection_idempotent(f in small_poly(3, false)) {
            let p = f.riesz_project();
            prop_assert_eq!(p.riesz_project(), p);
        }

        #[test]
        fn projection_is_self_adjoint_against_analytic(f in small_poly(2, false), g in small_poly(2, true)) {
            prop_assert_eq!(h2_inner(&f, &g).unwrap(), h2_inner(&f.riesz_project(), &g).unwrap());
        }

        #[test]
        fn two_norm_matches_inner_product(terms in prop::collection::vec((prop::collection::vec(0..3i32, 2), -5i64..6), 1..5)) {
            let f = LaurentPoly::from_terms(2, terms.into_iter().map(|(a, c)| (ExponentIndex::new(a), Coef::from_integer(c)))).unwrap();
            prop_assume!(!f.is_zero());
            let n = hp_norm_even(&f, 1).unwrap();
            let ip = h2_inner(&f, &f).unwrap().to_c64().re;
            prop_assert!((n * n - ip).abs() <= 1e-12 * ip);
        }

        #[test]
        fn monomials_are_fixed(alpha in prop::collection::vec(0..4i32, 1..4), n in 0u32..4) {
            let m = LaurentPoly::monomial(alpha, Coef::one()).unwrap();
            prop_assert_eq!(nonlinear_image_even(&m, n).unwrap(), m);
        }

        #[test]
        fn json_roundtrip(f in small_poly(3, false)) {
            let text = serde_json::to_string(&f).unwrap();
            let back: LaurentPoly = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
