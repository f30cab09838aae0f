use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::coef::Coef;
use crate::error::{Error, Result};

/// A Fourier frequency `α ∈ ℤ^d`.
///
/// Ordered lexicographically so that term maps iterate deterministically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentIndex(Vec<i32>);

impl ExponentIndex {
    pub fn new(entries: Vec<i32>) -> Self {
        ExponentIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        ExponentIndex(vec![0; dim])
    }

    /// The unit vector `e_j` (0-based `j`).
    pub fn unit(dim: usize, j: usize) -> Self {
        let mut v = vec![0; dim];
        v[j] = 1;
        ExponentIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    /// Every entry nonnegative.
    pub fn is_analytic(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    /// Sum of the entries.
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&a| a as i64).sum()
    }

    pub fn neg(&self) -> Self {
        ExponentIndex(self.0.iter().map(|a| -a).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        ExponentIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<i32>> for ExponentIndex {
    fn from(v: Vec<i32>) -> Self {
        ExponentIndex(v)
    }
}

impl From<&[i32]> for ExponentIndex {
    fn from(v: &[i32]) -> Self {
        ExponentIndex(v.to_vec())
    }
}

/// A trigonometric polynomial on `𝕋^d`, stored by its Fourier coefficients.
///
/// No zero coefficient is ever stored. Exact zeros are pruned after every
/// operation; floating coefficients below `1e-15 · max|coeff|` are pruned too.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<ExponentIndex, Coef>,
}

const FLOAT_PRUNE: f64 = 1e-15;

impl LaurentPoly {
    /// The zero polynomial in `dim` variables.
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        Ok(LaurentPoly { dim, terms: BTreeMap::new() })
    }

    pub fn constant(dim: usize, c: Coef) -> Result<Self> {
        Self::from_terms(dim, [(ExponentIndex::zero(dim), c)])
    }

    /// `c · z^α`.
    pub fn monomial(alpha: impl Into<ExponentIndex>, c: Coef) -> Result<Self> {
        let alpha = alpha.into();
        Self::from_terms(alpha.dim(), [(alpha, c)])
    }

    /// The coordinate function `z_{j+1}` (0-based `j`).
    pub fn variable(dim: usize, j: usize) -> Result<Self> {
        if j >= dim {
            return Err(Error::invalid(format!("variable index {j} out of range for dimension {dim}")));
        }
        Self::monomial(ExponentIndex::unit(dim, j), Coef::one())
    }

    /// Builds a polynomial from `(α, c)` pairs, summing repeated exponents.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentIndex, Coef)>,
    {
        let mut p = Self::zero(dim)?;
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: alpha.dim() });
            }
            p.accumulate(alpha, &c);
        }
        p.prune();
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentIndex, &Coef)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &ExponentIndex) -> Coef {
        self.terms.get(alpha).cloned().unwrap_or_else(Coef::zero)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coef::is_exact)
    }

    /// Fourier support contained in `ℕ₀^d`.
    pub fn is_analytic(&self) -> bool {
        self.terms.keys().all(ExponentIndex::is_analytic)
    }

    /// Common total degree of all terms, if the polynomial is homogeneous.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(ExponentIndex::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Floating copy of every coefficient.
    pub fn to_float(&self) -> LaurentPoly {
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.to_float())).collect(),
        }
    }

    fn accumulate(&mut self, alpha: ExponentIndex, c: &Coef) {
        match self.terms.get_mut(&alpha) {
            Some(slot) => *slot = &*slot + c,
            None => {
                self.terms.insert(alpha, c.clone());
            }
        }
    }

    fn prune(&mut self) {
        let max = self
            .terms
            .values()
            .filter(|c| !c.is_exact())
            .map(Coef::abs)
            .fold(0.0_f64, f64::max);
        let threshold = FLOAT_PRUNE * max;
        self.terms.retain(|_, c| match c {
            Coef::Exact(_) => !c.is_zero(),
            Coef::Float(z) => z.norm() > threshold,
        });
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.accumulate(a.clone(), c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Coef::from_integer(-1)))
    }

    pub fn scale(&self, c: &Coef) -> Self {
        let mut out = LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, x)| (a.clone(), x * c)).collect(),
        };
        out.prune();
        out
    }

    /// Coefficient convolution.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim)?;
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.accumulate(a.add(b), &(x * y));
            }
        }
        out.prune();
        Ok(out)
    }

    /// `self^n` by repeated squaring; `self^0 = 1`.
    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::constant(self.dim, Coef::one()).expect("dim checked at construction");
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same dimension");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same dimension");
            }
        }
        result
    }

    /// Pointwise conjugate on the torus: `ĥ(α) = conj(f̂(−α))`.
    pub fn conj(&self) -> Self {
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, c)| (a.neg(), c.conj())).collect(),
        }
    }

    /// Riesz projection: keep the terms with `α ∈ ℕ₀^d`.
    pub fn riesz_project(&self) -> Self {
        LaurentPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.is_analytic())
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    /// Evaluates the polynomial at a point of `(ℂ∖{0})^d`.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.dim, "evaluation point has wrong dimension");
        self.terms
            .iter()
            .map(|(a, c)| {
                let m: Complex64 = a
                    .entries()
                    .iter()
                    .zip(z)
                    .map(|(&e, zj)| zj.powi(e))
                    .product();
                c.to_c64() * m
            })
            .sum()
    }
}

/// `Σ_α f̂(α) conj(ĝ(α))`, the `L²(𝕋^d)` inner product.
pub fn h2_inner(f: &LaurentPoly, g: &LaurentPoly) -> Result<Coef> {
    f.check_dim(g)?;
    let mut acc = Coef::zero();
    // Both maps are sorted, so a merge walk suffices.
    let mut gi = g.terms.iter().peekable();
    for (a, x) in &f.terms {
        while let Some((b, _)) = gi.peek() {
            if *b < a {
                gi.next();
            } else {
                break;
            }
        }
        if let Some((b, y)) = gi.peek() {
            if *b == a {
                acc = &acc + &(x * &y.conj());
            }
        }
    }
    Ok(acc)
}

/// `‖f‖₂²`.
pub fn h2_norm_sqr(f: &LaurentPoly) -> Coef {
    f.terms.values().fold(Coef::zero(), |acc, c| &acc + &c.norm_sqr())
}

/// `‖f‖_{2n}^{2n} = ‖fⁿ‖₂²`, exact when `f` is exact.
pub fn hp_norm_even_pow(f: &LaurentPoly, n: u32) -> Result<Coef> {
    if n == 0 {
        return Err(Error::invalid("hp_norm_even needs n ≥ 1"));
    }
    if !f.is_analytic() {
        return Err(Error::NotAnalytic);
    }
    Ok(h2_norm_sqr(&f.pow(n)))
}

/// `‖f‖_{H^{2n}}`.
pub fn hp_norm_even(f: &LaurentPoly, n: u32) -> Result<f64> {
    let m = hp_norm_even_pow(f, n)?.to_c64().re;
    Ok(m.powf(1.0 / (2.0 * n as f64)))
}

/// `P(|f|^{2n} f) = P(f^{n+1} conj(f)^n)`, the analytic part of
/// `|f|^{p-2} f` at `p = 2n + 2`.
pub fn nonlinear_image_even(f: &LaurentPoly, n: u32) -> Result<LaurentPoly> {
    if !f.is_analytic() {
        return Err(Error::NotAnalytic);
    }
    let prod = f.pow(n + 1).mul(&f.conj().pow(n))?;
    Ok(prod.riesz_project())
}

impl fmt::Display for LaurentPoly {
    /// Renders in the syntax accepted by the command line parser, e.g.
    /// `z1^3 + (1/2)*z2 - 2*i*z1*z3^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (alpha, c) in &self.terms {
            let mono = render_monomial(alpha);
            match c {
                Coef::Exact(z) => {
                    for (part, imag) in [(&z.re, false), (&z.im, true)] {
                        if num_traits::Zero::is_zero(part) {
                            continue;
                        }
                        let neg = num_traits::Signed::is_negative(part);
                        let mag = num_traits::Signed::abs(part);
                        parts.push((neg, join_factors(render_rational(&mag), imag, &mono)));
                    }
                }
                Coef::Float(z) => {
                    for (part, imag) in [(z.re, false), (z.im, true)] {
                        if part == 0.0 {
                            continue;
                        }
                        parts.push((part < 0.0, join_factors(format!("{}", part.abs()), imag, &mono)));
                    }
                }
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (k, (neg, body)) in parts.iter().enumerate() {
            match (k, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

fn render_rational(q: &num_rational::BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("({}/{})", q.numer(), q.denom())
    }
}

fn render_monomial(alpha: &ExponentIndex) -> String {
    alpha
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(j, &e)| if e == 1 { format!("z{}", j + 1) } else { format!("z{}^{}", j + 1, e) })
        .collect::<Vec<_>>()
        .join("*")
}

fn join_factors(coef: String, imag: bool, mono: &str) -> String {
    let mut factors = Vec::new();
    let unit = coef == "1";
    if !unit || (mono.is_empty() && !imag) {
        factors.push(coef);
    }
    if imag {
        factors.push("i".to_string());
    }
    if !mono.is_empty() {
        factors.push(mono.to_string());
    }
    factors.join("*")
}
