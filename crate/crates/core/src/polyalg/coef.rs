use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Complex number with exact rational real and imaginary parts.
pub type ExactComplex = Complex<BigRational>;

/// A polynomial coefficient.
///
/// Exact coefficients stay exact under ring operations; any operation that
/// touches a floating coefficient produces a floating result.
#[derive(Clone, Debug, PartialEq)]
pub enum Coef {
    Exact(ExactComplex),
    Float(Complex64),
}

impl Default for Coef {
    fn default() -> Self {
        Coef::zero()
    }
}

impl Coef {
    pub fn zero() -> Self {
        Coef::Exact(ExactComplex::zero())
    }

    pub fn one() -> Self {
        Coef::Exact(ExactComplex::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Coef::Exact(Complex::new(BigRational::from_integer(n.into()), BigRational::zero()))
    }

    /// `num/den` as an exact real coefficient. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Coef::Exact(Complex::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        ))
    }

    /// The Gaussian integer `re + i·im`.
    pub fn gaussian(re: i64, im: i64) -> Self {
        Coef::Exact(Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into())))
    }

    pub fn from_rational(re: BigRational) -> Self {
        Coef::Exact(Complex::new(re, BigRational::zero()))
    }

    pub fn from_exact(re: BigRational, im: BigRational) -> Self {
        Coef::Exact(Complex::new(re, im))
    }

    pub fn from_f64(re: f64) -> Self {
        Coef::Float(Complex64::new(re, 0.0))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Coef::Float(z)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coef::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coef::Exact(z) => z.is_zero(),
            Coef::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Coef::Exact(z) => Complex64::new(rat_to_f64(&z.re), rat_to_f64(&z.im)),
            Coef::Float(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&ExactComplex> {
        match self {
            Coef::Exact(z) => Some(z),
            Coef::Float(_) => None,
        }
    }

    /// Floating copy of the coefficient.
    pub fn to_float(&self) -> Coef {
        Coef::Float(self.to_c64())
    }

    pub fn conj(&self) -> Coef {
        match self {
            Coef::Exact(z) => Coef::Exact(z.conj()),
            Coef::Float(z) => Coef::Float(z.conj()),
        }
    }

    /// `|c|²`, exact when the coefficient is exact.
    pub fn norm_sqr(&self) -> Coef {
        match self {
            Coef::Exact(z) => Coef::from_rational(z.norm_sqr()),
            Coef::Float(z) => Coef::from_f64(z.norm_sqr()),
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Real part as an exact rational, if the coefficient is exact and real.
    pub fn as_exact_real(&self) -> Option<&BigRational> {
        match self {
            Coef::Exact(z) if z.im.is_zero() => Some(&z.re),
            _ => None,
        }
    }

    /// Exact modulus when it is rational (`|c|²` a square of a rational).
    pub fn exact_modulus(&self) -> Option<BigRational> {
        let z = self.as_exact()?;
        if z.im.is_zero() {
            return Some(z.re.abs());
        }
        if z.re.is_zero() {
            return Some(z.im.abs());
        }
        rational_sqrt(&z.norm_sqr())
    }
}

/// Square root of a nonnegative rational, if it is rational.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

pub(crate) fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled quotient when the direct conversion overflows.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn binary(a: &Coef, b: &Coef, exact: impl Fn(&ExactComplex, &ExactComplex) -> ExactComplex, float: impl Fn(Complex64, Complex64) -> Complex64) -> Coef {
    match (a, b) {
        (Coef::Exact(x), Coef::Exact(y)) => Coef::Exact(exact(x, y)),
        _ => Coef::Float(float(a.to_c64(), b.to_c64())),
    }
}

impl Add for &Coef {
    type Output = Coef;
    fn add(self, rhs: &Coef) -> Coef {
        binary(self, rhs, |x, y| x + y, |x, y| x + y)
    }
}

impl Sub for &Coef {
    type Output = Coef;
    fn sub(self, rhs: &Coef) -> Coef {
        binary(self, rhs, |x, y| x - y, |x, y| x - y)
    }
}

impl Mul for &Coef {
    type Output = Coef;
    fn mul(self, rhs: &Coef) -> Coef {
        binary(self, rhs, |x, y| x * y, |x, y| x * y)
    }
}

impl Div for &Coef {
    type Output = Coef;
    /// Panics on division by an exact zero.
    fn div(self, rhs: &Coef) -> Coef {
        binary(self, rhs, |x, y| x / y, |x, y| x / y)
    }
}

impl Neg for &Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        match self {
            Coef::Exact(z) => Coef::Exact(-z.clone()),
            Coef::Float(z) => Coef::Float(-z),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Coef {
            type Output = Coef;
            fn $m(self, rhs: Coef) -> Coef {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        -&self
    }
}

impl From<i64> for Coef {
    fn from(n: i64) -> Self {
        Coef::from_integer(n)
    }
}

impl From<f64> for Coef {
    fn from(x: f64) -> Self {
        Coef::from_f64(x)
    }
}

impl From<Complex64> for Coef {
    fn from(z: Complex64) -> Self {
        Coef::Float(z)
    }
}

impl From<BigRational> for Coef {
    fn from(q: BigRational) -> Self {
        Coef::from_rational(q)
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Exact(z) if z.im.is_zero() => write!(f, "{}", z.re),
            Coef::Exact(z) => write!(f, "({} + {}i)", z.re, z.im),
            Coef::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Coef::Float(z) => write!(f, "({} + {}i)", z.re, z.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_stays_exact_and_float_promotes() {
        let a = Coef::from_ratio(1, 3);
        let b = Coef::from_ratio(2, 3);
        assert_eq!(&a + &b, Coef::one());
        let c = &a * &Coef::from_f64(3.0);
        assert!(!c.is_exact());
        assert!((c.to_c64().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_modulus_of_pythagorean_pair() {
        let z = Coef::from_exact(BigRational::from_integer(3.into()), BigRational::from_integer(4.into()));
        assert_eq!(z.exact_modulus(), Some(BigRational::from_integer(5.into())));
        let w = Coef::from_exact(BigRational::one(), BigRational::one());
        assert_eq!(w.exact_modulus(), None);
    }
}
