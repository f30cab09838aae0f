use num_complex::Complex64;
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::coef::Coef;
use super::laurent::{ExponentIndex, LaurentPoly};

// Exact parts are written as strings ("3", "-1/2") so they survive a round
// trip without loss; floating parts are plain JSON numbers.

#[derive(Serialize, Deserialize)]
struct TermRepr {
    alpha: Vec<i32>,
    re: Value,
    im: Value,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    terms: Vec<TermRepr>,
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms()
            .map(|(a, c)| {
                let (re, im) = match c {
                    Coef::Exact(z) => (Value::String(z.re.to_string()), Value::String(z.im.to_string())),
                    Coef::Float(z) => (float_value(z.re), float_value(z.im)),
                };
                TermRepr { alpha: a.entries().to_vec(), re, im }
            })
            .collect();
        PolyRepr { dim: self.dim(), terms }.serialize(s)
    }
}

enum Part {
    Exact(BigRational),
    Float(f64),
}

fn parse_part(v: &Value) -> Result<Part, String> {
    match v {
        Value::String(s) => s.trim().parse::<BigRational>().map(Part::Exact).map_err(|e| format!("bad rational {s:?}: {e}")),
        Value::Number(n) => n.as_f64().map(Part::Float).ok_or_else(|| format!("bad number {n}")),
        other => Err(format!("expected a number or rational string, found {other}")),
    }
}

fn to_f64(p: &Part) -> f64 {
    match p {
        Part::Exact(q) => super::coef::rat_to_f64(q),
        Part::Float(x) => *x,
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let re = parse_part(&t.re).map_err(D::Error::custom)?;
            let im = parse_part(&t.im).map_err(D::Error::custom)?;
            let c = match (re, im) {
                (Part::Exact(a), Part::Exact(b)) => Coef::from_exact(a, b),
                (a, b) => Coef::Float(Complex64::new(to_f64(&a), to_f64(&b))),
            };
            terms.push((ExponentIndex::new(t.alpha), c));
        }
        LaurentPoly::from_terms(repr.dim, terms).map_err(D::Error::custom)
    }
}
