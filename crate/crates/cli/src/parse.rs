//! Text syntax for polynomials, e.g. `z1^3 + (1/2)*z2 - 2*i*z1*z3^-1`.
//!
//! Numbers are read exactly: `0.5`, `1/2` and `5e-1` all give the rational
//! one half. Variables are `z1` through `z9` and the imaginary unit is `i`.
//! The dimension is the highest variable index unless the caller fixes it.
//! This is the same syntax that `LaurentPoly` renders with `Display`.

use std::fmt;

use hardy_core::{Coef, CoefVec, LaurentPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};

pub const MAX_VARIABLES: usize = 9;

/// Largest power accepted for a base with more than one term.
const MAX_POWER: u32 = 64;

/// Largest decimal exponent in a number literal.
const MAX_DECIMAL_EXPONENT: i32 = 400;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(column: usize, message: impl Into<String>) -> Self {
        ParseError { column, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

/// An analytic polynomial, narrowed to a coefficient vector when it is linear.
#[derive(Clone, Debug, PartialEq)]
pub enum Parsed {
    Linear(CoefVec),
    Poly(LaurentPoly),
}

impl Parsed {
    pub fn into_poly(self) -> LaurentPoly {
        match self {
            Parsed::Linear(c) => c.to_poly(),
            Parsed::Poly(f) => f,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Var(usize),
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> PResult<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let col = k + 1;
        let ch = chars[k];
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' | '·' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            k += 1;
            continue;
        }
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let (q, next) = lex_number(&chars, k)?;
            out.push((Tok::Num(q), col));
            k = next;
        } else if ch.is_alphabetic() {
            let start = k;
            while k < chars.len() && chars[k].is_alphanumeric() {
                k += 1;
            }
            let word: String = chars[start..k].iter().collect();
            out.push((word_token(&word, col)?, col));
        } else {
            return Err(ParseError::new(col, format!("unexpected character {ch:?}")));
        }
    }
    Ok(out)
}

fn word_token(word: &str, col: usize) -> PResult<Tok> {
    if word == "i" {
        return Ok(Tok::I);
    }
    let index = word.strip_prefix('z').filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()));
    match index.and_then(|s| s.parse::<usize>().ok()) {
        Some(j) if (1..=MAX_VARIABLES).contains(&j) => Ok(Tok::Var(j - 1)),
        Some(_) => Err(ParseError::new(col, format!("variables run from z1 to z{MAX_VARIABLES}, found {word}"))),
        None => Err(ParseError::new(col, format!("unknown name {word:?}"))),
    }
}

fn lex_number(chars: &[char], start: usize) -> PResult<(BigRational, usize)> {
    let col = start + 1;
    let mut k = start;
    let mut digits = String::new();
    let mut frac_len = 0i32;
    let mut seen_point = false;
    while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
        if chars[k] == '.' {
            if seen_point {
                return Err(ParseError::new(k + 1, "second decimal point in a number"));
            }
            seen_point = true;
        } else {
            digits.push(chars[k]);
            if seen_point {
                frac_len += 1;
            }
        }
        k += 1;
    }
    if digits.is_empty() {
        return Err(ParseError::new(col, "a lone decimal point is not a number"));
    }
    let mut exponent = 0i32;
    if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
        let mut j = k + 1;
        let mut sign = 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            sign = if chars[j] == '-' { -1 } else { 1 };
            j += 1;
        }
        let exp_start = j;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        if j == exp_start {
            return Err(ParseError::new(k + 1, "missing digits after the exponent marker"));
        }
        let text: String = chars[exp_start..j].iter().collect();
        exponent = match text.parse::<i32>() {
            Ok(e) if e <= MAX_DECIMAL_EXPONENT => sign * e,
            _ => return Err(ParseError::new(exp_start + 1, "decimal exponent is too large")),
        };
        k = j;
    }
    let mantissa: BigInt = digits.parse().expect("only ASCII digits were collected");
    let shift = exponent - frac_len;
    let ten = BigInt::from(10);
    let q = if shift >= 0 {
        BigRational::from_integer(mantissa * Pow::pow(&ten, shift as u32))
    } else {
        BigRational::new(mantissa, Pow::pow(&ten, (-shift) as u32))
    };
    Ok((q, k))
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    dim: usize,
    /// Column just past the input, for errors at the end.
    end: usize,
    /// Column of the first construct that can produce a negative exponent.
    negative_site: Option<usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }

    fn constant(&self, c: Coef) -> LaurentPoly {
        LaurentPoly::constant(self.dim, c).expect("dimension is at least one")
    }

    fn expr(&mut self) -> PResult<LaurentPoly> {
        let mut acc = self.term()?;
        loop {
            let negate = match self.peek() {
                Some(Tok::Plus) => false,
                Some(Tok::Minus) => true,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let t = self.term()?;
            acc = if negate { acc.sub(&t) } else { acc.add(&t) }.expect("operands share the dimension");
        }
    }

    fn term(&mut self) -> PResult<LaurentPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f).expect("operands share the dimension");
                }
                Some(Tok::Slash) => {
                    let col = self.column();
                    self.pos += 1;
                    let f = self.factor()?;
                    let inv = self.invert(&f, col)?;
                    acc = acc.mul(&inv).expect("operands share the dimension");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> PResult<LaurentPoly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                return Ok(self.factor()?.scale(&Coef::from_integer(-1)));
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                return self.factor();
            }
            _ => {}
        }
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let caret_col = self.column();
        self.pos += 1;
        let negative = self.peek() == Some(&Tok::Minus);
        if negative {
            self.pos += 1;
        }
        let col = self.column();
        let n = match self.toks.get(self.pos) {
            Some((Tok::Num(q), _)) if q.is_integer() => q.to_integer().to_u32(),
            Some((Tok::Num(_), _)) => return Err(ParseError::new(col, "exponents must be integers")),
            _ => return Err(ParseError::new(col, "expected an integer exponent")),
        };
        self.pos += 1;
        let n = n.ok_or_else(|| ParseError::new(col, "exponent is too large"))?;
        if n > MAX_POWER && base.len() > 1 {
            return Err(ParseError::new(col, format!("powers of sums are limited to {MAX_POWER}")));
        }
        if n > i32::MAX as u32 / 2 {
            return Err(ParseError::new(col, "exponent is too large"));
        }
        let base = if negative { self.invert(&base, caret_col)? } else { base };
        Ok(base.pow(n))
    }

    /// The reciprocal of a single nonzero term.
    fn invert(&mut self, f: &LaurentPoly, col: usize) -> PResult<LaurentPoly> {
        let mut terms = f.terms();
        let (alpha, c) = match (terms.next(), terms.next()) {
            (Some(t), None) => t,
            (None, _) => return Err(ParseError::new(col, "division by zero")),
            _ => return Err(ParseError::new(col, "only single terms can be inverted")),
        };
        if alpha.entries().iter().any(|&e| e != 0) {
            self.negative_site.get_or_insert(col);
        }
        let inv = &Coef::one() / c;
        Ok(LaurentPoly::monomial(alpha.neg(), inv).expect("dimension is at least one"))
    }

    fn atom(&mut self) -> PResult<LaurentPoly> {
        let col = self.column();
        let Some((tok, _)) = self.toks.get(self.pos) else {
            return Err(ParseError::new(col, "unexpected end of input"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(q) => Ok(self.constant(Coef::from_rational(q.clone()))),
            Tok::I => Ok(self.constant(Coef::gaussian(0, 1))),
            Tok::Var(j) => {
                if *j >= self.dim {
                    return Err(ParseError::new(col, format!("z{} exceeds the dimension {}", j + 1, self.dim)));
                }
                Ok(LaurentPoly::variable(self.dim, *j).expect("index checked above"))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(ParseError::new(self.column(), "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(ParseError::new(col, format!("unexpected {}", describe(other)))),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Num(_) => "number",
        Tok::Var(_) => "variable",
        Tok::I => "'i'",
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Slash => "'/'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
    }
}

fn parse_tokens(text: &str, dim: Option<usize>) -> PResult<(LaurentPoly, Option<usize>)> {
    let toks = lex(text)?;
    let end = text.chars().count() + 1;
    if toks.is_empty() {
        return Err(ParseError::new(end, "empty expression"));
    }
    let highest = toks.iter().filter_map(|(t, _)| if let Tok::Var(j) = t { Some(j + 1) } else { None }).max();
    let dim = match dim {
        Some(d) if (1..=MAX_VARIABLES).contains(&d) => d,
        Some(d) => return Err(ParseError::new(1, format!("dimension must be between 1 and {MAX_VARIABLES}, got {d}"))),
        None => highest.unwrap_or(1),
    };
    let mut parser = Parser { toks: &toks, pos: 0, dim, end, negative_site: None };
    let f = parser.expr()?;
    if parser.pos < toks.len() {
        let (tok, col) = &toks[parser.pos];
        return Err(ParseError::new(*col, format!("unexpected {}", describe(tok))));
    }
    Ok((f, parser.negative_site))
}

/// Parses a Laurent polynomial; the dimension is the highest variable index
/// (at least 1).
pub fn parse_laurent(text: &str) -> PResult<LaurentPoly> {
    parse_tokens(text, None).map(|(f, _)| f)
}

/// Parses a Laurent polynomial in exactly `dim` variables.
pub fn parse_laurent_in(text: &str, dim: usize) -> PResult<LaurentPoly> {
    parse_tokens(text, Some(dim)).map(|(f, _)| f)
}

/// Parses an analytic polynomial, returning a coefficient vector when it is
/// linear. Negative exponents that survive simplification are rejected.
pub fn parse_poly(text: &str) -> PResult<Parsed> {
    let (f, site) = parse_tokens(text, None)?;
    if !f.is_analytic() {
        let col = site.unwrap_or(1);
        return Err(ParseError::new(col, "negative exponents are not allowed for analytic polynomials"));
    }
    Ok(match CoefVec::from_poly(&f) {
        Some(c) => Parsed::Linear(c),
        None => Parsed::Poly(f),
    })
}

/// A single constant such as `-3`, `(1/2)`, `0.25` or `1+2*i`.
pub fn parse_constant(text: &str) -> PResult<Coef> {
    if let Some((_, col)) = lex(text)?.iter().find(|(t, _)| matches!(t, Tok::Var(_))) {
        return Err(ParseError::new(*col, "expected a constant, found a variable"));
    }
    let (f, _) = parse_tokens(text, Some(1))?;
    let c = f.terms().next().map_or_else(Coef::zero, |(_, c)| c.clone());
    Ok(c)
}

/// A comma-separated list of constants, e.g. `0.7256, 0.6766, 0.1251`.
pub fn parse_coeffs(text: &str) -> PResult<CoefVec> {
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for item in text.split(',') {
        let c = parse_constant(item).map_err(|e| ParseError::new(e.column + offset, e.message))?;
        coeffs.push(c);
        offset += item.chars().count() + 1;
    }
    if coeffs.len() > MAX_VARIABLES {
        return Err(ParseError::new(1, format!("at most {MAX_VARIABLES} coefficients are supported")));
    }
    CoefVec::new(coeffs).map_err(|e| ParseError::new(1, e.to_string()))
}
