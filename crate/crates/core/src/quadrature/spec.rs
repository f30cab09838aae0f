use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid sizes and tolerances for every integral in the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Points per torus dimension for tensor trapezoid rules.
    pub angular_points: usize,
    /// Order of the Gauss rule for `∫₀¹ g(r) 2r dr`.
    pub radial_order: usize,
    /// Requested absolute tolerance.
    pub target_tol: f64,
    /// Number of grid doublings (or tanh-sinh levels beyond the minimum) allowed.
    pub max_refine: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { angular_points: 256, radial_order: 64, target_tol: 1e-6, max_refine: 8 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.angular_points < 4 {
            return Err(Error::invalid("angular_points must be at least 4"));
        }
        if self.radial_order < 2 {
            return Err(Error::invalid("radial_order must be at least 2"));
        }
        if !(self.target_tol > 0.0 && self.target_tol.is_finite()) {
            return Err(Error::invalid("target_tol must be positive"));
        }
        Ok(())
    }

    pub fn with_tol(&self, tol: f64) -> Self {
        QuadratureSpec { target_tol: tol, ..self.clone() }
    }

    /// Applies one `key=value` setting. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.trim().parse().map_err(|_| Error::invalid(format!("bad value {value:?} for {key}")))
        }
        match key.trim() {
            "angular" | "angular_points" => self.angular_points = num(key, value)?,
            "radial" | "radial_order" => self.radial_order = num(key, value)?,
            "tol" | "target_tol" => self.target_tol = num(key, value)?,
            "max_refine" => self.max_refine = num(key, value)?,
            other => return Err(Error::invalid(format!("unknown quadrature key {other:?}"))),
        }
        Ok(())
    }

    pub fn is_key(key: &str) -> bool {
        matches!(key.trim(), "angular" | "angular_points" | "radial" | "radial_order" | "tol" | "target_tol" | "max_refine")
    }
}

/// A numerical value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T = f64> {
    pub value: T,
    pub error: f64,
}

impl<T> Estimate<T> {
    pub fn new(value: T, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn exact(value: T) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Estimate<U> {
        Estimate { value: f(self.value), error: self.error }
    }
}

impl<T: fmt::Display> fmt::Display for Estimate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.1e}", self.value, self.error)
    }
}
