//! Gamma-function helpers.

use std::f64::consts::PI;

use statrs::function::gamma::{gamma as statrs_gamma, ln_gamma};

/// `Γ(x)`. Positive integers and half-integers are computed as finite
/// products, which are correctly rounded to a few ulps.
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 && x < 171.0 && (2.0 * x) == (2.0 * x).floor() {
        let (mut acc, mut k) = if x == x.floor() { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    statrs_gamma(x)
}

/// `1/Γ(x)`, entire in `x`; exactly `0` at the poles `x = 0, −1, −2, …`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        // Reflection: 1/Γ(x) = sin(πx) Γ(1−x) / π
        return sin_pi(x) * gamma(1.0 - x) / PI;
    }
    if x > 171.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma(x)
}

/// `sin(πx)` with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

/// `(ln|Γ(x)|, sign Γ(x))` for `x` not a pole.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (ln_gamma(x), 1.0);
    }
    let s = sin_pi(x);
    // Γ(x) = π / (sin(πx) Γ(1−x))
    ((PI / s.abs()).ln() - ln_gamma(1.0 - x), s.signum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rgamma_poles_and_values() {
        for k in 0..6 {
            assert_eq!(rgamma(-(k as f64)), 0.0);
        }
        assert_relative_eq!(rgamma(1.5), 2.0 / PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(rgamma(-0.5), -1.0 / (2.0 * PI.sqrt()), max_relative = 1e-14);
        assert_relative_eq!(rgamma(5.0), 1.0 / 24.0, max_relative = 1e-14);
    }

    #[test]
    fn signed_log_gamma() {
        let (l, s) = ln_gamma_signed(-1.5);
        assert_relative_eq!(s * l.exp(), 4.0 * PI.sqrt() / 3.0, max_relative = 1e-13);
    }
}
