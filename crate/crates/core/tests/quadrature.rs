use std::f64::consts::PI;

use hardy_core::polyalg::h2_norm_sqr;
use hardy_core::quadrature::{ring_integral, tanh_sinh, torus_integrate};
use hardy_core::{Coef, ExponentIndex, LaurentPoly, QuadratureSpec};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_poly(dim: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-2i32..3, dim), -4i64..5, -4i64..5), 1..5).prop_map(move |terms| {
        LaurentPoly::from_terms(dim, terms.into_iter().map(|(a, re, im)| (ExponentIndex::new(a), Coef::gaussian(re, im))))
            .unwrap()
    })
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn torus_rule_reproduces_the_two_norm(f in small_poly(2)) {
        let spec = QuadratureSpec { angular_points: 16, ..QuadratureSpec::default().with_tol(1e-12) };
        let e = torus_integrate(2, |z| Complex64::new(f.eval(z).norm_sqr(), 0.0), &spec).unwrap();
        let exact = h2_norm_sqr(&f).as_exact_real().unwrap().to_f64().unwrap();
        prop_assert!((e.value.re - exact).abs() <= 1e-12 * exact.max(1.0), "{} vs {exact}", e.value.re);
    }

    #[test]
    fn ring_integral_sees_only_moduli(
        a in 0.0f64..3.0, b in 0.0f64..3.0, s in -1.5f64..6.0, ta in -PI..PI, tb in -PI..PI,
    ) {
        let base = ring_integral(Complex64::new(a, 0.0), Complex64::new(b, 0.0), s);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let rotated = ring_integral(Complex64::from_polar(a, ta), Complex64::from_polar(b, tb), s).unwrap();
        let swapped = ring_integral(Complex64::new(b, 0.0), Complex64::new(a, 0.0), s).unwrap();
        prop_assert!((rotated - base).abs() <= 1e-13 * base.max(1.0));
        prop_assert!((swapped - base).abs() <= 1e-12 * base.max(1.0), "{swapped} vs {base}");
    }

    #[test]
    fn even_exponents_match_the_binomial_expansion(a in 0.0f64..2.0, b in 0.0f64..2.0, n in 0u64..6) {
        let v = ring_integral(Complex64::new(a, 0.0), Complex64::new(b, 0.0), 2.0 * n as f64).unwrap();
        let want: f64 = (0..=n)
            .map(|j| binomial(n, j).powi(2) * a.powi(2 * (n - j) as i32) * b.powi(2 * j as i32))
            .sum();
        prop_assert!((v - want).abs() <= 1e-12 * want.max(1.0), "{v} vs {want}");
    }
}

#[test]
fn error_estimates_are_conservative() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut cases = 0;
    let mut covered = 0;
    for _ in 0..100 {
        let tol = 10f64.powf(rng.random_range(-12.0..-5.0));
        let alpha: f64 = rng.random_range(-0.8..3.0);
        let c: f64 = rng.random_range(0.1..20.0);
        let k: f64 = rng.random_range(-3.0..3.0);
        let battery: [(Box<dyn Fn(f64) -> f64>, f64); 3] = [
            (Box::new(move |x: f64| x.powf(alpha)), 1.0 / (alpha + 1.0)),
            (Box::new(move |x: f64| 1.0 / (1.0 + c * x * x)), c.sqrt().atan() / c.sqrt()),
            (Box::new(move |x: f64| (k * x).exp()), if k.abs() < 1e-12 { 1.0 } else { k.exp_m1() / k }),
        ];
        for (f, exact) in &battery {
            let e = tanh_sinh(f, 0.0, 1.0, tol, 12);
            cases += 1;
            // a few ulps of the value are beyond any estimator
            if (e.value - exact).abs() <= e.error + 4.0 * f64::EPSILON * exact.abs() {
                covered += 1;
            }
        }
    }
    assert!(covered as f64 >= 0.95 * cases as f64, "{covered} of {cases}");
}
