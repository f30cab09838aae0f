use std::f64::consts::PI;

use hardy_core::hilbert::lambda_expected_linear;
use hardy_core::polyalg::nonlinear_image_even;
use hardy_core::projection::{ij_values, project_linear, project_linear_even};
use hardy_core::{Coef, CoefVec, QuadratureSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default().with_tol(1e-10)
}

// four or more moduli need a nested rule, which is slow at tight tolerance
fn loose() -> QuadratureSpec {
    QuadratureSpec::default().with_tol(1e-8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn integrals_depend_only_on_moduli(
        moduli in prop::collection::vec(0.05f64..1.0, 2..4),
        phases in prop::collection::vec(-PI..PI, 4),
        p in 1.0f64..5.0,
    ) {
        let real = CoefVec::from_f64(&moduli).unwrap();
        let z: Vec<Complex64> = moduli.iter().zip(&phases).map(|(&m, &t)| Complex64::from_polar(m, t)).collect();
        let rotated = CoefVec::from_c64(&z).unwrap();
        let a = ij_values(&real, p, &loose()).unwrap();
        let b = ij_values(&rotated, p, &loose()).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn equal_moduli_are_eigenvectors(
        phases in prop::collection::vec(-PI..PI, 2..5),
        p in prop::sample::select(vec![1.0, 1.5, 3.0, 4.5, 6.0]),
    ) {
        let d = phases.len() as f64;
        let z: Vec<Complex64> = phases.iter().map(|&t| Complex64::from_polar(1.0 / d.sqrt(), t)).collect();
        let c = CoefVec::from_c64(&z).unwrap();
        let out = project_linear(&c, p, &loose()).unwrap().to_c64();
        let lambda = lambda_expected_linear(&c, p, &loose()).unwrap().value;
        for (o, zj) in out.iter().zip(&z) {
            prop_assert!((o - zj * lambda).norm() <= 1e-6, "p = {p}: {o} vs {}", zj * lambda);
        }
    }

    #[test]
    fn exact_projection_matches_the_polynomial_oracle(
        nums in prop::collection::vec((-6i64..7, -6i64..7, 1i64..5), 1..4),
        n in 0u32..3,
    ) {
        let c = CoefVec::new(nums.iter().map(|&(re, im, den)| &Coef::gaussian(re, im) / &Coef::from_integer(den)).collect()).unwrap();
        prop_assume!(!c.is_trivial());
        let direct = project_linear_even(&c, n).unwrap();
        let oracle = CoefVec::from_poly(&nonlinear_image_even(&c.to_poly(), n).unwrap());
        let quad = project_linear(&c, 2.0 * n as f64 + 2.0, &spec()).unwrap();
        match oracle {
            Some(o) => prop_assert_eq!(&direct, &o),
            None => prop_assert!(direct.is_trivial()),
        }
        for (q, e) in quad.to_c64().iter().zip(direct.to_c64()) {
            prop_assert!((q - e).norm() <= 1e-8 * e.norm().max(1.0));
        }
    }
}

#[test]
fn zero_coefficients_stay_exactly_zero() {
    let c = CoefVec::from_f64(&[0.6, 0.0, 0.8]).unwrap();
    for p in [1.0, 3.0] {
        let out = project_linear(&c, p, &spec()).unwrap();
        assert!(out.get(1).is_zero(), "p = {p}");
        assert!(!out.get(0).is_zero() && !out.get(2).is_zero());
    }
}
