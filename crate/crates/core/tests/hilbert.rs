use hardy_core::hilbert::*;
use hardy_core::{Coef, CoefVec, ExponentIndex, LaurentPoly, QuadratureSpec};
use proptest::prelude::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::default().with_tol(1e-10)
}

#[test]
fn lambda_for_the_cubic_is_five() {
    let f = LaurentPoly::from_terms(
        3,
        [([3, 0, 0], 1), ([0, 3, 0], 1), ([1, 1, 1], 1)].map(|(a, c)| (ExponentIndex::from(&a[..]), Coef::from_integer(c))),
    )
    .unwrap();
    assert_eq!(lambda_expected_poly(&f, 1).unwrap(), Coef::from_integer(5));
}

#[test]
fn p_two_is_universal() {
    let c = CoefVec::from_f64(&[0.9, 0.1, 0.3]).unwrap();
    let r = residual_linear(&c, 2.0, &spec()).unwrap();
    assert_eq!(r.residual, 0.0);
    assert_eq!(r.verdict, Verdict::HilbertPoint);
    let exact = CoefVec::new(vec![Coef::from_ratio(1, 3), Coef::from_integer(-2)]).unwrap();
    let r = residual_linear_even(&exact, 0).unwrap();
    assert_eq!(r.residual, 0.0);
    let g = LaurentPoly::from_terms(
        2,
        [([2, 0], 3), ([0, 1], -1), ([0, 0], 5)].map(|(a, c)| (ExponentIndex::from(&a[..]), Coef::from_integer(c))),
    )
    .unwrap();
    assert_eq!(residual_even_poly(&g, 0).unwrap().verdict, Verdict::HilbertPoint);
}

#[test]
fn even_exact_and_quadrature_agree_on_linear_inputs() {
    let cases: [&[i64]; 4] = [&[1, 1, 1], &[3, 1], &[1, 0, 2], &[2, -2]];
    for c in cases {
        let exact = CoefVec::new(c.iter().map(|&x| Coef::from_integer(x)).collect()).unwrap();
        let float = CoefVec::from_f64(&c.iter().map(|&x| x as f64).collect::<Vec<_>>()).unwrap();
        for n in 0..3u32 {
            let a = residual_linear_even(&exact, n).unwrap();
            let b = residual_linear(&float, 2.0 * n as f64 + 2.0, &spec()).unwrap();
            assert_eq!(a.verdict, b.verdict, "c = {c:?}, n = {n}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn unequal_moduli_fail_for_p_above_two() {
    for p in [2.5, 3.0, 5.0] {
        let r = residual_linear(&CoefVec::from_f64(&[0.8, 0.6]).unwrap(), p, &spec()).unwrap();
        assert_eq!(r.verdict, Verdict::NotHilbertPoint, "p = {p}");
    }
}

#[test]
fn equal_moduli_pass_for_every_p() {
    let c = CoefVec::from_c64(&[
        num_complex::Complex64::from_polar(1.0, 0.3),
        num_complex::Complex64::from_polar(1.0, -2.0),
        num_complex::Complex64::new(0.0, 0.0),
        num_complex::Complex64::from_polar(1.0, 1.0),
    ])
    .unwrap();
    for p in [1.0, 1.5, 3.0, 4.0, 7.0] {
        let r = residual_linear(&c, p, &spec()).unwrap();
        assert_eq!(r.verdict, Verdict::HilbertPoint, "p = {p}: {r:?}");
    }
}

#[test]
fn dispatcher_routes() {
    let q = QuadratureSpec { angular_points: 32, ..spec() };
    let lin = CoefVec::new(vec![Coef::one(), Coef::one()]).unwrap().to_poly();
    let r = check(&lin, PValue::Infinity, false, &q).unwrap();
    assert_eq!((r.verdict, r.method), (Verdict::HilbertPoint, Method::InfinityClosedForm));
    let cubic = LaurentPoly::from_terms(
        3,
        [([3, 0, 0], 1), ([0, 3, 0], 1), ([1, 1, 1], 1)].map(|(a, c)| (ExponentIndex::from(&a[..]), Coef::from_integer(c))),
    )
    .unwrap();
    let r = check(&cubic, PValue::Infinity, false, &q).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.note.is_some());
    let r = check(&cubic, PValue::Finite(4.0), true, &q).unwrap();
    assert_eq!((r.verdict, r.method), (Verdict::HilbertPoint, Method::EvenExact));
    let mixed = LaurentPoly::from_terms(
        2,
        [([1, 0], 1), ([0, 2], 2)].map(|(a, c)| (ExponentIndex::from(&a[..]), Coef::from_integer(c))),
    )
    .unwrap();
    assert_eq!(check(&mixed, PValue::Finite(3.0), false, &q).unwrap().verdict, Verdict::Inconclusive);
    assert_eq!(check(&mixed, PValue::Finite(4.0), false, &q).unwrap().verdict, Verdict::NotHilbertPoint);
    let conj = LaurentPoly::monomial(vec![-1, 0], Coef::one()).unwrap();
    assert!(check(&conj, PValue::Finite(3.0), false, &q).is_err());
}

#[test]
fn cubic_at_p_three_is_not_a_hilbert_point() {
    // the obstruction coefficient at p = 3 is about −0.032
    let cubic = LaurentPoly::from_terms(
        3,
        [([3, 0, 0], 1), ([0, 3, 0], 1), ([1, 1, 1], 1)].map(|(a, c)| (ExponentIndex::from(&a[..]), Coef::from_integer(c))),
    )
    .unwrap();
    let q = QuadratureSpec { angular_points: 64, ..spec() };
    let r = residual_homogeneous(&cubic, 3.0, &q).unwrap();
    assert_eq!(r.verdict, Verdict::NotHilbertPoint, "{r:?}");
    let r = residual_homogeneous(&cubic, 4.0, &q).unwrap();
    assert_eq!(r.verdict, Verdict::HilbertPoint, "{r:?}");
}

#[test]
fn report_serializes_with_kebab_case() {
    let r = hilbert_infinity_linear(&CoefVec::new(vec![Coef::from_integer(2), Coef::one()]).unwrap()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["verdict"], "not-hilbert-point");
    assert_eq!(v["method"], "infinity-closed-form");
    assert_eq!(v["p"], "inf");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdict_is_scale_invariant(m in prop::collection::vec(0.05f64..1.0, 2..4), t in 0.1f64..10.0, p in prop::sample::select(vec![1.5, 3.0, 4.0])) {
        let c = CoefVec::from_f64(&m).unwrap();
        let scaled = CoefVec::from_f64(&m.iter().map(|x| x * t).collect::<Vec<_>>()).unwrap();
        let a = residual_linear(&c, p, &spec()).unwrap();
        let b = residual_linear(&scaled, p, &spec()).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert!((a.residual - b.residual).abs() <= 1e-8 * (1.0 + a.residual));
    }

    #[test]
    fn infinity_test_matches_equal_moduli(k in 1usize..5, extra in 0usize..3, q in 2i64..5) {
        let mut v = vec![Coef::from_integer(q); k];
        v.extend(std::iter::repeat(Coef::zero()).take(extra));
        let r = hilbert_infinity_linear(&CoefVec::new(v.clone()).unwrap()).unwrap();
        prop_assert_eq!(r.verdict, Verdict::HilbertPoint);
        if k > 1 {
            v[0] = Coef::from_integer(q + 1);
            let r = hilbert_infinity_linear(&CoefVec::new(v).unwrap()).unwrap();
            prop_assert_eq!(r.verdict, Verdict::NotHilbertPoint);
        }
    }
}
