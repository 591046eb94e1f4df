use proptest::prelude::*;
use siegel_maass::exact_terms::*;
use siegel_maass::Complex64;

fn arb_term() -> impl Strategy<Value = WeightedFunction> {
    prop_oneof![
        (-5i64..=5, 0i64..=3, 1i64..=3).prop_map(|(k, d, n)| make_phi(2 * k, d, n).unwrap()),
        (0i64..=4, 1i64..=3).prop_map(|(k, n)| make_psi(2 * k, n).unwrap()),
        (-5i64..=-1, 1i64..=3).prop_map(|(k, n)| make_phi_tilde(2 * k, n).unwrap()),
        (-4i64..=0, 1i64..=3).prop_map(|(k, n)| make_psi_tilde(2 * k, -n).unwrap()),
    ]
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-7 * (scale + b.norm())
}

#[test]
fn phi_depth_is_exact() {
    for d in 0..4 {
        let f = make_phi(8, d, 2).unwrap();
        assert_eq!(almost_holomorphic_depth(&f, 10), Some(d as u32));
    }
}

#[test]
fn holomorphic_terms_have_zero_shadow() {
    assert!(xi(&make_phi(6, 0, 1).unwrap()).is_zero());
    let s = xi(&make_psi_tilde(-2, -1).unwrap());
    assert_eq!(s.weight, 4);
    assert!(!s.is_zero());
}

#[test]
fn constructors_reject_bad_indices() {
    assert!(make_phi(4, 0, 0).is_err());
    assert!(make_phi(4, -1, 1).is_err());
    assert!(make_psi(-2, 1).is_err());
    assert!(make_phi_tilde(2, 1).is_err());
}

#[test]
fn phi_values() {
    let tau = Complex64::new(0.25, 1.0);
    let v = evaluate(&make_phi(4, 1, 1).unwrap(), tau).unwrap();
    // y^{-1} e^{2πi τ} at τ = 1/4 + i
    let want = Complex64::new(0.0, (-2.0 * std::f64::consts::PI).exp());
    assert!((v - want).norm() < 1e-17);
}

#[test]
fn weights_add_under_products() {
    let p = multiply(&make_psi(4, 1).unwrap(), &make_phi(6, 0, 2).unwrap()).unwrap();
    assert_eq!(p.weight, 10);
    assert_eq!(multiply(&WeightedFunction::unit(), &p).unwrap().expr, p.expr);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_is_weight(f in arb_term()) {
        let lr = lower(&raise(&f));
        let rl = raise(&lower(&f));
        let k = f.weight;
        prop_assert_eq!(lr.weight, rl.weight);
        let diff = rl.expr.sub(&lr.expr);
        let want = f.expr.scale_rational(&(num_rational::BigRational::from_integer(k.into())));
        prop_assert!(diff.equals(&want));
    }

    #[test]
    fn lowering_obeys_leibniz(f in arb_term(), g in arb_term()) {
        let lhs = lower(&multiply(&f, &g).unwrap());
        let rhs = multiply(&lower(&f), &g).unwrap().expr.add(&multiply(&f, &lower(&g)).unwrap().expr);
        prop_assert!(lhs.expr.expand_gammas().equals(&rhs.expand_gammas()));
    }

    #[test]
    fn json_round_trip(f in arb_term()) {
        let j = f.expr.to_json();
        let back = TermSum::from_json(&j).unwrap();
        prop_assert_eq!(back, f.expr);
    }

    #[test]
    fn exact_lowering_matches_differences(f in arb_term(), x in -0.5f64..0.5, y in 0.7f64..1.5) {
        let tau = Complex64::new(x, y);
        let ff = |t: Complex64| evaluate(&f, t);
        let exact = evaluate(&lower(&f), tau).unwrap();
        let h = 1e-3;
        let num = (4.0 * numeric_lower(&ff, tau, h / 2.0).unwrap() - numeric_lower(&ff, tau, h).unwrap()) / 3.0;
        prop_assert!(close(num, exact, ff(tau).unwrap().norm()));
    }
}
