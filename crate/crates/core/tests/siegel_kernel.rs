use proptest::prelude::*;
use siegel_maass::oracle::h_monte_carlo;
use siegel_maass::siegel_kernel::*;
use siegel_maass::sp2_cosets::SymplecticRep;
use siegel_maass::{Complex64, Result};

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn point(x: (f64, f64, f64), y: (f64, f64, f64)) -> SiegelPoint {
    SiegelPoint::new(SymMat2::new(x.0, x.1, x.2), SymMat2::new(y.0, y.1, y.2)).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn psi_is_real_positive_without_real_part() {
    let z = point((0.0, 0.0, 0.0), (1.2, 0.1, 0.9));
    let v = psi(4, &SymMat2::new(1.0, 0.5, 1.0), &z, &q()).unwrap();
    assert!(v.re > 0.0 && v.im == 0.0);
}

#[test]
fn psi_rejects_bad_index() {
    let z = SiegelPoint::scalar_imaginary(1.0).unwrap();
    assert!(psi(4, &SymMat2::new(1.0, 0.3, 1.0), &z, &q()).is_err());
    assert!(psi(4, &SymMat2::new(1.0, 0.0, -1.0), &z, &q()).is_err());
    assert!(psi(3, &SymMat2::identity(), &z, &q()).is_err());
    assert!(phi(0, &SymMat2::identity(), &z).is_err());
}

#[test]
fn rotation_moves_the_index() {
    let t = SymMat2::new(1.0, 0.5, 2.0);
    let z = point((0.1, -0.2, 0.05), (1.3, 0.2, 0.8));
    for a in [[[1, 1], [0, 1]], [[0, 1], [1, 0]], [[2, 1], [1, 1]]] {
        let g = SymplecticRep::rotation(a).unwrap();
        let moved = t.congruence_int(&a);
        let f = |w: &SiegelPoint| psi(6, &t, w, &q());
        let lhs = slash(&f, 6, &g, &z).unwrap();
        let rhs = psi(6, &moved, &z, &q()).unwrap();
        assert!(rel(lhs, rhs) < 1e-10, "{a:?}: {lhs} vs {rhs}");
        let f = |w: &SiegelPoint| phi(4, &t, w);
        let lhs = slash(&f, 4, &g, &z).unwrap();
        assert!(rel(lhs, phi(4, &moved, &z).unwrap()) < 1e-13);
    }
}

#[test]
fn integral_translations_fix_the_kernels() {
    let t = SymMat2::new(2.0, -0.5, 1.0);
    let z = point((0.3, 0.1, -0.4), (1.0, -0.2, 1.1));
    let g = SymplecticRep::translation([[1, -2], [-2, 3]]);
    let f = |w: &SiegelPoint| psi(4, &t, w, &q());
    assert!(rel(slash(&f, 4, &g, &z).unwrap(), f(&z).unwrap()) < 1e-11);
}

#[test]
fn slash_is_an_action() {
    let t = SymMat2::identity();
    let z = point((0.2, 0.1, -0.1), (1.1, 0.3, 1.4));
    let g1 = SymplecticRep::j().mul(&SymplecticRep::translation([[1, 0], [0, 0]]));
    let g2 = SymplecticRep::translation([[0, 1], [1, -1]]).mul(&SymplecticRep::j());
    let f = |w: &SiegelPoint| phi(10, &t, w);
    let inner = |w: &SiegelPoint| -> Result<Complex64> { slash(&f, 10, &g1, w) };
    let lhs = slash(&inner, 10, &g2, &z).unwrap();
    let rhs = slash(&f, 10, &g1.mul(&g2), &z).unwrap();
    assert!(rel(lhs, rhs) < 1e-11, "{lhs} vs {rhs}");
}

#[test]
fn phi_is_holomorphic() {
    let t = SymMat2::new(1.0, 0.5, 1.0);
    let z = point((0.1, 0.0, 0.2), (0.9, 0.1, 1.0));
    let f = |w: &SiegelPoint| phi(4, &t, w);
    let l = apply_lowering(&f, &z, 1e-3).unwrap();
    assert!(l.value.max_abs() < 1e-8 * f(&z).unwrap().norm());
}

#[test]
fn h_agrees_with_sampling() {
    let (t, y) = (SymMat2::new(1.0, 0.5, 1.0), SymMat2::new(0.8, -0.1, 1.2));
    let h = h_integral(4.0, 1.0, &t, &y, &q()).unwrap();
    assert!(h.converged);
    let (m, se) = h_monte_carlo(4.0, 1.0, &t, &y, 200_000, 11).unwrap();
    assert!((m - h.value).abs() < 5.0 * se, "h {} mc {m} se {se}", h.value);
}

#[test]
fn fixed_rule_ladder_converges() {
    let (t, y) = (SymMat2::identity(), SymMat2::identity());
    let mut rule = HRule::START;
    let mut last = h_integral_fixed(5.0, 1.0, &t, &y, rule).unwrap();
    for _ in 0..4 {
        rule = rule.refined();
        let v = h_integral_fixed(5.0, 1.0, &t, &y, rule).unwrap();
        assert!((v - last).abs() < 1e-6 * v.abs());
        last = v;
    }
}

fn posdef() -> impl Strategy<Value = SymMat2> {
    (0.4f64..2.5, -0.5f64..0.5, 0.4f64..2.5).prop_map(|(a, r, c)| SymMat2::new(a, r * (a * c).sqrt(), c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn h_decreases_along_positive_directions(y in posdef(), a in 2.0f64..6.0) {
        let t = SymMat2::new(1.0, 0.5, 1.0);
        let h0 = h_integral(a, 1.0, &t, &y, &q()).unwrap().value;
        let bumped = SymMat2::new(y.m11 + 0.1, y.m12, y.m22 + 0.1);
        let h1 = h_integral(a, 1.0, &t, &bumped, &q()).unwrap().value;
        prop_assert!(h1 < h0);
    }

    #[test]
    fn h_scaling_identity(t in posdef(), y in posdef(), a in 1.5f64..5.0, lam in 0.5f64..3.0) {
        let lhs = h_integral(a, 1.0, &t, &y.scale(lam), &q()).unwrap().value;
        let rhs = lam.powf(1.0 - 2.0 * a) * h_integral(a, 1.0, &t.scale(lam), &y, &q()).unwrap().value;
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs());
    }
}
