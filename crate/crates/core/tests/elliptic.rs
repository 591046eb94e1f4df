use std::collections::BTreeSet;

use proptest::prelude::*;
use siegel_maass::elliptic_poincare::*;
use siegel_maass::exact_terms::{make_phi, make_psi_tilde, multiply};
use siegel_maass::specfun::Precision;
use siegel_maass::{Complex64, Error};

#[test]
fn coset_counts() {
    assert_eq!(enumerate_sl2_cosets(1).unwrap().len(), 4);
    assert_eq!(enumerate_sl2_cosets(2).unwrap().len(), 8);
    assert!(enumerate_sl2_cosets(0).is_err());
}

#[test]
fn weight_twelve_series_is_modular() {
    let f = make_phi(12, 0, 1).unwrap();
    let prec = Precision::default();
    let tau = Complex64::new(0.2, 0.9);
    let p = eval_elliptic_poincare(&f, tau, 40, &prec).unwrap();
    let q = eval_elliptic_poincare(&f, -1.0 / tau, 40, &prec).unwrap();
    let want = tau.powi(12) * p.value;
    assert!((q.value - want).norm() <= 1e-9 * want.norm(), "{} vs {}", q.value, want);
    assert!(p.tail < 1e-9 * p.abs_sum);
}

#[test]
fn identity_coset_alone_is_the_seed() {
    let f = make_phi(8, 1, 2).unwrap();
    let tau = Complex64::new(-0.1, 1.3);
    let prec = Precision::default();
    let one = sum_over(&f, &[Sl2CosetRep::identity()], tau, &prec).unwrap();
    let seed = siegel_maass::exact_terms::evaluate(&f, tau).unwrap();
    assert!((one - seed).norm() <= 1e-15 * seed.norm());
}

#[test]
fn below_threshold_is_refused() {
    let f = make_phi(2, 0, 1).unwrap();
    let r = eval_elliptic_poincare(&f, Complex64::new(0.0, 1.0), 10, &Precision::default());
    assert!(matches!(r, Err(Error::Convergence(_))));
    assert!(eval_elliptic_poincare_unchecked(&f, Complex64::new(0.0, 1.0), 10, &Precision::default()).is_ok());
}

#[test]
fn decay_exponents_follow_the_nominal_convergence_conditions() {
    let prod = multiply(&make_phi(6, 1, 1).unwrap(), &make_phi(4, 0, 1).unwrap()).unwrap();
    assert_eq!(decay_exponent(&prod), 8.0);
    assert!(nominal_convergence_condition(SeriesKind::PhiKdPhi, 6, 4, 1));
    assert!(!nominal_convergence_condition(SeriesKind::PhiKdPhi, 2, 2, 1));
    let t = multiply(&make_psi_tilde(-2, -1).unwrap(), &make_phi(6, 0, 2).unwrap()).unwrap();
    assert!(decay_exponent(&t) > 2.0);
    assert!(nominal_convergence_condition(SeriesKind::TildePhi, -2, 6, 0));
}

#[test]
fn spectral_pairing_single_case() {
    let c = spectral_pairing_check(-2, 8, 0.75, 1, 2, &Precision::default()).unwrap();
    assert!(c.rel_err < 1e-8, "{c:?}");
}

#[test]
fn spectral_pairing_rejects_bad_parameters() {
    let p = Precision::default();
    assert!(spectral_pairing_check(2, 8, 0.75, 1, 2, &p).is_err());
    assert!(spectral_pairing_check(-2, 8, 0.75, 2, 1, &p).is_err());
    assert!(spectral_pairing_check(-2, 8, 0.25, 1, 2, &p).is_err());
}

proptest! {
    #[test]
    fn cosets_are_distinct_unimodular(h in 1i64..25) {
        let reps = enumerate_sl2_cosets(h).unwrap();
        let rows: BTreeSet<(i64, i64)> = reps.iter().map(|g| (g.c, g.d)).collect();
        prop_assert_eq!(rows.len(), reps.len());
        for g in &reps {
            prop_assert_eq!(g.det(), 1);
            prop_assert!(g.height() <= h);
            prop_assert!(g.c > 0 || (g.c, g.d) == (0, 1));
        }
    }

    #[test]
    fn action_preserves_upper_half_plane(c in 1i64..30, d in -30i64..30, x in -1.0f64..1.0, y in 0.1f64..3.0) {
        prop_assume!(num_integer::gcd(c, d) == 1);
        let g = Sl2CosetRep::complete(c, d).unwrap();
        let tau = Complex64::new(x, y);
        let im = g.act(tau).im;
        prop_assert!((im - y / g.j(tau).norm_sqr()).abs() <= 1e-12 * im);
    }
}
