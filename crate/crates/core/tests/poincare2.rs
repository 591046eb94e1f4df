use siegel_maass::poincare2::*;
use siegel_maass::siegel_kernel::*;
use siegel_maass::sp2_cosets::{enumerate_delta_cosets, SymplecticRep};
use siegel_maass::{Complex64, Error, Result};

fn params(height: i64) -> P2Params {
    P2Params::new(4, 12, SymMat2::identity(), SymMat2::new(1.0, 0.5, 1.0), height)
}

fn z0() -> SiegelPoint {
    SiegelPoint::new(SymMat2::new(0.1, 0.05, -0.1), SymMat2::diag(1.2, 1.6)).unwrap()
}

fn seed(p: &P2Params, w: &SiegelPoint) -> Result<Complex64> {
    Ok(psi(p.k, &p.t, w, &QuadratureSpec::default())? * phi(p.l, &p.t_prime, w)?)
}

#[test]
fn strata_add_up_and_majorant_dominates() {
    let p = params(1);
    let v = eval_p2(&p, &z0()).unwrap();
    assert_eq!(v.cosets, 1440);
    assert!((v.total - (v.c_zero + v.c_nonzero)).norm() <= 1e-15 * v.total.norm());
    assert_eq!(v.tail.majorant_violations, 0);
    assert!(v.tail.shell_majorant >= v.tail.shell_abs_sum);
    assert!(v.quadrature_error <= 1e-8 * v.total.norm());
}

#[test]
fn identity_coset_is_the_seed() {
    let p = params(1);
    let z = z0();
    let v = eval_p2_with(&p, &z, &[SymplecticRep::identity()]).unwrap();
    let want = seed(&p, &z).unwrap();
    assert!((v.total - want).norm() <= 1e-9 * want.norm(), "{} vs {want}", v.total);
}

#[test]
fn single_coset_matches_the_slash() {
    let p = params(1);
    let z = z0();
    let g = SymplecticRep::j().mul(&SymplecticRep::translation([[1, 0], [0, -1]]));
    let f = |w: &SiegelPoint| seed(&p, w);
    let want = slash(&f, p.k + p.l, &g, &z).unwrap();
    let v = eval_p2_with(&p, &z, &[g]).unwrap();
    assert!((v.total - want).norm() <= 1e-9 * want.norm(), "{} vs {want}", v.total);
    // a left translate of the same coset contributes the same term
    let moved = SymplecticRep::translation([[2, 1], [1, 0]]).mul(&g);
    let w = eval_p2_with(&p, &z, &[moved]).unwrap();
    assert!((w.total - v.total).norm() <= 1e-9 * v.total.norm());
}

#[test]
fn shared_levels_match_separate_runs() {
    let p = params(1);
    let z = z0();
    let reps = enumerate_delta_cosets(1).unwrap();
    let both = eval_p2_levels(&p, &[12, 14], &z, &reps).unwrap();
    let alone = eval_p2_with(&P2Params { l: 14, ..p }, &z, &reps).unwrap();
    assert!((both[1].total - alone.total).norm() <= 1e-9 * alone.total.norm());
}

#[test]
fn closed_form_lowering_matches_differences() {
    let p = params(1);
    let z = z0();
    let g = SymplecticRep::j().mul(&SymplecticRep::translation([[0, 1], [1, 0]]));
    let ev = PsiEvaluator::at(p.k, p.t, &z.act(&g).unwrap(), &QuadratureSpec::default()).unwrap();
    let f = |w: &SiegelPoint| -> Result<Complex64> {
        let inner = |u: &SiegelPoint| Ok(ev.eval(u)? * phi(p.l, &p.t_prime, u)?);
        slash(&inner, p.k + p.l, &g, w)
    };
    for d in 1..=2 {
        let exact = slashed_seed_lowering(&p, &g, &z, d).unwrap();
        let fd = fd_lowering_tensor(&f, &z, d, 1e-3).unwrap();
        let scale = exact.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let err = exact.iter().zip(&fd).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-4 * scale, "d = {d}: {err:e} vs {scale:e}");
    }
}

#[test]
fn parameters_are_validated() {
    let z = z0();
    let bad = [
        P2Params { k: 3, ..params(1) },
        P2Params { l: 0, ..params(1) },
        P2Params { t: SymMat2::new(1.0, 0.3, 1.0), ..params(1) },
        P2Params { height: 0, ..params(1) },
    ];
    for p in bad {
        assert!(matches!(eval_p2(&p, &z), Err(Error::Domain(_))), "{p:?}");
    }
}

#[test]
fn kst_search_certifies_height_two() {
    let grid: Vec<f64> = (1..=20).map(|i| 1.0 + 0.05 * i as f64).collect();
    let c = kst_y0_search(2, &grid).unwrap();
    assert!(c.margin > 0.0);
    assert_eq!(c.y0, 1.05);
    assert_eq!(c.scan.last().map(|s| s.0), Some(c.y0));
    assert!(c.scan[..c.scan.len() - 1].iter().all(|s| s.1 <= 1.0));
    assert!(kst_y0_search(2, &[0.5]).is_err());
    // the tightest representatives have |det(C iyI + D)| = y
    let c = kst_y0_search(2, &[1.0001]).unwrap();
    assert!((c.margin - 1e-4).abs() < 1e-12);
}
