use std::collections::BTreeMap;

use proptest::prelude::*;
use siegel_maass::gk_support::*;
use siegel_maass::oracle::tensor_by_characters;

fn kt(a: i64, b: i64) -> KType {
    KType::new(a, b).unwrap()
}

#[test]
fn phi_with_depth_starts_below_its_weight() {
    let s = canonical_sl2_support(Sl2Kind::PhiKd, 10, 2).unwrap();
    assert_eq!(s.min_weight(), Some(6));
    assert_eq!(s.max_weight(), None);
    assert_eq!(s.solid_wall, Some(SolidWall { position: 6, direction: Side::Right }));
    assert!(!s.contains(4) && s.contains(6) && s.contains(100));
}

#[test]
fn psi_tilde_is_bounded_above() {
    let s = canonical_sl2_support(Sl2Kind::PsiTilde, -2, 0).unwrap();
    assert_eq!(s.max_weight(), Some(2));
    assert_eq!(s.min_weight(), None);
    assert_eq!(s.dashed_wall, Some(4));
    assert!(!s.has_lowest_weight());
}

#[test]
fn opposite_half_lines_fill_the_lattice() {
    let a = canonical_sl2_support(Sl2Kind::PsiTilde, -2, 0).unwrap();
    let b = canonical_sl2_support(Sl2Kind::PhiKd, 10, 0).unwrap();
    let t = tensor_sl2(&a, &b);
    assert_eq!(t.intervals(), &[WeightInterval { lo: None, hi: None }]);
    assert!(t.solid_wall.is_none());
    assert!(!t.has_lowest_weight());
}

#[test]
fn same_direction_walls_add() {
    let a = canonical_sl2_support(Sl2Kind::PhiKd, 4, 0).unwrap();
    let b = canonical_sl2_support(Sl2Kind::PhiKd, 6, 1).unwrap();
    let t = tensor_sl2(&a, &b);
    assert_eq!(t.min_weight(), Some(8));
    assert_eq!(t.solid_wall.map(|w| w.position), Some(8));
}

#[test]
fn singleton_is_a_unit() {
    let s = canonical_sl2_support(Sl2Kind::PhiTilde, -4, 0).unwrap();
    let t = tensor_sl2(&Sl2Support::singleton(0).unwrap(), &s);
    assert_eq!(t.intervals(), s.intervals());
    assert!(tensor_sl2(&Sl2Support::empty(), &s).is_empty());
}

#[test]
fn canonical_supports_reject_bad_parameters() {
    assert!(canonical_sl2_support(Sl2Kind::PhiKd, 3, 0).is_err());
    assert!(canonical_sl2_support(Sl2Kind::PhiTilde, 2, 0).is_err());
    assert!(canonical_sl2_support(Sl2Kind::Psi, -2, 0).is_err());
    assert!(canonical_sl2_support(Sl2Kind::Custom, 2, 0).is_err());
    assert!(KType::new(1, 2).is_err());
}

#[test]
fn clebsch_gordan_example() {
    assert_eq!(clebsch_gordan(kt(3, 1), kt(2, 0)), vec![kt(5, 1), kt(4, 2), kt(3, 3)]);
}

#[test]
fn right_and_up_walls_combine() {
    let s1 = KTypeSupport::from_types([kt(5, 0), kt(6, 1)], vec![Wall::new(WallDirection::Right, 5)]).unwrap();
    let s2 = KTypeSupport::from_types([kt(2, 2), kt(4, 2)], vec![Wall::new(WallDirection::Up, 2)]).unwrap();
    let t = tensor_ktype_support(&s1, &s2);
    assert!(t.walls().contains(&Wall::new(WallDirection::Right, 7)));
    assert!(t.occupied().keys().all(|x| x.a >= 7));
}

#[test]
fn wall_violation_is_rejected() {
    let r = KTypeSupport::from_types([kt(3, 0)], vec![Wall::new(WallDirection::Right, 4)]);
    assert!(r.is_err());
}

#[test]
fn holomorphic_square_contains_scalar() {
    let s = holomorphic_ktype_support(4, 2).unwrap();
    let t = tensor_ktype_support(&s, &s);
    assert!(contains_scalar_ktype(&t));
    assert_eq!(t.multiplicity(kt(8, 8)), 1);
    assert_eq!(t.multiplicity(kt(10, 10)), 1);
    assert!(t.walls().contains(&Wall::new(WallDirection::Up, 8)));
    let v = KTypeSupport::from_types([kt(6, 4)], vec![]).unwrap();
    assert!(!contains_scalar_ktype(&tensor_ktype_support(&v, &KTypeSupport::from_types([kt(3, 0)], vec![]).unwrap())));
}

proptest! {
    #[test]
    fn clebsch_gordan_matches_characters(a1 in -4i64..6, s1 in 0i64..6, a2 in -4i64..6, s2 in 0i64..6) {
        let (t1, t2) = (kt(a1 + s1, a1), kt(a2 + s2, a2));
        let cg = clebsch_gordan(t1, t2);
        let dims: i64 = cg.iter().map(KType::dim).sum();
        prop_assert_eq!(dims, t1.dim() * t2.dim());
        let mut ours: BTreeMap<KType, i64> = BTreeMap::new();
        for t in cg {
            *ours.entry(t).or_default() += 1;
        }
        prop_assert_eq!(ours, tensor_by_characters(t1, t2));
    }

    #[test]
    fn tensor_is_commutative(k1 in -6i64..8, k2 in -6i64..8, d in 0i64..3) {
        let (k1, k2) = (2 * (k1 / 2), 2 * (k2 / 2));
        let a = canonical_sl2_support(Sl2Kind::PhiKd, k1, d).unwrap();
        let b = if k2 < 0 {
            canonical_sl2_support(Sl2Kind::PhiTilde, k2, 0).unwrap()
        } else {
            canonical_sl2_support(Sl2Kind::Psi, k2, 0).unwrap()
        };
        let (x, y) = (tensor_sl2(&a, &b), tensor_sl2(&b, &a));
        prop_assert_eq!(x.intervals(), y.intervals());
        for w in (-40..=40).step_by(2) {
            let sum = a.occupied_in(-200, 200).iter().any(|u| b.contains(w - u));
            prop_assert_eq!(x.contains(w), sum, "weight {}", w);
        }
    }
}
