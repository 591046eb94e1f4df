use std::collections::BTreeSet;

use proptest::prelude::*;
use siegel_maass::sp2_cosets::*;

#[test]
fn coset_counts_and_strata() {
    let h1 = enumerate_delta_cosets(1).unwrap();
    let h2 = enumerate_delta_cosets(2).unwrap();
    assert_eq!(h1.len(), 1440);
    assert_eq!(h2.len(), 23072);
    assert_eq!(h1.iter().filter(|g| g.c_is_zero()).count(), gl2_elements(1).len());
    assert!(enumerate_delta_cosets(0).is_err());
}

#[test]
fn enumeration_is_monotone_in_height() {
    let h1: BTreeSet<_> = enumerate_delta_cosets(1).unwrap().iter().map(|g| (g.c, g.d)).collect();
    let h2: BTreeSet<_> = enumerate_delta_cosets(2).unwrap().iter().map(|g| (g.c, g.d)).collect();
    assert!(h1.is_subset(&h2));
}

#[test]
fn every_representative_is_symplectic_and_bounded() {
    for g in enumerate_delta_cosets(2).unwrap() {
        assert!(g.is_symplectic());
        assert!(g.height() <= 2);
        assert_eq!(canonicalize(&g), g);
    }
}

#[test]
fn translations_are_equivalent_to_identity() {
    let t = SymplecticRep::translation([[3, -1], [-1, 2]]);
    assert!(delta_equivalent(&t, &SymplecticRep::identity()));
    assert!(!delta_equivalent(&SymplecticRep::j(), &SymplecticRep::identity()));
}

fn small() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::array::uniform2(prop::array::uniform2(-3i64..=3))
}

proptest! {
    #![proptest_config(ProptestConfig { max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn completion_of_coprime_pairs(c in small(), d in small()) {
        prop_assume!(is_coprime_symmetric_pair(&c, &d));
        let g = complete_pair(&c, &d).unwrap();
        prop_assert!(g.is_symplectic());
        prop_assert_eq!((g.c, g.d), (c, d));
        prop_assert!(g.mul(&g.inverse()) == SymplecticRep::identity());
    }

    #[test]
    fn canonical_form_is_a_class_invariant(c in small(), d in small(), s in -4i64..4, u in -4i64..4, v in -4i64..4) {
        prop_assume!(is_coprime_symmetric_pair(&c, &d));
        let g = complete_pair(&c, &d).unwrap();
        let moved = SymplecticRep::translation([[s, u], [u, v]]).mul(&g);
        prop_assert!(delta_equivalent(&g, &moved));
        prop_assert_eq!(canonicalize(&moved), canonicalize(&g));
    }
}
