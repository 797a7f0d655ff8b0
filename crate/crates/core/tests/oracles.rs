use std::collections::BTreeMap;

use hartogs_core::bundle::{
    chern_cocycle, exp_sequence_push, flat_class_test, BundleData, FlatVerdict, Scale, TransitionKey,
};
use hartogs_core::holo::{HExpr, MatExpr};
use hartogs_core::nerve::{build_nerve, coboundary, IntCochain, Resolution, Ring};
use hartogs_core::scenarios::{dim2_cover, torus_core_cover};

fn dim2() -> (hartogs_core::nerve::Cover, hartogs_core::nerve::ResolvedNerve) {
    let cover = dim2_cover(4.0).unwrap();
    let nerve = build_nerve(&cover, 3, &Resolution::analytic(0)).unwrap();
    (cover, nerve)
}

fn signed(signs: [f64; 2]) -> BundleData {
    let (cover, nerve) = dim2();
    let pw: BTreeMap<u32, HExpr> = nerve.simplex(&[0, 1]).unwrap().components.iter()
        .map(|c| (c.label, HExpr::real(signs[c.label as usize])))
        .collect();
    let t = MatExpr::scalar(HExpr::Piecewise(pw));
    BundleData::new(cover, nerve, 1, [(TransitionKey { from: 0, to: 1 }, t)]).unwrap()
}

#[test]
fn coboundary_of_zero_cochain_on_the_slit_cover() {
    let (_, nerve) = dim2();
    let edge = nerve.simplex(&[0, 1]).unwrap();
    assert_eq!(edge.components.len(), 2);
    let a = IntCochain::from_vector(&nerve, 0, Ring::Z, &[3, 8]).unwrap();
    let d = coboundary(&nerve, &a).unwrap();
    for c in &edge.components {
        assert_eq!(d.value(&[0, 1], c.label), 5);
    }
}

#[test]
fn constant_plus_one_is_trivialized_by_plus_one() {
    match flat_class_test(&signed([1.0, 1.0])).unwrap() {
        FlatVerdict::Trivializable { signs } => assert_eq!(signs[0], signs[1]),
        v => panic!("{v:?}"),
    }
}

#[test]
fn constant_minus_one_is_trivialized_by_opposite_signs() {
    match flat_class_test(&signed([-1.0, -1.0])).unwrap() {
        FlatVerdict::Trivializable { signs } => assert_eq!(signs[0], -signs[1]),
        v => panic!("{v:?}"),
    }
}

#[test]
fn mixed_signs_are_obstructed() {
    assert!(!flat_class_test(&signed([1.0, -1.0])).unwrap().is_trivializable());
}

#[test]
fn pushing_zero_gives_the_trivial_bundle() {
    let (cover, nerve) = dim2();
    let zero = IntCochain::zero(1, Ring::Z);
    let b = exp_sequence_push(&cover, &nerve, &zero, Scale::Half).unwrap();
    assert!(chern_cocycle(&b, 1e-6).unwrap().cochain.is_zero());
    assert!(flat_class_test(&b).unwrap().is_trivializable());
}

#[test]
fn torus_cover_in_two_variables() {
    let cover = torus_core_cover(2, 1.0).unwrap();
    assert_eq!(cover.names(), ["AA", "BA", "AB", "BB"]);
    let nerve = build_nerve(&cover, 3, &Resolution::analytic(0)).unwrap();
    for s in nerve.level(1) {
        let differ = (s.vertices[0] ^ s.vertices[1]).count_ones();
        // Arcs overlap in two intervals; coordinates that agree contribute one.
        assert_eq!(s.components.len(), 1 << differ, "{:?}", s.vertices);
    }
    assert!(!nerve.level(2).is_empty());
}
