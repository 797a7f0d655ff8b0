use hartogs_core::bundle::{
    chern_cocycle, exp_sequence_push, Scale, flat_class_test, glue, pullback, restrict, restrict_to_sets, tensor, validate_cocycle,
    BundleData, BundleIso, Chart, GlueOptions,
};
use hartogs_core::geometry::tube;
use hartogs_core::holo::{HExpr, MatExpr};
use hartogs_core::nerve::{build_nerve, coboundary, is_coboundary, Resolution};
use hartogs_core::scenarios::{
    d_r, dim2_cover, generator_cocycle, l_nt, omega_prime, one_set_cover, torus_core_cover,
};
use hartogs_core::{CPoint, Error};

fn l_nt2() -> BundleData {
    let cover = torus_core_cover(2, 1.0).unwrap();
    let nerve = build_nerve(&cover, 3, &Resolution::analytic(0)).unwrap();
    l_nt(&cover, &nerve).unwrap()
}

#[test]
fn clutching_bundle_is_a_cocycle() {
    let b = l_nt2();
    let v = validate_cocycle(&b, 8, 1e-9, 3).unwrap();
    assert!(v.passed, "{v:?}");
    assert!(v.triple_points > 0 && v.edge_points > 0);
}

#[test]
fn reverse_transitions_invert_forward_ones() {
    let b = l_nt2();
    for s in b.nerve.level(1) {
        let (i, j) = (s.vertices[0], s.vertices[1]);
        for c in &s.components {
            let z = &c.representative;
            let prod = b.eval_transition(j, i, z).unwrap() * b.eval_transition(i, j, z).unwrap();
            assert!((prod[(0, 0)] - 1.0).norm() < 1e-12);
        }
    }
}

#[test]
fn chern_class_is_additive_under_tensor_product() {
    let b = l_nt2();
    let c1 = chern_cocycle(&b, 1e-6).unwrap().cochain;
    let c2 = chern_cocycle(&tensor(&b, &b).unwrap(), 1e-6).unwrap().cochain;
    let diff = c2.add(&c1.neg()).unwrap().add(&c1.neg()).unwrap();
    assert!(coboundary(&b.nerve, &c1).unwrap().is_zero());
    assert!(is_coboundary(&b.nerve, &diff).unwrap().is_coboundary());
    assert!(!is_coboundary(&b.nerve, &c2).unwrap().is_coboundary());
}

#[test]
fn trivial_bundle_has_zero_chern_class() {
    let b = l_nt2();
    let t = BundleData::trivial(b.cover.clone(), b.nerve.clone(), 1).unwrap();
    let c = chern_cocycle(&t, 1e-6).unwrap().cochain;
    assert!(c.is_zero());
    assert!(flat_class_test(&t).unwrap().is_trivializable());
}

#[test]
fn missing_transitions_are_rejected() {
    let b = l_nt2();
    let mut t: Vec<_> = b.transitions().iter().map(|(k, m)| (*k, m.clone())).collect();
    t.pop();
    assert!(BundleData::new(b.cover.clone(), b.nerve.clone(), 1, t).is_err());
}

#[test]
fn broken_cocycle_is_detected() {
    let b = l_nt2();
    let mut t: Vec<_> = b.transitions().iter().map(|(k, m)| (*k, m.clone())).collect();
    // Scale one coordinate-free frame change so some triple fails.
    let idx = t.iter().position(|(_, m)| !m.is_piecewise()).unwrap();
    t[idx].1 = MatExpr::scalar(HExpr::real(2.0));
    let broken = BundleData::new(b.cover.clone(), b.nerve.clone(), 1, t).unwrap();
    let v = validate_cocycle(&broken, 4, 1e-9, 0).unwrap();
    assert!(!v.passed);
    assert!(v.worst.is_some());
}

#[test]
fn glue_requires_frame_changes_on_every_overlap() {
    let lnt = l_nt2();
    let op = omega_prime(2, 1.0, 0.5).unwrap();
    let seeds = op.tag.seeds.clone();
    let oc = one_set_cover(&op.name, op.region.clone(), seeds).unwrap();
    let on = build_nerve(&oc, 3, &Resolution::analytic(0)).unwrap();
    let trivial = BundleData::trivial(oc, on, 1).unwrap();
    let err = glue(&lnt, &trivial, &BundleIso::default(), &GlueOptions::default()).unwrap_err();
    assert!(matches!(err, Error::IsoValidation(_)), "{err}");

    let (glued, report) = glue(&lnt, &trivial, &BundleIso::identity([(0, 0)], 1), &GlueOptions::default()).unwrap();
    assert!(report.cocycle.passed);
    assert_eq!(restrict_to_sets(&glued, &[0, 1, 2, 3]).unwrap().transition_table(), lnt.transition_table());
}

#[test]
fn rank_mismatch_is_an_error() {
    let lnt = l_nt2();
    let two = BundleData::trivial(lnt.cover.clone(), lnt.nerve.clone(), 2).unwrap();
    assert!(matches!(
        glue(&lnt, &two, &BundleIso::default(), &GlueOptions::default()),
        Err(Error::RankMismatch { .. })
    ));
}

#[test]
fn restriction_to_a_disjoint_region_is_empty() {
    let lnt = l_nt2();
    let far = hartogs_core::geometry::Region::ball(&CPoint::from_real(&[50.0, 0.0, 50.0, 0.0]).unwrap(), 1.0);
    assert!(matches!(restrict(&lnt, &far, &Resolution::analytic(0)), Err(Error::EmptyRestriction)));
}

#[test]
fn restriction_to_a_subregion_keeps_transitions() {
    let lnt = l_nt2();
    let sub = hartogs_core::geometry::Region::intersection(&[
        &tube(2, 0.5),
        &hartogs_core::geometry::Region::ball(&CPoint::from_real(&[1.0, 0.0, 1.0, 0.0]).unwrap(), 0.9),
    ])
    .unwrap();
    let r = restrict(&lnt, &sub, &Resolution::analytic(0)).unwrap();
    assert!(!r.cover.is_empty());
    assert!(validate_cocycle(&r, 4, 1e-9, 0).unwrap().passed);
}

#[test]
fn transport_to_the_tube_and_back() {
    let cover = dim2_cover(4.0).unwrap();
    let nerve = build_nerve(&cover, 3, &Resolution::analytic(0)).unwrap();
    let c = generator_cocycle(&nerve, None).unwrap();
    let f = exp_sequence_push(&cover, &nerve, &c, Scale::Half).unwrap();
    let w = pullback(&f, &Chart::log_over_i(tube(2, 1.0), 200, 0), &Resolution::analytic(0)).unwrap();
    assert_eq!(w.nerve.simplex(&[0, 1]).unwrap().components.len(), 2);
    assert_eq!(w.stored(0, 1), f.stored(0, 1));
    let back = pullback(&w, &Chart::exp_i(d_r(1.0), 200, 0), &Resolution::analytic(0)).unwrap();
    assert_eq!(back.stored(0, 1), f.stored(0, 1));
    assert!(!flat_class_test(&back).unwrap().is_trivializable());
}

#[test]
fn chart_rejects_non_injective_domains() {
    // exp(i·) is 2π-periodic in x, so it is not inverted on D_4.
    let chart = Chart::exp_i(d_r(4.0), 500, 0);
    assert!(matches!(chart.check(), Err(Error::ChartViolation(_))));
}

#[test]
fn bundle_serde_round_trip() {
    let b = l_nt2();
    let json = serde_json::to_string(&b).unwrap();
    let back: BundleData = serde_json::from_str(&json).unwrap();
    assert_eq!(back.transition_table(), b.transition_table());
    assert_eq!(back.nerve, b.nerve);
}
