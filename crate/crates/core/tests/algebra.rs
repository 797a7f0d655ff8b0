use num_bigint::BigInt;
use proptest::prelude::*;

use hartogs_core::geometry::{omega_ball, BBox, Constraint, Region, ScalarExpr};
use hartogs_core::nerve::{
    build_nerve, coboundary, coboundary_matrix, cohomology, is_coboundary, smith_normal_form, CellKey,
    CoboundaryVerdict, Cover, CoverSet, IntCochain, IntMatrix, Resolution, ResolvedNerve, Ring,
};
use hartogs_core::scenarios::{one_set_cover, torus_core_cover};
use hartogs_core::CPoint;

fn torus_nerve(n: usize, k_max: usize) -> ResolvedNerve {
    let cover = torus_core_cover(n, n as f64 / 2.0).unwrap();
    build_nerve(&cover, k_max, &Resolution::analytic(0)).unwrap()
}

#[test]
fn delta_squared_vanishes_on_torus_nerves() {
    for n in [2, 3] {
        let nerve = torus_nerve(n, n + 1);
        for k in 0..n {
            let p = coboundary_matrix(&nerve, k + 1).mul(&coboundary_matrix(&nerve, k));
            assert!(p.is_zero(), "n = {n}, k = {k}");
        }
    }
}

#[test]
fn one_set_cover_has_only_constants() {
    let omega = omega_ball(2, 1.0);
    let cover = one_set_cover("Omega", omega, vec![CPoint::from_real(&[0.0; 4]).unwrap()]).unwrap();
    let nerve = build_nerve(&cover, 3, &Resolution::analytic(0)).unwrap();
    assert_eq!(cohomology(&nerve, 0, Ring::Z, false).unwrap().rank, 1);
    for k in 1..=2 {
        let h = cohomology(&nerve, k, Ring::Z, false).unwrap();
        assert_eq!((h.rank, h.cochain_dim), (0, 0));
    }
}

#[test]
fn torus_cohomology_mod_two_matches_integral() {
    let nerve = torus_nerve(2, 3);
    let ranks: Vec<usize> = (0..3).map(|k| cohomology(&nerve, k, Ring::Z2, false).unwrap().rank).collect();
    assert_eq!(ranks, vec![1, 2, 1]);
}

#[test]
fn generators_are_cocycles_and_independent() {
    let nerve = torus_nerve(3, 4);
    let h = cohomology(&nerve, 2, Ring::Z, true).unwrap();
    let gens = h.generators.unwrap();
    assert_eq!(gens.len(), 3);
    for g in &gens {
        assert!(coboundary(&nerve, g).unwrap().is_zero());
        assert!(!is_coboundary(&nerve, g).unwrap().is_coboundary());
    }
    let sum = gens[0].add(&gens[1]).unwrap();
    assert!(!is_coboundary(&nerve, &sum).unwrap().is_coboundary());
}

#[test]
fn non_cocycle_is_rejected() {
    let nerve = torus_nerve(2, 3);
    let cell = nerve.cells(1).into_iter().next().unwrap();
    let c = IntCochain::from_values(&nerve, 1, Ring::Z, [(cell, 1)]).unwrap();
    if !coboundary(&nerve, &c).unwrap().is_zero() {
        assert!(is_coboundary(&nerve, &c).is_err());
    }
}

#[test]
fn cochain_rejects_foreign_cells() {
    let nerve = torus_nerve(2, 3);
    let bogus = CellKey::new(vec![0, 1], 17);
    assert!(IntCochain::from_values(&nerve, 1, Ring::Z, [(bogus, 1)]).is_err());
}

#[test]
fn nerve_serde_round_trip() {
    let nerve = torus_nerve(2, 3);
    let json = serde_json::to_string(&nerve).unwrap();
    let back: ResolvedNerve = serde_json::from_str(&json).unwrap();
    assert_eq!(back, nerve);
    assert_eq!(back.cell_count(2), nerve.cell_count(2));
}

#[test]
fn duplicate_set_names_collide() {
    let r = Region::new(
        Constraint::lt(ScalarExpr::NormSq, ScalarExpr::Const(1.0)),
        BBox::symmetric(1, 1.0),
    );
    let sets = vec![CoverSet::new("A", r.clone()), CoverSet::new("A", r.clone())];
    assert!(Cover::new(r, sets).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_rank_is_invariant_under_row_and_column_operations(
        rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 4), 3),
        ops in prop::collection::vec((0usize..3, 0usize..3, -3i64..=3, any::<bool>()), 0..6),
    ) {
        let m = IntMatrix::from_rows(&rows);
        let mut t = m.clone();
        for (a, b, k, on_rows) in ops {
            if a == b { continue; }
            if on_rows {
                for c in 0..t.cols {
                    let v = t.get(a, c) + BigInt::from(k) * t.get(b, c);
                    t.set(a, c, v);
                }
            } else {
                for r in 0..t.rows {
                    let v = t.get(r, a) + BigInt::from(k) * t.get(r, b);
                    t.set(r, a, v);
                }
            }
        }
        let (s1, s2) = (smith_normal_form(&m), smith_normal_form(&t));
        prop_assert_eq!(&s1.divisors, &s2.divisors);
        // U M V = D
        let (u, v) = (s1.u.clone().unwrap(), s1.v.clone().unwrap());
        prop_assert_eq!(u.mul(&m).mul(&v), s1.d_matrix());
    }

    #[test]
    fn coboundaries_are_recognised_with_a_primitive(values in prop::collection::vec(-5i64..=5, 4)) {
        let nerve = torus_nerve(2, 3);
        let b = IntCochain::from_vector(&nerve, 0, Ring::Z, &values).unwrap();
        let c = coboundary(&nerve, &b).unwrap();
        match is_coboundary(&nerve, &c).unwrap() {
            CoboundaryVerdict::Yes { primitive } => {
                prop_assert_eq!(coboundary(&nerve, &primitive).unwrap(), c);
            }
            CoboundaryVerdict::No { .. } => prop_assert!(false, "δb reported as non-coboundary"),
        }
    }
}
