//! The two-dimensional example: a line bundle on `D_r \ K` (and on `G_1 \ K_0`) that does
//! not extend.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use super::constructions::{d_r, dim2_cover};
use super::report::{missing, CertificateReport, CheckBuilder};
use crate::bundle::{
    exp_sequence_push, flat_class_test, pullback, sample_component, shift_real_parts, validate_cocycle, BundleData,
    Chart, FlatVerdict, Scale,
};
use crate::error::{Error, Result};
use crate::geometry::{rho, sample_tube, tube, CoordMap};
use crate::holo::HExpr;
use crate::nerve::{
    build_nerve, cohomology, is_coboundary, verify_obstruction, CellKey, CoboundaryVerdict, IntCochain, Resolution,
    ResolvedNerve, Ring,
};
use crate::nerve::Cover;
use crate::point::CPoint;

pub const DIM2_SCOPE: &str = "Certified: the restriction of line bundles from the domain to the complement of the \
compact set is not surjective. Claims that restriction is not injective rely on an external extension theorem and \
are out of scope.";

const DEFAULT_GRID_STEP: f64 = 0.125;

fn analytic(cfg: &ScenarioConfig) -> Resolution {
    Resolution::Analytic {
        search: 4000,
        verify: cfg.samples.min(4000),
        seed: cfg.seed,
    }
}

/// The cocycle `c`: `0` on the overlap component with `y_1 < 0`, `1` on the other.
pub fn generator_cocycle(nerve: &ResolvedNerve, values: Option<&[i64]>) -> Result<IntCochain> {
    let vals = values.unwrap_or(&[0, 1]);
    let labels = nerve
        .simplex(&[0, 1])
        .map(|s| s.labels())
        .ok_or_else(|| Error::Precondition("U1 and U2 do not meet".into()))?;
    if labels.len() != vals.len() {
        return Err(Error::Invalid(format!(
            "cocycle override has {} values but the overlap has {} components",
            vals.len(),
            labels.len()
        )));
    }
    IntCochain::from_values(
        nerve,
        1,
        Ring::Z,
        labels.into_iter().zip(vals.iter().copied()).map(|(l, v)| (CellKey::new(vec![0, 1], l), v)),
    )
}

fn edge_values(b: &BundleData) -> Result<Vec<(u32, HExpr)>> {
    let e = b
        .stored(0, 1)
        .and_then(|m| m.as_scalar())
        .ok_or_else(|| missing("transition U1 -> U2"))?;
    Ok(match e {
        HExpr::Piecewise(m) => m.iter().map(|(k, v)| (*k, v.clone())).collect(),
        other => vec![(0, other.clone())],
    })
}

fn is_sign_pair(b: &BundleData) -> Result<bool> {
    let v = edge_values(b)?;
    Ok(v == vec![(0, HExpr::real(1.0)), (1, HExpr::real(-1.0))])
}

struct Dim2State {
    cover: Option<Cover>,
    nerve: Option<ResolvedNerve>,
    c: Option<IntCochain>,
    f: Option<BundleData>,
}

pub fn run_dim2(cfg: &ScenarioConfig) -> Result<CertificateReport> {
    let mut cfg = cfg.clone();
    cfg.n = 2;
    cfg.validate()?;
    if cfg.r <= PI {
        return Err(Error::Invalid(format!(
            "r must exceed π so that exp(i·) maps D_r onto G_1, got {}",
            cfg.r
        )));
    }
    let mut rep = CertificateReport::new("dim2", &cfg, DIM2_SCOPE);
    let mut st = Dim2State {
        cover: None,
        nerve: None,
        c: None,
        f: None,
    };

    rep.push(CheckBuilder::run(
        "dim2.cover",
        "U1 and U2 cover D_r \\ K and U1 ∩ U2 has exactly 2 components, separated by the sign of y1",
        |b| {
            let cover = dim2_cover(cfg.r)?;
            let nerve = build_nerve(&cover, 3, &analytic(&cfg))?;
            nerve.check_representatives(&cover)?;
            let overlap = nerve.simplex(&[0, 1]).ok_or_else(|| Error::Precondition("U1 ∩ U2 is empty".into()))?;
            b.metric("overlap_components", overlap.components.len());
            b.require("two_components", overlap.components.len() == 2);
            let signs_ok = overlap
                .components
                .iter()
                .all(|c| (c.representative.y(0) > 0.0) == (c.label == 1));
            b.require("labels_follow_sign_of_y1", signs_ok);
            for c in &overlap.components {
                b.location(serde_json::json!({"component": c.label, "representative": c.representative}));
            }
            let uncovered = cover.find_uncovered(cfg.samples, cfg.seed)?;
            b.require("covers_complement", uncovered.is_none());
            let escaping = cover.find_escaping(cfg.samples, cfg.seed)?;
            b.require("sets_inside_complement", escaping.is_none());

            let step = cfg.step.unwrap_or(DEFAULT_GRID_STEP);
            let grid = build_nerve(
                &cover,
                2,
                &Resolution::Grid {
                    step,
                    budget: cfg.budget_nodes,
                },
            )?;
            let agree = grid.level(1).iter().map(|s| s.components.len()).collect::<Vec<_>>()
                == nerve.level(1).iter().map(|s| s.components.len()).collect::<Vec<_>>();
            b.metric("grid_step", step);
            b.require("grid_agrees_with_labeler", agree);
            st.cover = Some(cover);
            st.nerve = Some(nerve);
            Ok(())
        },
    ));
    if let Some(n) = &st.nerve {
        rep.artifact("dim2.nerve", n);
    }

    rep.push(CheckBuilder::run(
        "dim2.cohomology",
        "H^1(D_r \\ K; Z) = Z and c = (0, 1) is a non-coboundary generating it",
        |b| {
            let nerve = st.nerve.as_ref().ok_or_else(|| missing("nerve"))?;
            let h0 = cohomology(nerve, 0, Ring::Z, false)?;
            let h1 = cohomology(nerve, 1, Ring::Z, true)?;
            b.metric("h0_rank", h0.rank);
            b.metric("h1_rank", h1.rank);
            b.metric("h1_torsion", &h1.torsion);
            b.require("h1_is_z", h1.rank == 1 && h1.torsion.is_empty());
            let c = generator_cocycle(nerve, cfg.debug.cocycle.as_deref())?;
            b.metric("c", c.to_vector(nerve));
            match is_coboundary(nerve, &c)? {
                CoboundaryVerdict::No { certificate } => {
                    b.require("certificate_verified", verify_obstruction(nerve, &c, &certificate)?);
                    b.metric("certificate", &certificate);
                    b.require("non_coboundary", true);
                }
                CoboundaryVerdict::Yes { primitive } => {
                    b.metric("primitive", primitive.to_vector(nerve));
                    b.require("non_coboundary", false);
                }
            }
            let g = h1
                .generators
                .as_ref()
                .and_then(|g| g.first())
                .ok_or_else(|| missing("H^1 generator"))?;
            let generates = is_coboundary(nerve, &c.add(&g.neg())?)?.is_coboundary()
                || is_coboundary(nerve, &c.add(g)?)?.is_coboundary();
            b.require("generates_h1", generates);
            st.c = Some(c);
            Ok(())
        },
    ));

    rep.push(CheckBuilder::run(
        "dim2.bundle",
        "exp(πi c) gives transitions f12 = (1, -1), a non-trivial holomorphic line bundle; exp(2πi c) is trivial",
        |b| {
            let cover = st.cover.as_ref().ok_or_else(|| missing("cover"))?;
            let nerve = st.nerve.as_ref().ok_or_else(|| missing("nerve"))?;
            let c = st.c.as_ref().ok_or_else(|| missing("cocycle c"))?;
            let scale = cfg.debug.scale.unwrap_or(Scale::Half);
            let f = exp_sequence_push(cover, nerve, c, scale)?;
            b.metric("scale", scale);
            b.metric("f12", edge_values(&f)?);
            b.require("f12_is_one_minus_one", is_sign_pair(&f)?);
            let v = validate_cocycle(&f, 16, cfg.tol_cocycle, cfg.seed)?;
            b.metric("inverse_residual", v.inverse_residual);
            b.require("cocycle_valid", v.passed);
            match flat_class_test(&f)? {
                FlatVerdict::Obstructed { certificate } => {
                    b.metric("flat_certificate", certificate);
                    b.require("obstructed", true);
                }
                FlatVerdict::Trivializable { signs } => {
                    b.metric("signs", signs);
                    b.require("obstructed", false);
                }
            }
            let full = exp_sequence_push(cover, nerve, c, Scale::Full)?;
            b.require("full_scale_trivializable", flat_class_test(&full)?.is_trivializable());
            st.f = Some(f);
            Ok(())
        },
    ));
    if let Some(f) = &st.f {
        rep.artifact("dim2.bundle", f);
    }

    rep.push(CheckBuilder::run(
        "dim2.periodicity",
        "f12 is invariant under shifting x1, x2 by integer multiples of 2π (sampled)",
        |b| {
            let f = st.f.as_ref().ok_or_else(|| missing("bundle f"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5045_5249);
            let per = (cfg.samples / 8).max(4);
            let mut compared = 0usize;
            let mut mismatches = 0usize;
            for s in f.nerve.level(1) {
                for comp in &s.components {
                    let pts = sample_component(&f.cover, &f.nerve, &s.vertices, comp.label, per, &mut rng)?;
                    for z in &pts {
                        let base = f.eval_transition(0, 1, z)?;
                        for k1 in -2i32..=2 {
                            for k2 in -2i32..=2 {
                                if k1 == 0 && k2 == 0 {
                                    continue;
                                }
                                let w = shift_real_parts(z, &[2.0 * PI * k1 as f64, 2.0 * PI * k2 as f64]);
                                if !f.cover.intersection(&s.vertices)?.contains(&w)? {
                                    continue;
                                }
                                compared += 1;
                                if f.eval_transition(0, 1, &w)? != base {
                                    mismatches += 1;
                                    if mismatches <= 3 {
                                        b.location(&w);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            b.metric("compared", compared);
            b.metric("mismatches", mismatches);
            b.require("shifts_compared", compared > 0);
            b.require("periodic", mismatches == 0);
            Ok(())
        },
    ));

    let mut w_bundle: Option<BundleData> = None;
    rep.push(CheckBuilder::run(
        "dim2.transport",
        "Under w = exp(iz) the bundle becomes one on G_1 \\ K_0 with covers φ(U1), φ(U2) and transitions (1, -1); \
pulling back once more recovers the bundle on D_1 \\ K",
        |b| {
            let f = st.f.as_ref().ok_or_else(|| missing("bundle f"))?;
            let g1 = tube(2, 1.0);
            let w = pullback(f, &Chart::log_over_i(g1.clone(), cfg.samples, cfg.seed), &analytic(&cfg))?;
            let comps = w.nerve.simplex(&[0, 1]).map(|s| s.components.len()).unwrap_or(0);
            b.metric("image_overlap_components", comps);
            b.require("image_two_components", comps == 2);
            b.require("image_transitions_equal", edge_values(&w)? == edge_values(f)?);
            b.metric("image_f12", edge_values(&w)?);
            let v = validate_cocycle(&w, 16, cfg.tol_cocycle, cfg.seed)?;
            b.require("image_cocycle_valid", v.passed);
            b.require("image_obstructed", !flat_class_test(&w)?.is_trivializable());
            let h1 = cohomology(&w.nerve, 1, Ring::Z, false)?;
            b.require("image_h1_is_z", h1.rank == 1 && h1.torsion.is_empty());

            // φ maps D_r onto G_1 when r > π.
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x494d_4147);
            let dr = d_r(cfg.r);
            let mut image_misses = 0usize;
            let mut checked = 0usize;
            for _ in 0..cfg.samples {
                let wpt = sample_tube(&mut rng, 2, 1.0);
                let z = CoordMap::LogOverI.apply(&wpt)?;
                checked += 1;
                if !dr.contains(&z)? {
                    image_misses += 1;
                }
                if let Some(z) = dr.sample(&mut rng, 1000)? {
                    checked += 1;
                    if !g1.contains(&CoordMap::ExpI.apply(&z)?)? {
                        image_misses += 1;
                    }
                }
            }
            b.metric("image_points", checked);
            b.require("image_is_g1", image_misses == 0);

            let back = pullback(&w, &Chart::exp_i(d_r(1.0), cfg.samples, cfg.seed), &analytic(&cfg))?;
            let comps = back.nerve.simplex(&[0, 1]).map(|s| s.components.len()).unwrap_or(0);
            b.require("round_trip_two_components", comps == 2);
            b.require("round_trip_transitions_equal", edge_values(&back)? == edge_values(f)?);
            b.require("round_trip_obstructed", !flat_class_test(&back)?.is_trivializable());
            w_bundle = Some(w);
            Ok(())
        },
    ));
    if let Some(w) = &w_bundle {
        rep.artifact("dim2.image_bundle", w);
    }

    rep.push(CheckBuilder::run(
        "dim2.torus",
        "φ(K ∩ D_r) = {|w1| = |w2| = 1} = ρ^{-1}(0) = K_0, compactly contained in G_1",
        |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x544f_5255);
            let g1 = tube(2, 1.0);
            let mut max_rho: f64 = 0.0;
            let mut outside = 0usize;
            for _ in 0..cfg.samples {
                let z = CPoint::new(vec![
                    Complex64::new(rng.gen_range(-cfg.r..cfg.r), 0.0),
                    Complex64::new(rng.gen_range(-cfg.r..cfg.r), 0.0),
                ])?;
                let w = CoordMap::ExpI.apply(&z)?;
                max_rho = max_rho.max(rho(&w)?);
                if !g1.contains(&w)? {
                    outside += 1;
                }
            }
            b.metric("max_rho_on_image", max_rho);
            b.metric("points", cfg.samples);
            b.require("image_on_torus", max_rho <= 1e-24);
            b.require("torus_inside_g1", outside == 0);
            // ρ ≤ 1e-24 on K_0 while ∂G_1 = {ρ = 1}: positive distance.
            b.require("compactly_contained", max_rho < 1.0);
            Ok(())
        },
    ));

    rep.push(CheckBuilder::trusted(
        "dim2.exact_sequence",
        "0 → Z → O → O* → 0 is exact on D_r \\ K, so exp(πi c) defines a line bundle whose class is the image of c",
        "standard sheaf theory; not recomputed",
    ));
    rep.push(CheckBuilder::trusted(
        "dim2.extension_bijective",
        "restriction H^0(D_r, O*) → H^0(D_r \\ K, O*) is bijective: invertible holomorphic functions extend across \
the totally real plane K, which makes the long exact sequences of D_r and D_r \\ K comparable",
        "extension of holomorphic functions across a totally real plane; not recomputed",
    ));
    rep.push(CheckBuilder::trusted(
        "dim2.trivial_on_domain",
        "every holomorphic line bundle on the convex domain D_r is trivial",
        "Oka–Grauert principle on a contractible Stein domain; not recomputed",
    ));
    Ok(rep)
}
