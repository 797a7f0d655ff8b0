//! Acceptance criteria 1–11. Each criterion prints one `PASS`/`FAIL` line; the process
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hartogs_core::bundle::{
    exp_sequence_push, flat_class_test, glue, restrict_to_sets, validate_cocycle, BundleData, BundleIso,
    GlueOptions, Scale, TransitionKey,
};
use hartogs_core::geometry::{
    boundary_point, check_segment, contraction_residual, grid_components, hessian_fd_residual, levi_form,
    levi_lower_bound, real_hessian, sample_tube, sample_tube_boundary, segment_convexity, tube,
    Constraint, ConvexityVerdict, Region, ScalarExpr,
};
use hartogs_core::holo::{HExpr, MatExpr};
use hartogs_core::nerve::{
    build_nerve, cohomology, is_coboundary, verify_obstruction, CoboundaryVerdict, Cover, CoverSet, Resolution, Ring,
};
use hartogs_core::scenarios::{
    cohomology_torus, control_region, dim2_cover, generator_cocycle, hessian_scan, plan_connectivity, run_dim2,
    run_dimn, scan_region, up_ball, ScenarioConfig,
};
use hartogs_core::CPoint;

type Outcome = Result<(), String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Outcome {
    ensure(start.elapsed() < limit, format!("took {:?}, limit {:?}", start.elapsed(), limit))
}

fn torus_ranks() -> Outcome {
    let start = Instant::now();
    for (n, expected) in [(2usize, vec![1, 2, 1]), (3, vec![1, 3, 3, 1])] {
        let t = cohomology_torus(n, n as f64 / 2.0, n + 1, 0).map_err(|e| e.to_string())?;
        let ranks: Vec<usize> = t.rows.iter().map(|r| r.rank).collect();
        ensure(ranks == expected, format!("n = {n}: ranks {ranks:?}"))?;
        ensure(t.rows.iter().all(|r| r.torsion.is_empty()), format!("n = {n}: torsion"))?;
    }
    within(start, Duration::from_secs(60))
}

fn dim2_generator() -> Outcome {
    let start = Instant::now();
    let cover = dim2_cover(4.0).map_err(|e| e.to_string())?;
    let nerve = build_nerve(&cover, 3, &Resolution::analytic(0)).map_err(|e| e.to_string())?;
    let h1 = cohomology(&nerve, 1, Ring::Z, false).map_err(|e| e.to_string())?;
    ensure(h1.rank == 1 && h1.torsion.is_empty(), format!("H^1 rank {}", h1.rank))?;
    let c = generator_cocycle(&nerve, None).map_err(|e| e.to_string())?;
    match is_coboundary(&nerve, &c).map_err(|e| e.to_string())? {
        CoboundaryVerdict::No { certificate } => {
            ensure(verify_obstruction(&nerve, &c, &certificate).unwrap_or(false), "certificate rejected")?
        }
        CoboundaryVerdict::Yes { .. } => return Err("c = (0, 1) reported as a coboundary".into()),
    }
    within(start, Duration::from_secs(5))
}

fn dim2_obstruction() -> Outcome {
    let start = Instant::now();
    let cover = dim2_cover(4.0).map_err(|e| e.to_string())?;
    let nerve = build_nerve(&cover, 3, &Resolution::analytic(0)).map_err(|e| e.to_string())?;
    let c = generator_cocycle(&nerve, None).map_err(|e| e.to_string())?;
    let f = exp_sequence_push(&cover, &nerve, &c, Scale::Half).map_err(|e| e.to_string())?;
    let expected = HExpr::Piecewise(BTreeMap::from([(0, HExpr::real(1.0)), (1, HExpr::real(-1.0))]));
    ensure(f.stored(0, 1).and_then(|m| m.as_scalar()) == Some(&expected), "f12 is not (1, -1)")?;
    ensure(!flat_class_test(&f).map_err(|e| e.to_string())?.is_trivializable(), "half push trivializable")?;
    let full = exp_sequence_push(&cover, &nerve, &c, Scale::Full).map_err(|e| e.to_string())?;
    ensure(flat_class_test(&full).map_err(|e| e.to_string())?.is_trivializable(), "full push obstructed")?;
    within(start, Duration::from_secs(5))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> CPoint {
    let coords = (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(0.5..3.0), rng.gen_range(-PI..PI)))
        .collect();
    CPoint::new(coords).unwrap()
}

fn hessian_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for n in [2usize, 3] {
        for _ in 0..100 {
            let z = random_point(&mut rng, n);
            worst = worst.max(hessian_fd_residual(&z, 1e-4).map_err(|e| e.to_string())?);
        }
    }
    ensure(worst <= 1e-5, format!("max fd error {worst:e}"))?;
    within(start, Duration::from_secs(10))
}

fn pd_window() -> Outcome {
    let start = Instant::now();
    let scan = hessian_scan(1000, 0.5, 3.0).map_err(|e| e.to_string())?;
    ensure(scan.mismatches == 0, format!("{} sign mismatches", scan.mismatches))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2usize, 3] {
        let p = boundary_point(n, n as f64 / 2.0).map_err(|e| e.to_string())?;
        let h = real_hessian(&p).map_err(|e| e.to_string())?;
        ensure(h.is_positive_definite() && h.to_matrix().cholesky().is_some(), format!("H(p) not PD, n = {n}"))?;
        for _ in 0..1000 {
            let z = sample_tube_boundary(&mut rng, n, n as f64);
            let h = real_hessian(&z).map_err(|e| e.to_string())?;
            ensure(h.blocks.iter().any(|b| b.det <= 0.0), format!("PD boundary point at eps = n: {z:?}"))?;
        }
    }
    within(start, Duration::from_secs(10))
}

fn tube_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (n, eps) in [(2usize, 1.0), (3, 1.5)] {
        let bound = n as f64 * (2.0 * f64::sqrt(eps)).exp();
        for _ in 0..10_000 {
            let z = sample_tube(&mut rng, n, eps);
            let t: f64 = rng.gen_range(0.0..=1.0);
            let r = contraction_residual(&z, t).map_err(|e| e.to_string())?;
            ensure(r <= 1e-12, format!("contraction residual {r:e}"))?;
            ensure(z.norm_sqr() < bound, format!("ball bound violated at {z:?}"))?;
            let b = sample_tube_boundary(&mut rng, n, eps);
            let w: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let l = levi_form(&b, &w).map_err(|e| e.to_string())?;
            ensure(l - levi_lower_bound(eps, &w) >= -1e-12 * (1.0 + l), format!("Levi bound fails at {b:?}"))?;
        }
    }
    within(start, Duration::from_secs(30))
}

fn convexity() -> Outcome {
    let start = Instant::now();
    let (_, _, up) = up_ball(2, 1.0, 0.5).map_err(|e| e.to_string())?;
    let g = tube(2, 1.0);
    let patch = Region::intersection(&[&g, &up]).map_err(|e| e.to_string())?;
    let v = segment_convexity(&patch, 10_000, 7).map_err(|e| e.to_string())?;
    ensure(v == ConvexityVerdict::NoViolation { trials: 10_000 }, format!("patch not convex: {v:?}"))?;
    // (±e^{0.9}, 1) lie in G_1, their midpoint (0, 1) does not.
    let a = CPoint::from_real(&[0.9f64.exp(), 0.0, 1.0, 0.0]).unwrap();
    let b = CPoint::from_real(&[-(0.9f64.exp()), 0.0, 1.0, 0.0]).unwrap();
    ensure(g.contains(&a).unwrap() && g.contains(&b).unwrap(), "witness endpoints outside G_1")?;
    ensure(!check_segment(&g, &a, &b, 0.5).map_err(|e| e.to_string())?, "witness midpoint inside G_1")?;
    let w = segment_convexity(&g, 10_000, 7).map_err(|e| e.to_string())?;
    ensure(!w.is_convex(), "random search found no witness for G_1")?;
    within(start, Duration::from_secs(30))
}

fn connectivity() -> Outcome {
    let start = Instant::now();
    let (p, r, up) = up_ball(2, 1.0, 0.5).map_err(|e| e.to_string())?;
    let budget = 10_000_000;
    let plan = plan_connectivity(2, 1.0, &p, r, budget, None, None).map_err(|e| e.to_string())?;
    let scan = grid_components(&scan_region(2, 1.0, plan.delta, &up, &plan.scan_box), plan.step, budget)
        .map_err(|e| e.to_string())?;
    let control = grid_components(&control_region(2, 1.0, plan.delta, &plan.scan_box), plan.step, budget)
        .map_err(|e| e.to_string())?;
    ensure(scan.node_count() <= budget, "over budget")?;
    ensure(scan.component_count() == 1, format!("Ω \\ K_δ has {} components", scan.component_count()))?;
    ensure(control.component_count() == 2, format!("control has {} components", control.component_count()))?;
    within(start, Duration::from_secs(300))
}

// Cover of the ball B((1.5, 1.5), 1) by convex pieces, so every intersection is connected.
fn convex_cover(halfspaces: &[(usize, f64, f64)]) -> Cover {
    let centre = CPoint::from_real(&[1.5, 0.0, 1.5, 0.0]).unwrap();
    let ball = Region::ball(&centre, 1.0);
    let sets = halfspaces
        .iter()
        .enumerate()
        .map(|(k, &(axis, sign, offset))| {
            let coord = if axis % 2 == 0 { ScalarExpr::X(axis / 2) } else { ScalarExpr::Y(axis / 2) };
            let half = Constraint::gt(
                ScalarExpr::Affine { constant: offset, terms: vec![(sign, coord)] },
                ScalarExpr::Const(0.0),
            );
            CoverSet::new(
                format!("S{k}_{axis}_{sign}"),
                Region::new(Constraint::And(vec![ball.constraint.clone(), half]), ball.bbox.clone()),
            )
        })
        .collect();
    Cover::new(ball, sets).unwrap()
}

fn random_monomial(rng: &mut ChaCha8Rng) -> HExpr {
    let c = Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-PI..PI));
    HExpr::monomial(c, &[rng.gen_range(-2..=2), rng.gen_range(-2..=2)])
}

/// Frame `s` and its inverse: a monomial scalar, or an upper-triangular monomial matrix.
fn random_frame(rng: &mut ChaCha8Rng, rank: usize) -> (MatExpr, MatExpr) {
    if rank == 1 {
        let m = random_monomial(rng);
        let inv = m.structural_inverse().unwrap();
        return (MatExpr::scalar(m), MatExpr::scalar(inv));
    }
    let (a, b, d) = (random_monomial(rng), random_monomial(rng), random_monomial(rng));
    let (ai, di) = (a.structural_inverse().unwrap(), d.structural_inverse().unwrap());
    let zero = HExpr::real(0.0);
    let s = MatExpr::new(vec![vec![a, b.clone()], vec![zero.clone(), d]]).unwrap();
    let off = HExpr::Product(vec![HExpr::real(-1.0), ai.clone(), b, di.clone()]);
    let inv = MatExpr::new(vec![vec![ai, off], vec![zero, di]]).unwrap();
    (s, inv)
}

/// Bundle with `T(i -> j) = s_j s_i^{-1}` on every overlap.
fn framed_bundle(cover: &Cover, frames: &[(MatExpr, MatExpr)], rank: usize) -> BundleData {
    let nerve = build_nerve(cover, 3, &Resolution::analytic(1)).unwrap();
    let t: Vec<_> = nerve
        .level(1)
        .iter()
        .map(|s| {
            let (i, j) = (s.vertices[0], s.vertices[1]);
            (TransitionKey { from: i, to: j }, frames[j].0.mul(&frames[i].1).unwrap())
        })
        .collect();
    BundleData::new(cover.clone(), nerve, rank, t).unwrap()
}

fn gluing_contract() -> Outcome {
    let start = Instant::now();
    let u_cover = convex_cover(&[(0, -1.0, 1.7), (0, 1.0, -1.3), (1, 1.0, 0.2)]);
    let v_cover = convex_cover(&[(2, -1.0, 1.6), (2, 1.0, -1.4)]);
    let mut cases = 0;
    for case in 0..24u64 {
        let rank = if case % 2 == 0 { 1 } else { 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(100 + case);
        let fu: Vec<_> = (0..u_cover.len()).map(|_| random_frame(&mut rng, rank)).collect();
        let fv: Vec<_> = (0..v_cover.len()).map(|_| random_frame(&mut rng, rank)).collect();
        let bu = framed_bundle(&u_cover, &fu, rank);
        let bv = framed_bundle(&v_cover, &fv, rank);
        for b in [&bu, &bv] {
            ensure(validate_cocycle(b, 6, 1e-9, case).unwrap().passed, format!("case {case}: input invalid"))?;
        }
        // h^j_i = t_j s_i^{-1}
        let iso = BundleIso {
            maps: (0..fu.len())
                .flat_map(|i| (0..fv.len()).map(move |j| (i, j)))
                .map(|(i, j)| ((i, j), fv[j].0.mul(&fu[i].1).unwrap()))
                .collect(),
        };
        let opts = GlueOptions { seed: case, ..Default::default() };
        let (glued, report) = glue(&bu, &bv, &iso, &opts).map_err(|e| format!("case {case}: {e}"))?;
        let v = validate_cocycle(&glued, 6, 1e-9, case).unwrap();
        ensure(v.passed && report.cocycle.passed, format!("case {case}: glued residual {:e}", v.max_residual))?;
        let nu = bu.cover.len();
        let back_u = restrict_to_sets(&glued, &(0..nu).collect::<Vec<_>>()).unwrap();
        let back_v = restrict_to_sets(&glued, &(nu..glued.cover.len()).collect::<Vec<_>>()).unwrap();
        ensure(back_u.transition_table() == bu.transition_table(), format!("case {case}: U restriction differs"))?;
        ensure(back_v.transition_table() == bv.transition_table(), format!("case {case}: V restriction differs"))?;
        cases += 1;
    }
    ensure(cases >= 20, "fewer than 20 cases")?;
    within(start, Duration::from_secs(60))
}

fn main_certificate() -> Outcome {
    let start = Instant::now();
    for (n, eps) in [(2usize, 1.0), (3, 1.5)] {
        let cfg = ScenarioConfig { epsilon: Some(eps), ..ScenarioConfig::with_n(n) };
        let rep = run_dimn(&cfg).map_err(|e| e.to_string())?;
        for name in ["dimn.l_nt", "dimn.glue", "dimn.obstruction"] {
            let c = rep.check(name).ok_or(format!("{name} missing"))?;
            ensure(c.status == hartogs_core::scenarios::Status::Pass, format!("n = {n}: {name} failed: {:?}", c.metrics))?;
        }
        let ob = rep.check("dimn.obstruction").unwrap();
        let residual = ob.metrics["cocycle"]["max_residual"].as_f64().unwrap_or(f64::INFINITY);
        ensure(residual < 1e-9, format!("n = {n}: L_cex residual {residual:e}"))?;
        for key in ["chern_nonzero", "ball_h1_zero", "ball_h2_zero"] {
            ensure(ob.metrics[key] == serde_json::Value::Bool(true), format!("n = {n}: {key}"))?;
        }
        ensure(rep.check("dimn.l_nt").unwrap().metrics["chern_nonzero"] == true, "L_nt chern")?;
        ensure(rep.passed(), format!("n = {n}: overall fail"))?;
    }
    within(start, Duration::from_secs(600))
}

fn determinism() -> Outcome {
    let d2 = ScenarioConfig::default();
    let a = run_dim2(&d2).unwrap().to_json().unwrap();
    let b = run_dim2(&d2).unwrap().to_json().unwrap();
    ensure(a == b, "dim2 reports differ")?;
    let dn = ScenarioConfig { epsilon: Some(1.0), ..ScenarioConfig::with_n(2) };
    let a = run_dimn(&dn).unwrap().to_json().unwrap();
    let b = run_dimn(&dn).unwrap().to_json().unwrap();
    ensure(a == b, "dimn reports differ")
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("torus cohomology ranks (1,2,1) and (1,3,3,1), no torsion", torus_ranks),
        ("dim-2 H^1 = Z with c = (0,1) a certified non-coboundary", dim2_generator),
        ("dim-2 f12 = (1,-1), obstructed; full-scale push trivial", dim2_obstruction),
        ("closed-form Hessian matches finite differences", hessian_fidelity),
        ("Hessian PD exactly on |z| in (1,e); PD at p; control at eps = n", pd_window),
        ("contraction, ball bound and Levi bound on the tube", tube_identities),
        ("G ∩ U_p convex; explicit non-convexity witness for G", convexity),
        ("Ω \\ K_δ connected, control has 2 components", connectivity),
        ("gluing contract on 24 seeded rank-1/rank-2 cases", gluing_contract),
        ("dim-n certificate at (2, 1) and (3, 1.5)", main_certificate),
        ("byte-identical reports for identical config and seed", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {name}  ({:.2?})", i + 1, start.elapsed()),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}  ({e})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
