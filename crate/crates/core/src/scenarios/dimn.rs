//! The `n`-dimensional counterexample: a line bundle on `Ω \ K` that extends to no line
//! bundle on the ball `Ω`.

use std::f64::consts::E;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use super::connectivity::{connectivity_scan, plan_connectivity};
use super::constructions::{binomial, l_nt, omega_prime, one_set_cover, torus_core_cover, up_ball};
use super::report::{missing, CertificateReport, CheckBuilder};
use crate::bundle::{
    chern_cocycle, glue, restrict_to_sets, validate_cocycle, BundleData, BundleIso, GlueOptions,
};
use crate::error::Result;
use crate::geometry::{
    boundary_point, contraction_residual, gaussian, hessian_fd_residual, levi_form, levi_lower_bound, omega_ball,
    real_hessian, rho, sample_tube, sample_tube_boundary, segment_convexity, tube, unit_direction, ConvexityVerdict,
    Region,
};
use crate::nerve::{
    build_nerve, cohomology, is_coboundary, verify_obstruction, CoboundaryVerdict, Cover, IntCochain, Resolution,
    ResolvedNerve, Ring,
};
use crate::point::CPoint;

pub const DIMN_SCOPE: &str = "Certified: the restriction of line bundles from the ball to the complement of the \
compact set is not surjective. Claims that restriction is not injective rely on an external extension theorem and \
are out of scope.";

/// Finite-difference step of the Hessian cross-check.
pub const FD_STEP: f64 = 1e-4;

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect()
}

/// Uniform point of the ball of radius `r` about `c`.
pub fn sample_ball(rng: &mut ChaCha8Rng, c: &CPoint, r: f64) -> CPoint {
    let n = c.dim();
    let dir = unit_direction(rng, 2 * n);
    let s = r * rng.gen::<f64>().powf(1.0 / (2 * n) as f64);
    let delta: Vec<Complex64> = (0..n).map(|j| Complex64::new(dir[2 * j] * s, dir[2 * j + 1] * s)).collect();
    c.offset(&delta)
}

/// Writes the verdict of a (degree ≥ 1) cochain's class into `b` and returns whether it is
/// non-zero.
fn record_nonzero(b: &mut CheckBuilder, key: &str, nerve: &ResolvedNerve, c: &IntCochain) -> Result<bool> {
    match is_coboundary(nerve, c)? {
        CoboundaryVerdict::No { certificate } => {
            let ok = verify_obstruction(nerve, c, &certificate)?;
            b.require(&format!("{key}_certificate_verified"), ok);
            b.metric(&format!("{key}_certificate_pairing"), certificate.pairing);
            b.metric(&format!("{key}_certificate_support"), certificate.weights.len());
            Ok(ok)
        }
        CoboundaryVerdict::Yes { .. } => Ok(false),
    }
}

/// Samples per component so that the triple overlaps see at least `target` points.
fn samples_for(nerve: &ResolvedNerve, target: usize) -> usize {
    let cells = nerve.cell_count(2).max(1);
    target.div_ceil(cells).clamp(4, 64)
}

#[derive(Default)]
struct DimnState {
    p: Option<CPoint>,
    up: Option<(f64, Region)>,
    torus_cover: Option<Cover>,
    l_nt: Option<BundleData>,
    l_cex: Option<BundleData>,
}

pub fn run_dimn(cfg: &ScenarioConfig) -> Result<CertificateReport> {
    cfg.validate()?;
    let n = cfg.n;
    let eps = cfg.eps();
    let nf = n as f64;
    let mut rep = CertificateReport::new("dimn", cfg, DIMN_SCOPE);
    let mut st = DimnState::default();
    let many = cfg.samples.saturating_mul(10);

    rep.push(CheckBuilder::run(
        "dimn.bounded",
        "G_eps is contained in the ball of radius √n e^{√eps} (sampled)",
        |b| {
            let mut rng = rng_for(cfg.seed, 1);
            let bound = nf * (2.0 * eps.sqrt()).exp();
            let mut worst: f64 = 0.0;
            let mut bad = 0usize;
            for _ in 0..many {
                let z = sample_tube(&mut rng, n, eps);
                let ratio = z.norm_sqr() / bound;
                worst = worst.max(ratio);
                if ratio >= 1.0 || rho(&z)? >= eps {
                    bad += 1;
                }
            }
            b.metric("points", many);
            b.metric("max_norm_sq_over_bound", worst);
            b.require("bounded", bad == 0);
            Ok(())
        },
    ));

    rep.push(CheckBuilder::run(
        "dimn.levi",
        "the Levi form on ∂G_eps is at least |w|^2 / (2 e^{2√eps}), so G_eps is pseudoconvex (sampled)",
        |b| {
            let mut rng = rng_for(cfg.seed, 2);
            let mut min_margin = f64::INFINITY;
            for _ in 0..many {
                let z = sample_tube_boundary(&mut rng, n, eps);
                let w = random_vector(&mut rng, n);
                let l = levi_form(&z, &w)?;
                let margin = (l - levi_lower_bound(eps, &w)) / (1.0 + l.abs());
                if margin < min_margin {
                    min_margin = margin;
                }
            }
            b.metric("points", many);
            b.metric("min_relative_margin", min_margin);
            b.require("margin_nonnegative", min_margin >= -1e-12);
            Ok(())
        },
    ));

    rep.push(CheckBuilder::run(
        "dimn.contraction",
        "ρ(H(z, t)) = (1 - t)^2 ρ(z) for the radial contraction H, so G_eps retracts onto the torus (sampled)",
        |b| {
            let mut rng = rng_for(cfg.seed, 3);
            let mut worst: f64 = 0.0;
            for _ in 0..many {
                let z = sample_tube(&mut rng, n, eps);
                let t: f64 = rng.gen_range(0.0..=1.0);
                worst = worst.max(contraction_residual(&z, t)?);
            }
            b.metric("points", many);
            b.metric("max_residual", worst);
            b.require("residual_below_1e-12", worst <= 1e-12);
            Ok(())
        },
    ));

    rep.push(CheckBuilder::run(
        "dimn.hessian_at_p",
        "the real Hessian of ρ at p = e^{√(eps/n)}(1, ..., 1) is positive definite",
        |b| {
            let p = boundary_point(n, eps)?;
            let h = real_hessian(&p)?;
            b.metric("block_det", h.blocks[0].det);
            b.metric("block_trace", h.blocks[0].trace);
            b.require("blocks_positive_definite", h.is_positive_definite());
            b.require("cholesky", h.to_matrix().cholesky().is_some());
            let fd = hessian_fd_residual(&p, FD_STEP)?;
            b.metric("fd_residual", fd);
            b.require("fd_agrees", fd <= cfg.tol_fd);
            st.p = Some(p);
            Ok(())
        },
    ));

    rep.push(CheckBuilder::run(
        "dimn.negative_control",
        "for eps ≥ n every boundary point has a Hessian block with non-positive determinant (sampled at max(eps, n))",
        |b| {
            let eps_c = eps.max(nf);
            let mut rng = rng_for(cfg.seed, 5);
            let mut all_blocked = true;
            for _ in 0..cfg.samples {
                let z = sample_tube_boundary(&mut rng, n, eps_c);
                let h = real_hessian(&z)?;
                if h.blocks.iter().all(|bl| bl.det > 0.0) {
                    all_blocked = false;
                    b.location(&z);
                    break;
                }
            }
            b.metric("control_eps", eps_c);
            b.metric("points", cfg.samples);
            b.require("no_positive_definite_boundary_point", all_blocked);
            Ok(())
        },
    ));

    rep.push(CheckBuilder::run(
        "dimn.convex_patch",
        "U_p lies where ρ is strictly convex, and G_eps ∩ U_p is convex (sampled), while G_eps itself is not",
        |b| {
            let (p, r, up) = up_ball(n, eps, cfg.safety)?;
            b.metric("up_radius", r);
            let mut rng = rng_for(cfg.seed, 6);
            let mut pd = true;
            for _ in 0..cfg.samples {
                let z = sample_ball(&mut rng, &p, r);
                if !real_hessian(&z)?.is_positive_definite() {
                    pd = false;
                    b.location(&z);
                    break;
                }
            }
            b.require("hessian_pd_on_up", pd);
            b.require("moduli_in_window", p.coords().iter().all(|c| c.norm() - r > 1.0 && c.norm() + r < E));
            let g = tube(n, eps);
            let patch = Region::intersection(&[&g, &up])?;
            let verdict = segment_convexity(&patch, many, cfg.seed)?;
            b.metric("patch_trials", many);
            b.require("patch_convex", verdict.is_convex());
            if let ConvexityVerdict::Witness { .. } = &verdict {
                b.location(&verdict);
            }
            let control = segment_convexity(&g, cfg.samples, cfg.seed)?;
            b.require("tube_not_convex", !control.is_convex());
            b.metric("tube_witness", &control);
            st.up = Some((r, up));
            Ok(())
        },
    ));

    rep.push(CheckBuilder::run(
        "dimn.connectivity",
        "Ω minus a thickening of ∂G_eps \\ U_p is connected, while Ω minus a thickening of all of ∂G_eps has 2 \
components (lattice scan)",
        |b| {
            let p = st.p.as_ref().ok_or_else(|| missing("boundary point"))?;
            let (r, up) = st.up.as_ref().ok_or_else(|| missing("U_p"))?;
            let plan = plan_connectivity(n, eps, p, *r, cfg.budget_nodes, cfg.step, cfg.delta)?;
            b.metric("plan", &plan);
            let res = connectivity_scan(n, eps, up, &plan)?;
            b.metric("scan", &res.scan);
            b.metric("control", &res.control);
            b.require("scan_connected", res.scan.component_count == 1);
            b.require("control_two_components", res.control.component_count == 2);
            b.require("control_sides", {
                let mut s = res.control.inside_tube.clone();
                s.sort();
                s == vec![false, true]
            });
            b.require("no_tunnel_edges", res.scan.tunnel_edges == 0 && res.control.tunnel_edges == 0);
            Ok(())
        },
    ));

    rep.push(CheckBuilder::run(
        "dimn.l_nt",
        "the clutching bundle on the torus-core cover of G_eps is a cocycle with non-zero first Chern class; \
H^2 has rank binom(n, 2)",
        |b| {
            let cover = torus_core_cover(n, eps)?;
            b.require("covers_tube", cover.find_uncovered(cfg.samples, cfg.seed)?.is_none());
            let nerve = build_nerve(&cover, 3, &Resolution::analytic(cfg.seed))?;
            b.metric("nerve", nerve.summary().cells_per_level);
            let h2 = cohomology(&nerve, 2, Ring::Z, false)?;
            b.metric("h2_rank", h2.rank);
            b.require("h2_rank_binomial", h2.rank == binomial(n, 2) && h2.torsion.is_empty());
            let bundle = l_nt(&cover, &nerve)?;
            let v = validate_cocycle(&bundle, samples_for(&nerve, 1000), cfg.tol_cocycle, cfg.seed)?;
            b.metric("cocycle", &v);
            b.require("cocycle_valid", v.passed);
            let ch = chern_cocycle(&bundle, cfg.tol_chern)?;
            b.metric("chern_max_rounding", ch.max_rounding);
            let nz = record_nonzero(b, "chern", &nerve, &ch.cochain)?;
            b.require("chern_nonzero", nz);
            st.torus_cover = Some(cover);
            st.l_nt = Some(bundle);
            Ok(())
        },
    ));
    if let Some(l) = &st.l_nt {
        rep.artifact("dimn.l_nt", l);
    }

    rep.push(CheckBuilder::run(
        "dimn.glue",
        "G_eps ∩ U_p lies in the all-A sector only, and the clutching bundle glues with the trivial bundle on Ω' \
into a bundle L_cex on Ω \\ K = G_eps ∪ Ω'",
        |b| {
            let cover = st.torus_cover.as_ref().ok_or_else(|| missing("torus-core cover"))?;
            let lnt = st.l_nt.as_ref().ok_or_else(|| missing("clutching bundle"))?;
            let (r, up) = st.up.as_ref().ok_or_else(|| missing("U_p"))?;
            let patch = Region::intersection(&[&tube(n, eps), up])?;
            let mut rng = rng_for(cfg.seed, 9);
            let mut points = 0usize;
            let mut misplaced = 0usize;
            for _ in 0..cfg.samples {
                let Some(z) = patch.sample(&mut rng, 10_000)? else { break };
                points += 1;
                let mut membership = Vec::with_capacity(cover.len());
                for s in &cover.sets {
                    membership.push(s.region.contains(&z)?);
                }
                if !membership[0] || membership[1..].iter().any(|&m| m) {
                    misplaced += 1;
                }
            }
            b.metric("overlap_points", points);
            b.metric("up_radius", r);
            b.require("overlap_sampled", points > 0);
            b.require("overlap_in_all_a_sector_only", misplaced == 0);

            let op = omega_prime(n, eps, cfg.safety)?;
            let seeds = op.tag.seeds.clone();
            let oc = one_set_cover(&op.name, op.region.clone(), seeds)?;
            let on = build_nerve(&oc, 3, &Resolution::analytic(cfg.seed))?;
            let trivial = BundleData::trivial(oc, on, 1)?;
            let opts = GlueOptions {
                resolution: Resolution::analytic(cfg.seed),
                samples: 8,
                tol: cfg.tol_cocycle,
                seed: cfg.seed,
            };
            let (lcex, gr) = glue(lnt, &trivial, &BundleIso::identity([(0, 0)], 1), &opts)?;
            b.metric("iso_residual", gr.iso_residual);
            b.metric("iso_points", gr.iso_points);
            b.metric("glued_nerve", lcex.nerve.summary().cells_per_level);
            let k = cover.len();
            let back: Vec<usize> = (0..k).collect();
            b.require(
                "restricts_to_l_nt",
                restrict_to_sets(&lcex, &back)?.transition_table() == lnt.transition_table(),
            );
            b.require(
                "restricts_to_trivial",
                restrict_to_sets(&lcex, &[k])?.transition_table() == trivial.transition_table(),
            );
            st.l_cex = Some(lcex);
            Ok(())
        },
    ));

    rep.push(CheckBuilder::run(
        "dimn.obstruction",
        "L_cex is a valid cocycle whose Chern class is non-zero in H^2 of the Ω \\ K nerve, while H^1 = H^2 = 0 for \
the one-set cover of Ω; hence L_cex extends to no line bundle on Ω",
        |b| {
            let lcex = st.l_cex.as_ref().ok_or_else(|| missing("glued bundle"))?;
            let v = validate_cocycle(lcex, samples_for(&lcex.nerve, 1000), cfg.tol_cocycle, cfg.seed)?;
            b.metric("cocycle", &v);
            b.require("cocycle_below_tol", v.passed && v.max_residual < cfg.tol_cocycle);
            let h2 = cohomology(&lcex.nerve, 2, Ring::Z, false)?;
            b.metric("complement_h2_rank", h2.rank);
            let ch = chern_cocycle(lcex, cfg.tol_chern)?;
            b.metric("chern_max_rounding", ch.max_rounding);
            let nz = record_nonzero(b, "chern", &lcex.nerve, &ch.cochain)?;
            b.require("chern_nonzero", nz);

            let omega = omega_ball(n, eps);
            let origin = CPoint::from_real(&vec![0.0; 2 * n])?;
            let oc = one_set_cover("Omega", omega, vec![origin])?;
            let on = build_nerve(&oc, 3, &Resolution::analytic(cfg.seed))?;
            for k in 1..=2 {
                let h = cohomology(&on, k, Ring::Z, false)?;
                b.metric(&format!("ball_h{k}_rank"), h.rank);
                b.require(&format!("ball_h{k}_zero"), h.rank == 0 && h.torsion.is_empty());
            }
            Ok(())
        },
    ));
    if let Some(l) = &st.l_cex {
        rep.artifact("dimn.l_cex", l);
    }

    rep.push(CheckBuilder::trusted(
        "dimn.trivial_on_ball",
        "every holomorphic line bundle on the convex domain Ω is trivial, i.e. H^1(Ω, O*) = 0, so an extension of \
L_cex would force its Chern class to vanish",
        "Oka–Grauert principle on a convex domain; the one-set-cover computation above is its combinatorial shadow",
    ));
    rep.push(CheckBuilder::trusted(
        "dimn.complement_connected",
        "the complement of a bounded Stein compactum in C^n (n ≥ 2) is connected, which gives connectedness of \
Ω \\ K = G_eps ∪ Ω' beyond the scanned box",
        "holomorphic-hull argument; the lattice scan covers only its box, and Ω minus a convex box inside it is \
connected",
    ));
    Ok(rep)
}
