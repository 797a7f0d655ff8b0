//! Smaller entry points: the torus cohomology table, the Hessian sign sweep and a self-test.

use std::f64::consts::E;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::constructions::{binomial, dim2_cover, torus_core_cover};
use super::report::{CertificateReport, CheckBuilder};
use crate::error::{Error, Result};
use crate::geometry::{hessian_block, hessian_fd_residual, rho, CoordMap};
use crate::nerve::{
    build_nerve, coboundary_matrix, cohomology, smith_normal_form, IntMatrix, Resolution, Ring,
};
use crate::point::CPoint;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusRow {
    pub degree: usize,
    pub rank: usize,
    pub torsion: Vec<String>,
    pub expected: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusTable {
    pub n: usize,
    pub epsilon: f64,
    pub k_max: usize,
    pub cells_per_level: Vec<usize>,
    pub rows: Vec<TorusRow>,
    pub passed: bool,
}

/// `H^k(G_eps; Z)` from the torus-core cover for `k < k_max`, against `binom(n, k)`.
pub fn cohomology_torus(n: usize, eps: f64, k_max: usize, seed: u64) -> Result<TorusTable> {
    if k_max == 0 {
        return Err(Error::Invalid("k_max must be at least 1".into()));
    }
    let cover = torus_core_cover(n, eps)?;
    let nerve = build_nerve(&cover, k_max, &Resolution::analytic(seed))?;
    let rows = (0..k_max)
        .map(|k| {
            let h = cohomology(&nerve, k, Ring::Z, false)?;
            Ok(TorusRow {
                degree: k,
                rank: h.rank,
                torsion: h.torsion,
                expected: binomial(n, k),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().all(|r| r.rank == r.expected && r.torsion.is_empty());
    Ok(TorusTable {
        n,
        epsilon: eps,
        k_max,
        cells_per_level: nerve.summary().cells_per_level,
        rows,
        passed,
    })
}

impl TorusTable {
    pub fn to_text(&self) -> String {
        let mut s = format!("torus-core cover, n = {}, eps = {}, nerve cells {:?}\n", self.n, self.epsilon, self.cells_per_level);
        s.push_str("  k  rank  expected  torsion\n");
        for r in &self.rows {
            s.push_str(&format!("  {:<2} {:<5} {:<9} {:?}\n", r.degree, r.rank, r.expected, r.torsion));
        }
        s.push_str(if self.passed { "PASS\n" } else { "FAIL\n" });
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianRow {
    pub modulus: f64,
    /// Determinant of the unscaled block, `|z|^4 (log|z| - log^2|z|)`.
    pub det: f64,
    pub positive_definite: bool,
    pub in_window: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianScan {
    pub rows: Vec<HessianRow>,
    pub mismatches: usize,
}

/// Sweeps `|z|` over `(lo, hi)` at cell midpoints, comparing positive definiteness of the
/// Hessian block with membership of `|z|` in `(1, e)`.
pub fn hessian_scan(points: usize, lo: f64, hi: f64) -> Result<HessianScan> {
    if points == 0 || !(lo > 0.0 && hi > lo) {
        return Err(Error::Invalid(format!("bad sweep: {points} points on ({lo}, {hi})")));
    }
    let h = (hi - lo) / points as f64;
    let rows = (0..points)
        .map(|i| {
            let r = lo + (i as f64 + 0.5) * h;
            let angle = 0.37 * i as f64;
            let b = hessian_block(Complex64::from_polar(r, angle))?;
            Ok(HessianRow {
                modulus: r,
                det: b.det,
                positive_definite: b.is_positive_definite(),
                in_window: r > 1.0 && r < E,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatches = rows.iter().filter(|r| r.positive_definite != r.in_window).count();
    Ok(HessianScan { rows, mismatches })
}

impl HessianScan {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "modulus,det,positive_definite,in_window")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.modulus, r.det, r.positive_definite, r.in_window)?;
        }
        Ok(())
    }
}

/// Fast internal consistency checks, reported like a scenario.
pub fn selftest(cfg: &ScenarioConfig) -> Result<CertificateReport> {
    let mut rep = CertificateReport::new("selftest", cfg, "internal consistency only");
    rep.push(CheckBuilder::run("selftest.smith", "Smith form of [[2, 4], [6, 8]] is diag(2, 4)", |b| {
        let s = smith_normal_form(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        let d: Vec<String> = s.divisors.iter().map(|d| d.to_string()).collect();
        b.metric("divisors", &d);
        b.require("divisors", d == ["2", "4"]);
        Ok(())
    }));
    rep.push(CheckBuilder::run("selftest.delta_squared", "δ∘δ = 0 on the torus-core nerve (n = 2)", |b| {
        let cover = torus_core_cover(2, 1.0)?;
        let nerve = build_nerve(&cover, 3, &Resolution::analytic(cfg.seed))?;
        for k in 0..2 {
            let p = coboundary_matrix(&nerve, k + 1).mul(&coboundary_matrix(&nerve, k));
            b.require(&format!("degree_{k}"), p.is_zero());
        }
        Ok(())
    }));
    rep.push(CheckBuilder::run("selftest.torus", "torus-core cohomology of G_1 in C^2 is (1, 2, 1)", |b| {
        let t = cohomology_torus(2, 1.0, 3, cfg.seed)?;
        b.metric("ranks", t.rows.iter().map(|r| r.rank).collect::<Vec<_>>());
        b.require("binomial", t.passed);
        Ok(())
    }));
    rep.push(CheckBuilder::run("selftest.dim2_nerve", "U1 ∩ U2 has two components and H^1 = Z", |b| {
        let cover = dim2_cover(4.0)?;
        let nerve = build_nerve(&cover, 2, &Resolution::analytic(cfg.seed))?;
        b.require("two_components", nerve.simplex(&[0, 1]).map(|s| s.components.len()) == Some(2));
        b.require("h1", cohomology(&nerve, 1, Ring::Z, false)?.rank == 1);
        Ok(())
    }));
    rep.push(CheckBuilder::run("selftest.exhaustion", "ρ, exp(i·) and the Hessian agree with closed forms", |b| {
        let z = CPoint::new(vec![Complex64::new(E, 0.0), Complex64::new(0.0, 1.0)])?;
        b.require("rho", (rho(&z)? - 1.0).abs() < 1e-15);
        let w = CoordMap::ExpI.apply(&CPoint::from_real(&[0.3, 0.0, -1.2, 0.0])?)?;
        b.require("exp_on_torus", rho(&w)? < 1e-30);
        let fd = hessian_fd_residual(&CPoint::from_real(&[1.3, 0.4, -0.2, 1.7])?, 1e-4)?;
        b.metric("fd_residual", fd);
        b.require("hessian_fd", fd <= cfg.tol_fd);
        let scan = hessian_scan(200, 0.5, 3.0)?;
        b.require("pd_window", scan.mismatches == 0);
        Ok(())
    }));
    Ok(rep)
}
