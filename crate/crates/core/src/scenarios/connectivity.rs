//! Lattice certificate that removing `∂G_eps \ U_p` from `Ω` leaves it connected, while
//! removing all of `∂G_eps` splits it in two.
//!
//! The scan uses a thickening `K_δ = {|ρ - eps| < δ |∇ρ|, |√ρ - √eps| < √eps / 2} \ U_p`,
//! i.e. roughly the points within distance `δ` of `∂G_eps`. With `δ` equal to the lattice
//! step no lattice edge can jump across the thickened shell; the scan counts such edges
//! (`tunnel_edges`) to confirm it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{label_components, omega_ball, rho, BBox, Constraint, Lattice, Region, ScalarExpr};
use crate::point::CPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Box around the whole closure of `G_eps`, with a three-step margin.
    Core,
    /// Box around `p` only, for dimensions where the core box exceeds the budget.
    Local,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityPlan {
    pub mode: ScanMode,
    pub step: f64,
    pub delta: f64,
    pub scan_box: BBox,
    pub nodes_per_axis: usize,
    pub node_count: usize,
}

fn nodes(per_axis: usize, real_dim: usize) -> usize {
    per_axis.checked_pow(real_dim as u32).unwrap_or(usize::MAX)
}

fn lattice_of(b: &BBox, step: f64) -> Result<Lattice> {
    Lattice::for_region(&Region::new(Constraint::True, b.clone()), step)
}

/// Chooses the scan box and step. `up_r` is the radius of `U_p`, which must exceed the
/// thickening by two steps so that lattice paths can cross `∂G_eps` inside it.
pub fn plan_connectivity(
    n: usize,
    eps: f64,
    p: &CPoint,
    up_r: f64,
    budget: usize,
    step: Option<f64>,
    delta: Option<f64>,
) -> Result<ConnectivityPlan> {
    let d = 2 * n;
    let m = eps.sqrt().exp();
    let per_axis_budget = (budget as f64).powf(1.0 / d as f64).floor() as usize;

    let core = |s: f64| -> Result<ConnectivityPlan> {
        let a = m + 3.0 * s;
        let b = BBox::symmetric(n, a);
        let lat = lattice_of(&b, s)?;
        Ok(ConnectivityPlan {
            mode: ScanMode::Core,
            step: s,
            delta: delta.unwrap_or(s),
            nodes_per_axis: lat.shape[0],
            node_count: lat.node_count(),
            scan_box: b,
        })
    };
    let local = |s: f64| -> Result<ConnectivityPlan> {
        let b = BBox::cube(p, up_r + 2.0 * s);
        let lat = lattice_of(&b, s)?;
        Ok(ConnectivityPlan {
            mode: ScanMode::Local,
            step: s,
            delta: delta.unwrap_or(s),
            nodes_per_axis: lat.shape[0],
            node_count: lat.node_count(),
            scan_box: b,
        })
    };
    let fits = |pl: &ConnectivityPlan| pl.node_count <= budget && up_r >= pl.delta + 2.0 * pl.step;

    let candidates: Vec<ConnectivityPlan> = match step {
        Some(s) => vec![core(s)?, local(s)?],
        None => {
            let mut v = Vec::new();
            if per_axis_budget > 6 {
                v.push(core(2.0 * m / (per_axis_budget - 6) as f64)?);
            }
            v.push(local(up_r / 5.0)?);
            v
        }
    };
    candidates.into_iter().find(fits).ok_or_else(|| {
        Error::Resource(format!(
            "no connectivity scan fits: n = {n}, U_p radius {up_r:.4}, budget {budget} nodes (the local box needs {} nodes)",
            nodes(14, d)
        ))
    })
}

/// `{|ρ - eps| < δ |∇ρ|, |√ρ - √eps| < √eps / 2}`.
pub fn thickened_boundary(eps: f64, delta: f64) -> Constraint {
    Constraint::And(vec![
        Constraint::lt(
            ScalarExpr::Affine {
                constant: -eps,
                terms: vec![(1.0, ScalarExpr::Rho)],
            }
            .abs(),
            ScalarExpr::RhoGradNorm.scaled(delta),
        ),
        Constraint::lt(
            ScalarExpr::Affine {
                constant: -eps.sqrt(),
                terms: vec![(1.0, ScalarExpr::Rho.pow(0.5))],
            }
            .abs(),
            ScalarExpr::Const(0.5 * eps.sqrt()),
        ),
    ])
}

/// `Ω \ K_δ` restricted to the scan box.
pub fn scan_region(n: usize, eps: f64, delta: f64, up: &Region, b: &BBox) -> Region {
    Region::new(
        Constraint::And(vec![
            omega_ball(n, eps).constraint,
            Constraint::not(Constraint::And(vec![
                thickened_boundary(eps, delta),
                Constraint::not(up.constraint.clone()),
            ])),
        ]),
        b.clone(),
    )
}

/// `Ω \ (thickened ∂G_eps)` restricted to the scan box: the control.
pub fn control_region(n: usize, eps: f64, delta: f64, b: &BBox) -> Region {
    Region::new(
        Constraint::And(vec![
            omega_ball(n, eps).constraint,
            Constraint::not(thickened_boundary(eps, delta)),
        ]),
        b.clone(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub component_count: usize,
    pub in_region_nodes: usize,
    pub component_sizes: Vec<usize>,
    /// Edges of the scanned graph whose endpoints lie on opposite sides of `∂G_eps`,
    /// neither of them in `U_p`.
    pub tunnel_edges: usize,
    /// For each component, whether its representative lies in `G_eps`.
    pub inside_tube: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityResult {
    pub plan: ConnectivityPlan,
    pub scan: ScanOutcome,
    pub control: ScanOutcome,
}

const IN_OMEGA: u8 = 1;
const INSIDE: u8 = 2;
const SHELL: u8 = 4;
const IN_UP: u8 = 8;

fn scan(lattice: &Lattice, flags: &[u8], keep: impl Fn(u8) -> bool + Sync) -> ScanOutcome {
    let inside: Vec<bool> = flags.par_iter().map(|&f| keep(f)).collect();
    let lab = label_components(lattice.clone(), inside);
    let mut tunnels = 0usize;
    lab.for_each_edge(|a, b| {
        let (fa, fb) = (flags[a], flags[b]);
        if (fa ^ fb) & INSIDE != 0 && (fa | fb) & IN_UP == 0 {
            tunnels += 1;
        }
    });
    let inside_tube = (0..lab.component_count())
        .map(|c| flags[lab.representative_node(c)] & INSIDE != 0)
        .collect();
    ScanOutcome {
        component_count: lab.component_count(),
        in_region_nodes: lab.in_region_count(),
        component_sizes: lab.component_sizes().to_vec(),
        tunnel_edges: tunnels,
        inside_tube,
    }
}

/// Runs the scan and the control on the same lattice.
pub fn connectivity_scan(n: usize, eps: f64, up: &Region, plan: &ConnectivityPlan) -> Result<ConnectivityResult> {
    let lattice = lattice_of(&plan.scan_box, plan.step)?;
    if lattice.node_count() > u32::MAX as usize - 1 {
        return Err(Error::Resource("lattice too large for 32-bit node ids".into()));
    }
    let omega = omega_ball(n, eps).constraint;
    let shell = thickened_boundary(eps, plan.delta);
    let up = &up.constraint;
    let total = lattice.node_count();
    let chunk = lattice.shape.last().copied().unwrap_or(1).max(1);
    let mut flags = vec![0u8; total];
    flags
        .par_chunks_mut(chunk)
        .enumerate()
        .try_for_each(|(row, slot)| -> Result<()> {
            for (k, f) in slot.iter_mut().enumerate() {
                let z = lattice.node_point(row * chunk + k);
                let mut v = 0;
                if omega.eval(&z)? {
                    v |= IN_OMEGA;
                }
                if rho(&z).unwrap_or(f64::INFINITY) < eps {
                    v |= INSIDE;
                }
                if shell.eval(&z)? {
                    v |= SHELL;
                }
                if up.eval(&z)? {
                    v |= IN_UP;
                }
                *f = v;
            }
            Ok(())
        })?;
    let scan_out = scan(&lattice, &flags, |f| f & IN_OMEGA != 0 && !(f & SHELL != 0 && f & IN_UP == 0));
    let control = scan(&lattice, &flags, |f| f & IN_OMEGA != 0 && f & SHELL == 0);
    Ok(ConnectivityResult {
        plan: plan.clone(),
        scan: scan_out,
        control,
    })
}
