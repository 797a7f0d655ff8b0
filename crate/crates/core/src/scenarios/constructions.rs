//! The concrete domains, covers and bundles of the two counterexamples.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bundle::{BundleData, TransitionKey};
use crate::error::{Error, Result};
use crate::geometry::{boundary_point, omega_ball, tube, up_radius, BBox, Constraint, Region, ScalarExpr};
use crate::holo::{HExpr, MatExpr};
use crate::nerve::{Cover, CoverSet, ResolvedNerve, SetTag, Split};
use crate::point::CPoint;

fn sq(e: ScalarExpr) -> ScalarExpr {
    e.pow(2.0)
}

/// `D_r = {|x_1|, |x_2| < r, y_1^2 + y_2^2 < 1}` in `C^2`.
pub fn d_r(r: f64) -> Region {
    Region::new(
        Constraint::And(vec![
            Constraint::lt(ScalarExpr::X(0).abs(), ScalarExpr::Const(r)),
            Constraint::lt(ScalarExpr::X(1).abs(), ScalarExpr::Const(r)),
            Constraint::lt(
                ScalarExpr::Sum(vec![sq(ScalarExpr::Y(0)), sq(ScalarExpr::Y(1))]),
                ScalarExpr::Const(1.0),
            ),
        ]),
        BBox {
            lo: vec![-r, -1.0, -r, -1.0],
            hi: vec![r, 1.0, r, 1.0],
        },
    )
}

/// `D_r \ K` with `K = {y_1 = y_2 = 0}`.
pub fn d_r_minus_k(r: f64) -> Region {
    let d = d_r(r);
    Region::new(
        Constraint::And(vec![
            d.constraint,
            Constraint::gt(
                ScalarExpr::Sum(vec![sq(ScalarExpr::Y(0)), sq(ScalarExpr::Y(1))]),
                ScalarExpr::Const(0.0),
            ),
        ]),
        d.bbox,
    )
}

fn dim2_point(y1: f64, y2: f64) -> CPoint {
    CPoint::from_real(&[0.0, y1, 0.0, y2]).expect("finite")
}

/// `U_1 = {y_2 < |y_1|} ∩ D_r` and `U_2 = {y_2 > -|y_1|} ∩ D_r`, covering `D_r \ K`.
/// Their overlap splits along the sign of `y_1`: label 0 is `{y_1 < -|y_2|}`, label 1 is
/// `{y_1 > |y_2|}`.
pub fn dim2_cover(r: f64) -> Result<Cover> {
    let d = d_r(r);
    let split = |side| Split {
        bit: 0,
        side,
        discriminant: ScalarExpr::Y(0),
    };
    let u1 = Region::new(
        Constraint::And(vec![
            d.constraint.clone(),
            Constraint::lt(ScalarExpr::Y(1), ScalarExpr::Y(0).abs()),
        ]),
        d.bbox.clone(),
    );
    let u2 = Region::new(
        Constraint::And(vec![
            d.constraint.clone(),
            Constraint::gt(ScalarExpr::Y(1), ScalarExpr::Y(0).abs().scaled(-1.0)),
        ]),
        d.bbox.clone(),
    );
    Cover::new(
        d_r_minus_k(r),
        vec![
            CoverSet::new("U1", u1).with_tag(SetTag {
                splits: vec![split(0)],
                seeds: vec![dim2_point(-0.5, 0.0), dim2_point(0.5, 0.0), dim2_point(0.0, -0.5)],
            }),
            CoverSet::new("U2", u2).with_tag(SetTag {
                splits: vec![split(1)],
                seeds: vec![dim2_point(-0.5, 0.0), dim2_point(0.5, 0.0), dim2_point(0.0, 0.5)],
            }),
        ],
    )
}

/// The two arcs of the circle used by the torus-core cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arc {
    /// `arg ∈ (-2π/3, 2π/3)`
    A,
    /// `arg ∈ (π/3, 5π/3)`
    B,
}

impl Arc {
    fn angles(self) -> [f64; 3] {
        // centre first, so representatives sit at arc centres when possible
        match self {
            Arc::A => [0.0, PI / 2.0, -PI / 2.0],
            Arc::B => [PI, PI / 2.0, -PI / 2.0],
        }
    }

    pub fn letter(self) -> char {
        match self {
            Arc::A => 'A',
            Arc::B => 'B',
        }
    }
}

/// `{arg z_j ∈ arc}`: `x_j + |y_j|/√3 > 0` for `A`, `-x_j + |y_j|/√3 > 0` for `B`.
pub fn arc_constraint(j: usize, arc: Arc) -> Constraint {
    let sx = match arc {
        Arc::A => 1.0,
        Arc::B => -1.0,
    };
    Constraint::gt(
        ScalarExpr::Affine {
            constant: 0.0,
            terms: vec![(sx, ScalarExpr::X(j)), (1.0 / 3f64.sqrt(), ScalarExpr::Y(j).abs())],
        },
        ScalarExpr::Const(0.0),
    )
}

/// Arc pattern of torus-core set `index` (bit `j` set means arc `B` in coordinate `j`).
pub fn arcs_of(index: usize, n: usize) -> Vec<Arc> {
    (0..n)
        .map(|j| if index >> j & 1 == 1 { Arc::B } else { Arc::A })
        .collect()
}

pub fn torus_set_name(arcs: &[Arc]) -> String {
    arcs.iter().map(|a| a.letter()).collect()
}

fn torus_seeds(arcs: &[Arc]) -> Vec<CPoint> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for a in arcs {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                a.angles().into_iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t);
                    p
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|theta| CPoint::from_log_polar(&vec![0.0; theta.len()], &theta).expect("finite"))
        .collect()
}

/// The `2^n` products of arcs intersected with `G_eps`. In each coordinate where two sets
/// use different arcs their overlap splits in two: label bit `j` is set on the lower
/// component (`y_j < 0`).
pub fn torus_core_cover(n: usize, eps: f64) -> Result<Cover> {
    if n == 0 || n > 6 {
        return Err(Error::Invalid(format!("torus-core covers are built for 1 <= n <= 6, got {n}")));
    }
    let g = tube(n, eps);
    let sets = (0..1usize << n)
        .map(|idx| {
            let arcs = arcs_of(idx, n);
            let mut cs = vec![g.constraint.clone()];
            cs.extend(arcs.iter().enumerate().map(|(j, &a)| arc_constraint(j, a)));
            CoverSet::new(torus_set_name(&arcs), Region::new(Constraint::And(cs), g.bbox.clone())).with_tag(SetTag {
                splits: arcs
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| Split {
                        bit: j as u8,
                        side: (a == Arc::B) as u8,
                        discriminant: ScalarExpr::Y(j).scaled(-1.0),
                    })
                    .collect(),
                seeds: torus_seeds(&arcs),
            })
        })
        .collect();
    Cover::new(g, sets)
}

/// The boundary point `p`, the radius of `U_p`, and `U_p` itself.
///
/// The radius from [`up_radius`] is additionally capped below `|p_j| sin(π/3)` so that
/// `U_p` stays in the sector where every argument lies in `(-π/3, π/3)`, i.e. inside the
/// all-`A` set and outside every other torus-core set.
pub fn up_ball(n: usize, eps: f64, safety: f64) -> Result<(CPoint, f64, Region)> {
    let p = boundary_point(n, eps)?;
    let cap = 0.99 * p.coord(0).norm() * (PI / 3.0).sin();
    let r = up_radius(n, eps, safety)?.min(cap);
    let ball = Region::ball(&p, r);
    Ok((p, r, ball))
}

/// `Ω' = (Ω \ closure(G_eps)) ∪ U_p` as a single cover set.
pub fn omega_prime(n: usize, eps: f64, safety: f64) -> Result<CoverSet> {
    let (p, r, up) = up_ball(n, eps, safety)?;
    let omega = omega_ball(n, eps);
    let region = Region::new(
        Constraint::Or(vec![
            Constraint::And(vec![
                omega.constraint.clone(),
                Constraint::gt(ScalarExpr::Rho, ScalarExpr::Const(eps)),
            ]),
            up.constraint,
        ]),
        omega.bbox,
    );
    let norm = p.norm_sqr().sqrt();
    let radial = |t: f64| p.offset(&p.coords().iter().map(|c| c * (t * r / norm)).collect::<Vec<Complex64>>());
    Ok(CoverSet::new("Omega'", region).with_tag(SetTag {
        splits: Vec::new(),
        seeds: vec![radial(-0.5), radial(0.5), CPoint::from_real(&vec![0.0; 2 * n]).expect("finite")],
    }))
}

/// Single-set cover of `Ω` (or of any region).
pub fn one_set_cover(name: &str, region: Region, seeds: Vec<CPoint>) -> Result<Cover> {
    Cover::new(region.clone(), vec![CoverSet::new(name, region).with_tag(SetTag { splits: Vec::new(), seeds })])
}

/// Line bundle on the torus-core cover, clutched in the first coordinate: crossing from an
/// `A` arc to a `B` arc of `z_1` multiplies by `1` on the upper overlap and by `z_2` on the
/// lower one; all other frame changes are trivial.
pub fn l_nt(cover: &Cover, nerve: &ResolvedNerve) -> Result<BundleData> {
    let n = cover.complex_dim();
    if n < 2 {
        return Err(Error::Invalid("the clutching bundle needs n >= 2".into()));
    }
    let t = nerve.level(1).iter().map(|s| {
        let (a, b) = (s.vertices[0], s.vertices[1]);
        let (a0, b0) = (a & 1, b & 1);
        let e = if a0 == b0 {
            HExpr::one()
        } else {
            let lower = if a0 == 0 { HExpr::Coord(1) } else { HExpr::Coord(1).pow(-1) };
            HExpr::Piecewise(
                s.components
                    .iter()
                    .map(|c| (c.label, if c.label & 1 == 1 { lower.clone() } else { HExpr::one() }))
                    .collect::<BTreeMap<_, _>>(),
            )
        };
        (TransitionKey { from: a, to: b }, MatExpr::scalar(e))
    });
    BundleData::new(cover.clone(), nerve.clone(), 1, t)
}

/// `binom(n, k)`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
