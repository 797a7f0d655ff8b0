//! Transition-function presentations of holomorphic vector bundles.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holo::{holomorphy_residual, invert, max_abs_diff, MatExpr, DET_FLOOR};
use crate::nerve::{Cover, ResolvedNerve};
use crate::point::CPoint;

/// Key of a stored transition: it carries frame `from` to frame `to`, `from < to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TransitionKey {
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct TransitionEntry {
    from: usize,
    to: usize,
    matrix: MatExpr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct BundleRepr {
    cover: Cover,
    nerve: ResolvedNerve,
    rank: usize,
    transitions: Vec<TransitionEntry>,
}

/// A cover, its resolved nerve, and one transition matrix per edge `{i < j}` of the nerve,
/// read as `T(i -> j)`. `T(j -> i)` is derived on demand and `T(i -> i)` is the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BundleRepr", into = "BundleRepr")]
pub struct BundleData {
    pub cover: Cover,
    pub nerve: ResolvedNerve,
    pub rank: usize,
    transitions: BTreeMap<TransitionKey, MatExpr>,
}

impl TryFrom<BundleRepr> for BundleData {
    type Error = Error;
    fn try_from(r: BundleRepr) -> Result<Self> {
        BundleData::new(
            r.cover,
            r.nerve,
            r.rank,
            r.transitions
                .into_iter()
                .map(|t| (TransitionKey { from: t.from, to: t.to }, t.matrix)),
        )
    }
}

impl From<BundleData> for BundleRepr {
    fn from(b: BundleData) -> Self {
        BundleRepr {
            cover: b.cover,
            nerve: b.nerve,
            rank: b.rank,
            transitions: b
                .transitions
                .into_iter()
                .map(|(k, m)| TransitionEntry {
                    from: k.from,
                    to: k.to,
                    matrix: m,
                })
                .collect(),
        }
    }
}

impl BundleData {
    /// Checks every nerve edge has exactly one transition of the right rank and that
    /// piecewise transitions have a branch for each component of their overlap.
    pub fn new(
        cover: Cover,
        nerve: ResolvedNerve,
        rank: usize,
        transitions: impl IntoIterator<Item = (TransitionKey, MatExpr)>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Invalid("bundle rank must be at least 1".into()));
        }
        if nerve.set_names != cover.names() {
            return Err(Error::Invalid("nerve and cover list different sets".into()));
        }
        let mut map = BTreeMap::new();
        for (k, m) in transitions {
            if k.from >= k.to {
                return Err(Error::Invalid(format!(
                    "transitions are stored for from < to, got {} -> {}",
                    k.from, k.to
                )));
            }
            let simplex = nerve.simplex(&[k.from, k.to]).ok_or_else(|| {
                Error::Invalid(format!("sets {} and {} do not overlap", k.from, k.to))
            })?;
            if m.rank() != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: m.rank(),
                });
            }
            for e in m.entries.iter().flatten() {
                if let Some(keys) = e.piece_labels() {
                    for l in simplex.labels() {
                        if !keys.contains(&l) {
                            return Err(Error::Invalid(format!(
                                "piecewise transition {} -> {} has no branch for component {l}",
                                k.from, k.to
                            )));
                        }
                    }
                }
            }
            if map.insert(k, m).is_some() {
                return Err(Error::Invalid("duplicate transition".into()));
            }
        }
        for s in nerve.level(1) {
            let k = TransitionKey {
                from: s.vertices[0],
                to: s.vertices[1],
            };
            if !map.contains_key(&k) {
                return Err(Error::Invalid(format!(
                    "missing transition {} -> {}",
                    cover.sets[k.from].name, cover.sets[k.to].name
                )));
            }
        }
        Ok(BundleData {
            cover,
            nerve,
            rank,
            transitions: map,
        })
    }

    /// All transitions the identity.
    pub fn trivial(cover: Cover, nerve: ResolvedNerve, rank: usize) -> Result<Self> {
        let t: Vec<_> = nerve
            .level(1)
            .iter()
            .map(|s| {
                (
                    TransitionKey {
                        from: s.vertices[0],
                        to: s.vertices[1],
                    },
                    MatExpr::identity(rank),
                )
            })
            .collect();
        BundleData::new(cover, nerve, rank, t)
    }

    pub fn transitions(&self) -> &BTreeMap<TransitionKey, MatExpr> {
        &self.transitions
    }

    pub fn stored(&self, from: usize, to: usize) -> Option<&MatExpr> {
        self.transitions.get(&TransitionKey { from, to })
    }

    /// Transitions keyed by set names, for structural comparison across covers.
    pub fn transition_table(&self) -> BTreeMap<(String, String), MatExpr> {
        self.transitions
            .iter()
            .map(|(k, m)| {
                (
                    (self.cover.sets[k.from].name.clone(), self.cover.sets[k.to].name.clone()),
                    m.clone(),
                )
            })
            .collect()
    }

    /// `T(from -> to)` as an expression: stored, or the structural inverse of the stored
    /// reverse transition when one exists.
    pub fn transition(&self, from: usize, to: usize) -> Result<MatExpr> {
        if from == to {
            return Ok(MatExpr::identity(self.rank));
        }
        if from < to {
            return self
                .stored(from, to)
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("sets {from} and {to} do not overlap")));
        }
        self.stored(to, from)
            .ok_or_else(|| Error::Invalid(format!("sets {to} and {from} do not overlap")))?
            .structural_inverse()
            .ok_or_else(|| Error::Shape("no structural inverse; evaluate numerically".into()))
    }

    /// Component label of `z` in the overlap of the listed sets.
    pub fn point_label(&self, simplex: &[usize], z: &CPoint) -> Result<u32> {
        point_label(&self.cover, &self.nerve, simplex, z)
    }

    /// `T(from -> to)(z)`; the reverse direction is inverted numerically.
    pub fn eval_transition(&self, from: usize, to: usize, z: &CPoint) -> Result<DMatrix<Complex64>> {
        if from == to {
            return Ok(DMatrix::identity(self.rank, self.rank));
        }
        let (a, b) = (from.min(to), from.max(to));
        let label = self.point_label(&[a, b], z)?;
        let m = self
            .stored(a, b)
            .ok_or_else(|| Error::Invalid(format!("sets {a} and {b} do not overlap")))?
            .eval(z, Some(label))?;
        if from < to {
            Ok(m)
        } else {
            invert(&m, DET_FLOOR)
        }
    }
}

pub(crate) fn point_label(cover: &Cover, nerve: &ResolvedNerve, simplex: &[usize], z: &CPoint) -> Result<u32> {
    if cover.has_labeler(simplex) {
        return cover.label(simplex, z);
    }
    match nerve.simplex(simplex) {
        Some(s) if s.components.len() == 1 => Ok(s.components[0].label),
        Some(_) => Err(Error::Resolution(format!(
            "overlap {simplex:?} has several components but no analytic labeler"
        ))),
        None => Ok(0),
    }
}

/// Representative first, then rejection samples of the same component.
pub fn sample_component(
    cover: &Cover,
    nerve: &ResolvedNerve,
    simplex: &[usize],
    label: u32,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CPoint>> {
    let comp = nerve
        .component(simplex, label)
        .ok_or_else(|| Error::Invalid(format!("no component {label} on {simplex:?}")))?;
    let mut pts = vec![comp.representative.clone()];
    if count <= 1 {
        return Ok(pts);
    }
    let region = cover.intersection(simplex)?;
    let tries = count.saturating_mul(500);
    for _ in 0..tries {
        if pts.len() >= count {
            break;
        }
        let z = region.bbox.sample(rng);
        if region.contains(&z)? && point_label(cover, nerve, simplex, &z)? == label {
            pts.push(z);
        }
    }
    Ok(pts)
}

fn item_rng(seed: u64, level: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (level as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index as u64);
    rng
}

/// Where a residual was measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub sets: Vec<String>,
    pub component: u32,
    pub point: CPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub passed: bool,
    pub tol: f64,
    /// Worst `|T(a->c) - T(b->c) T(a->b)|` over sampled triple-overlap points.
    pub max_residual: f64,
    pub worst: Option<Location>,
    pub triple_points: usize,
    /// Worst `|T(a->b) T(b->a) - I|` over sampled edge points.
    pub inverse_residual: f64,
    pub inverse_worst: Option<Location>,
    pub edge_points: usize,
    pub min_abs_det: f64,
}

struct Probe {
    residual: f64,
    location: Option<Location>,
    points: usize,
    min_det: f64,
}

fn worst_of(probes: Vec<Probe>) -> Probe {
    // Strictly greater wins, so ties keep the first location in canonical order.
    probes.into_iter().fold(
        Probe {
            residual: 0.0,
            location: None,
            points: 0,
            min_det: f64::INFINITY,
        },
        |acc, p| {
            let better = p.residual > acc.residual || (acc.location.is_none() && p.location.is_some());
            Probe {
                residual: if better { p.residual } else { acc.residual },
                location: if better { p.location } else { acc.location },
                points: acc.points + p.points,
                min_det: acc.min_det.min(p.min_det),
            }
        },
    )
}

/// Checks the cocycle identity on triple overlaps and inverse consistency plus the
/// determinant floor on edges, at the representative and `samples - 1` further points
/// of every component.
pub fn validate_cocycle(b: &BundleData, samples: usize, tol: f64, seed: u64) -> Result<CocycleReport> {
    let names = |s: &[usize]| s.iter().map(|&i| b.cover.sets[i].name.clone()).collect::<Vec<_>>();
    let cells = |k: usize| -> Vec<(Vec<usize>, u32)> {
        b.nerve
            .level(k)
            .iter()
            .flat_map(|s| s.components.iter().map(move |c| (s.vertices.clone(), c.label)))
            .collect()
    };

    let edges = cells(1);
    let edge_probes: Vec<Probe> = edges
        .par_iter()
        .enumerate()
        .map(|(idx, (s, label))| -> Result<Probe> {
            let mut rng = item_rng(seed, 1, idx);
            let pts = sample_component(&b.cover, &b.nerve, s, *label, samples, &mut rng)?;
            let fwd_expr = b.stored(s[0], s[1]).expect("validated edge");
            let back_expr = b.transition(s[1], s[0]).ok();
            let mut probe = Probe {
                residual: 0.0,
                location: None,
                points: pts.len(),
                min_det: f64::INFINITY,
            };
            for z in pts {
                let fwd = fwd_expr.eval(&z, Some(*label))?;
                let det = fwd.determinant().norm();
                probe.min_det = probe.min_det.min(det);
                let back = match &back_expr {
                    Some(e) => e.eval(&z, Some(*label))?,
                    None => invert(&fwd, 0.0)?,
                };
                let r = max_abs_diff(&(fwd * back), &DMatrix::identity(b.rank, b.rank));
                if probe.location.is_none() || r > probe.residual {
                    probe.residual = r;
                    probe.location = Some(Location {
                        sets: names(s),
                        component: *label,
                        point: z,
                    });
                }
            }
            Ok(probe)
        })
        .collect::<Result<_>>()?;
    let e = worst_of(edge_probes);

    let triples = cells(2);
    let triple_probes: Vec<Probe> = triples
        .par_iter()
        .enumerate()
        .map(|(idx, (s, label))| -> Result<Probe> {
            let mut rng = item_rng(seed, 2, idx);
            let pts = sample_component(&b.cover, &b.nerve, s, *label, samples, &mut rng)?;
            let (i, j, k) = (s[0], s[1], s[2]);
            let mut probe = Probe {
                residual: 0.0,
                location: None,
                points: pts.len(),
                min_det: f64::INFINITY,
            };
            for z in pts {
                let ij = b.eval_transition(i, j, &z)?;
                let jk = b.eval_transition(j, k, &z)?;
                let ik = b.eval_transition(i, k, &z)?;
                let r = max_abs_diff(&ik, &(jk * ij));
                if probe.location.is_none() || r > probe.residual {
                    probe.residual = r;
                    probe.location = Some(Location {
                        sets: names(s),
                        component: *label,
                        point: z,
                    });
                }
            }
            Ok(probe)
        })
        .collect::<Result<_>>()?;
    let t = worst_of(triple_probes);

    let min_abs_det = e.min_det;
    Ok(CocycleReport {
        passed: t.residual < tol && e.residual < tol && (edges.is_empty() || min_abs_det > DET_FLOOR),
        tol,
        max_residual: t.residual,
        worst: t.location,
        triple_points: t.points,
        inverse_residual: e.residual,
        inverse_worst: e.location,
        edge_points: e.points,
        min_abs_det,
    })
}

/// Largest `∂̄`-residual of any transition entry over sampled edge points.
pub fn transition_holomorphy(b: &BundleData, samples: usize, h: f64, seed: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (idx, s) in b.nerve.level(1).iter().enumerate() {
        let m = b.stored(s.vertices[0], s.vertices[1]).expect("validated edge");
        for (ci, c) in s.components.iter().enumerate() {
            let mut rng = item_rng(seed, 7, idx * 64 + ci);
            for z in sample_component(&b.cover, &b.nerve, &s.vertices, c.label, samples, &mut rng)? {
                for e in m.entries.iter().flatten() {
                    worst = worst.max(holomorphy_residual(e, &z, h, Some(c.label))?);
                }
            }
        }
    }
    Ok(worst)
}
