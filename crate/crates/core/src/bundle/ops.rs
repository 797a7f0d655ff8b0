//! Gluing, restriction and pullback of bundle presentations.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::data::{sample_component, validate_cocycle, BundleData, CocycleReport, TransitionKey};
use crate::error::{Error, Result};
use crate::geometry::{CoordMap, Constraint, Region};
use crate::holo::{invert, max_abs_diff, HExpr, MatExpr, DET_FLOOR};
use crate::nerve::{build_nerve, Cover, CoverSet, Resolution, SetTag};
use crate::point::CPoint;

/// Frame changes `h^j_i` from `U_i` (first cover) to `V^j` (second cover), keyed `(i, j)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BundleIso {
    pub maps: BTreeMap<(usize, usize), MatExpr>,
}

impl BundleIso {
    /// The identity on every listed pair.
    pub fn identity(pairs: impl IntoIterator<Item = (usize, usize)>, rank: usize) -> Self {
        BundleIso {
            maps: pairs.into_iter().map(|p| (p, MatExpr::identity(rank))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlueOptions {
    pub resolution: Resolution,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for GlueOptions {
    fn default() -> Self {
        GlueOptions {
            resolution: Resolution::analytic(0),
            samples: 8,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlueReport {
    /// Worst residual of the transition equation over sampled points.
    pub iso_residual: f64,
    pub iso_points: usize,
    pub cocycle: CocycleReport,
}

/// Bundle on the union cover `{U_i} ∪ {V^j}` with transitions `f` on `U`-pairs, `g` on
/// `V`-pairs and `h^j_i` from `U_i` to `V^j`. Requires
/// `f(i1 -> i2) = h^{j2}_{i2}^{-1} · g(j1 -> j2) · h^{j1}_{i1}` on every
/// `U_{i1} ∩ U_{i2} ∩ V^{j1} ∩ V^{j2}`, checked at sampled points.
pub fn glue(bu: &BundleData, bv: &BundleData, iso: &BundleIso, opts: &GlueOptions) -> Result<(BundleData, GlueReport)> {
    if bu.rank != bv.rank {
        return Err(Error::RankMismatch {
            left: bu.rank,
            right: bv.rank,
        });
    }
    let nu = bu.cover.len();
    let mut sets = bu.cover.sets.clone();
    sets.extend(bv.cover.sets.iter().cloned());
    let ambient = Region::union(&[&bu.cover.ambient, &bv.cover.ambient])?;
    let cover = Cover::new(ambient, sets)?;
    let k_max = bu.nerve.k_max.max(bv.nerve.k_max).max(3);
    let nerve = build_nerve(&cover, k_max, &opts.resolution)?;

    let mut transitions: Vec<(TransitionKey, MatExpr)> = Vec::new();
    for s in nerve.level(1) {
        let (a, b) = (s.vertices[0], s.vertices[1]);
        let m = if b < nu {
            bu.stored(a, b).cloned().ok_or_else(|| {
                Error::Resolution(format!("overlap {a}-{b} unknown to the first bundle"))
            })?
        } else if a >= nu {
            bv.stored(a - nu, b - nu).cloned().ok_or_else(|| {
                Error::Resolution(format!("overlap {}-{} unknown to the second bundle", a - nu, b - nu))
            })?
        } else {
            iso.maps.get(&(a, b - nu)).cloned().ok_or_else(|| {
                Error::IsoValidation(format!(
                    "no frame change given on the nonempty overlap {} ∩ {}",
                    cover.sets[a].name, cover.sets[b].name
                ))
            })?
        };
        transitions.push((TransitionKey { from: a, to: b }, m));
    }
    let glued = BundleData::new(cover, nerve, bu.rank, transitions)?;

    // Transition equation on every simplex meeting both covers.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut iso_residual: f64 = 0.0;
    let mut iso_points = 0;
    for level in glued.nerve.levels.iter().skip(1) {
        for s in level {
            let us: Vec<usize> = s.vertices.iter().copied().filter(|&v| v < nu).collect();
            let vs: Vec<usize> = s.vertices.iter().copied().filter(|&v| v >= nu).collect();
            if us.is_empty() || vs.is_empty() {
                continue;
            }
            for c in &s.components {
                let pts = sample_component(&glued.cover, &glued.nerve, &s.vertices, c.label, opts.samples, &mut rng)?;
                for z in pts {
                    iso_points += 1;
                    for &i1 in &us {
                        for &i2 in &us {
                            for &j1 in &vs {
                                for &j2 in &vs {
                                    let f = glued.eval_transition(i1, i2, &z)?;
                                    let g = glued.eval_transition(j1, j2, &z)?;
                                    let h1 = glued.eval_transition(i1, j1, &z)?;
                                    let h2 = glued.eval_transition(i2, j2, &z)?;
                                    let rhs = invert(&h2, DET_FLOOR)? * g * h1;
                                    iso_residual = iso_residual.max(max_abs_diff(&f, &rhs));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if !(iso_residual < opts.tol) {
        return Err(Error::IsoValidation(format!(
            "transition equation residual {iso_residual:e} exceeds {:e}",
            opts.tol
        )));
    }
    let cocycle = validate_cocycle(&glued, opts.samples, opts.tol, opts.seed)?;
    if !cocycle.passed {
        return Err(Error::CocycleViolation(format!(
            "glued cocycle residual {:e} (inverse {:e})",
            cocycle.max_residual, cocycle.inverse_residual
        )));
    }
    Ok((
        glued,
        GlueReport {
            iso_residual,
            iso_points,
            cocycle,
        },
    ))
}

/// The bundle over the listed sets (strictly increasing indices), transitions verbatim.
pub fn restrict_to_sets(b: &BundleData, keep: &[usize]) -> Result<BundleData> {
    if keep.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let cover = b.cover.subcover(keep)?;
    let nerve = b.nerve.induced(keep)?;
    let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let t = b
        .transitions()
        .iter()
        .filter(|(k, _)| pos.contains_key(&k.from) && pos.contains_key(&k.to))
        .map(|(k, m)| {
            (
                TransitionKey {
                    from: pos[&k.from],
                    to: pos[&k.to],
                },
                m.clone(),
            )
        });
    BundleData::new(cover, nerve, b.rank, t)
}

/// Cover sets intersected with `sub`, empty ones dropped, nerve rebuilt, transitions kept
/// verbatim on surviving overlaps.
pub fn restrict(b: &BundleData, sub: &Region, resolution: &Resolution) -> Result<BundleData> {
    let sets: Vec<CoverSet> = b
        .cover
        .sets
        .iter()
        .map(|s| {
            let region = Region::intersection(&[&s.region, sub])?;
            Ok(CoverSet {
                name: s.name.clone(),
                region,
                tag: s.tag.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let ambient = Region::intersection(&[&b.cover.ambient, sub])?;
    let cover = Cover::new(ambient, sets)?;
    let nerve = build_nerve(&cover, b.nerve.k_max, resolution)?;
    let alive: Vec<usize> = nerve.level(0).iter().map(|s| s.vertices[0]).collect();
    if alive.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let full = BundleData::new(
        cover,
        nerve.clone(),
        b.rank,
        nerve.level(1).iter().map(|s| {
            let k = TransitionKey {
                from: s.vertices[0],
                to: s.vertices[1],
            };
            (k, b.stored(k.from, k.to).cloned().expect("surviving overlap was an overlap"))
        }),
    )?;
    restrict_to_sets(&full, &alive)
}

/// A holomorphic coordinate change from a new space into the bundle's space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    /// The map from the new space to the old one.
    pub map: CoordMap,
    /// The same map as coordinate expressions, used to compose non-constant transitions.
    pub forward: Option<Vec<HExpr>>,
    /// Where the map is injective with local inverse `map.inverse()`.
    pub domain: Region,
    /// Sampled injectivity checks.
    pub samples: usize,
    pub seed: u64,
}

impl Chart {
    /// `z ↦ exp(i z)` on `domain`.
    pub fn exp_i(domain: Region, samples: usize, seed: u64) -> Self {
        let n = domain.complex_dim();
        let i = HExpr::Const(num_complex::Complex64::i());
        Chart {
            map: CoordMap::ExpI,
            forward: Some(
                (0..n)
                    .map(|j| HExpr::Product(vec![i.clone(), HExpr::Coord(j)]).exp())
                    .collect(),
            ),
            domain,
            samples,
            seed,
        }
    }

    /// `w ↦ -i Log w` on `domain` (the principal local inverse of `exp(i ·)`).
    pub fn log_over_i(domain: Region, samples: usize, seed: u64) -> Self {
        Chart {
            map: CoordMap::LogOverI,
            forward: None,
            domain,
            samples,
            seed,
        }
    }

    /// Samples the domain and checks `inverse(map(z)) = z`.
    pub fn check(&self) -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let inv = self.map.inverse();
        let mut checked = 0;
        for _ in 0..self.samples.saturating_mul(50) {
            if checked >= self.samples {
                break;
            }
            let z = self.domain.bbox.sample(&mut rng);
            if !self.domain.contains(&z)? {
                continue;
            }
            let back = inv.apply(&self.map.apply(&z)?)?;
            if back.dist(&z) > 1e-9 * (1.0 + z.norm_sqr().sqrt()) {
                return Err(Error::ChartViolation(format!(
                    "map is not inverted at {z:?} (round trip gives {back:?})"
                )));
            }
            checked += 1;
        }
        Ok(checked)
    }
}

fn pull_region(r: &Region, chart: &Chart) -> Region {
    Region::new(
        Constraint::And(vec![
            chart.domain.constraint.clone(),
            Constraint::preimage(chart.map, r.constraint.clone()),
        ]),
        chart.domain.bbox.clone(),
    )
}

/// Pulls cover sets, component splits and transitions back along the chart.
pub fn pullback(b: &BundleData, chart: &Chart, resolution: &Resolution) -> Result<BundleData> {
    chart.check()?;
    let inv = chart.map.inverse();
    let sets: Vec<CoverSet> = b
        .cover
        .sets
        .iter()
        .map(|s| {
            let region = pull_region(&s.region, chart);
            let mut seeds = Vec::new();
            for z in &s.tag.seeds {
                if let Ok(w) = inv.apply(z) {
                    if region.contains(&w)? {
                        seeds.push(w);
                    }
                }
            }
            Ok(CoverSet {
                name: s.name.clone(),
                region,
                tag: SetTag {
                    splits: s.tag.splits.iter().map(|sp| sp.mapped(chart.map)).collect(),
                    seeds,
                },
            })
        })
        .collect::<Result<_>>()?;
    let cover = Cover::new(pull_region(&b.cover.ambient, chart), sets)?;
    let nerve = build_nerve(&cover, b.nerve.k_max, resolution)?;
    let mut t = Vec::new();
    for s in nerve.level(1) {
        let k = TransitionKey {
            from: s.vertices[0],
            to: s.vertices[1],
        };
        let m = b.stored(k.from, k.to).ok_or_else(|| {
            Error::ChartViolation(format!("pulled-back overlap {}-{} is not an overlap", k.from, k.to))
        })?;
        let m = if m.uses_coordinates() {
            let subs = chart.forward.as_ref().ok_or_else(|| {
                Error::ChartViolation("chart has no coordinate expressions to compose with".into())
            })?;
            m.substitute(subs)?
        } else {
            m.clone()
        };
        t.push((k, m));
    }
    let alive: Vec<usize> = nerve.level(0).iter().map(|s| s.vertices[0]).collect();
    if alive.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let full = BundleData::new(cover, nerve, b.rank, t)?;
    if alive.len() == full.cover.len() {
        Ok(full)
    } else {
        restrict_to_sets(&full, &alive)
    }
}

/// Points of `z` with a real coordinate shifted, for periodicity checks.
pub fn shift_real_parts(z: &CPoint, shifts: &[f64]) -> CPoint {
    let delta: Vec<num_complex::Complex64> = shifts
        .iter()
        .map(|&s| num_complex::Complex64::new(s, 0.0))
        .collect();
    z.offset(&delta)
}
