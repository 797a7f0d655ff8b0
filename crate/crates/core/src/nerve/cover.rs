//! Finite open covers with analytic component tags.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CoordMap, Region, ScalarExpr};
use crate::point::CPoint;

/// One binary split used to tell overlap components apart.
///
/// When the members of a simplex carry the same `bit` with at least two different `side`s,
/// their intersection falls apart along `discriminant = 0`, and bit `bit` of the component
/// label is `discriminant(z) > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub bit: u8,
    pub side: u8,
    pub discriminant: ScalarExpr,
}

impl Split {
    pub fn mapped(&self, map: CoordMap) -> Split {
        Split {
            bit: self.bit,
            side: self.side,
            discriminant: self.discriminant.clone().mapped(map),
        }
    }
}

/// Analytic metadata of a cover set: its splits and a few known interior points.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SetTag {
    #[serde(default)]
    pub splits: Vec<Split>,
    /// Points of the set, used first when looking for component representatives.
    #[serde(default)]
    pub seeds: Vec<CPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSet {
    pub name: String,
    pub region: Region,
    #[serde(default)]
    pub tag: SetTag,
}

impl CoverSet {
    pub fn new(name: impl Into<String>, region: Region) -> Self {
        CoverSet {
            name: name.into(),
            region,
            tag: SetTag::default(),
        }
    }

    pub fn with_tag(mut self, tag: SetTag) -> Self {
        self.tag = tag;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub ambient: Region,
    pub sets: Vec<CoverSet>,
}

impl Cover {
    /// Checks names are unique, dimensions agree, and splits sharing a bit share a
    /// discriminant.
    pub fn new(ambient: Region, sets: Vec<CoverSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Invalid("a cover needs at least one set".into()));
        }
        if sets.len() > 64 {
            return Err(Error::Invalid("covers are limited to 64 sets".into()));
        }
        let n = ambient.complex_dim();
        let mut names = BTreeSet::new();
        let mut discriminants: BTreeMap<u8, &ScalarExpr> = BTreeMap::new();
        for s in &sets {
            if !names.insert(s.name.as_str()) {
                return Err(Error::NameCollision(s.name.clone()));
            }
            if s.region.complex_dim() != n {
                return Err(Error::Invalid(format!(
                    "set {} has dimension {}, ambient has {}",
                    s.name,
                    s.region.complex_dim(),
                    n
                )));
            }
            for sp in &s.tag.splits {
                if sp.bit >= 32 {
                    return Err(Error::Invalid("split bits must be < 32".into()));
                }
                match discriminants.get(&sp.bit) {
                    Some(d) if **d != sp.discriminant => {
                        return Err(Error::Invalid(format!(
                            "split bit {} has two different discriminants",
                            sp.bit
                        )))
                    }
                    _ => {
                        discriminants.insert(sp.bit, &sp.discriminant);
                    }
                }
            }
        }
        Ok(Cover { ambient, sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn complex_dim(&self) -> usize {
        self.ambient.complex_dim()
    }

    pub fn names(&self) -> Vec<String> {
        self.sets.iter().map(|s| s.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.sets.iter().position(|s| s.name == name)
    }

    /// `U_{i0} ∩ ... ∩ U_{ik}` with the intersected box.
    pub fn intersection(&self, simplex: &[usize]) -> Result<Region> {
        let regions: Vec<&Region> = simplex.iter().map(|&i| &self.sets[i].region).collect();
        Region::intersection(&regions)
    }

    /// Split bits that separate components of the simplex's intersection, with their
    /// discriminants, in increasing bit order.
    pub fn active_splits(&self, simplex: &[usize]) -> Vec<(u8, &ScalarExpr)> {
        let mut sides: BTreeMap<u8, (BTreeSet<u8>, &ScalarExpr)> = BTreeMap::new();
        for &i in simplex {
            for sp in &self.sets[i].tag.splits {
                sides
                    .entry(sp.bit)
                    .or_insert_with(|| (BTreeSet::new(), &sp.discriminant))
                    .0
                    .insert(sp.side);
            }
        }
        sides
            .into_iter()
            .filter(|(_, (s, _))| s.len() >= 2)
            .map(|(bit, (_, d))| (bit, d))
            .collect()
    }

    pub fn has_labeler(&self, simplex: &[usize]) -> bool {
        !self.active_splits(simplex).is_empty()
    }

    /// Analytic component label of `z` in the simplex's intersection (0 when the
    /// intersection is not split).
    pub fn label(&self, simplex: &[usize], z: &CPoint) -> Result<u32> {
        let mut label = 0u32;
        for (bit, d) in self.active_splits(simplex) {
            if d.eval(z)? > 0.0 {
                label |= 1 << bit;
            }
        }
        Ok(label)
    }

    /// Samples the ambient box and returns the first in-ambient point lying in no set.
    pub fn find_uncovered(&self, samples: usize, seed: u64) -> Result<Option<CPoint>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let z = self.ambient.bbox.sample(&mut rng);
            if !self.ambient.contains(&z)? {
                continue;
            }
            let mut covered = false;
            for s in &self.sets {
                if s.region.contains(&z)? {
                    covered = true;
                    break;
                }
            }
            if !covered {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }

    /// Samples each set's box and returns the first point of a set outside the ambient.
    pub fn find_escaping(&self, samples: usize, seed: u64) -> Result<Option<(String, CPoint)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in &self.sets {
            for _ in 0..samples {
                let z = s.region.bbox.sample(&mut rng);
                if s.region.contains(&z)? && !self.ambient.contains(&z)? {
                    return Ok(Some((s.name.clone(), z)));
                }
            }
        }
        Ok(None)
    }

    /// The cover formed by the listed sets, in the given order.
    pub fn subcover(&self, keep: &[usize]) -> Result<Cover> {
        let sets: Vec<CoverSet> = keep.iter().map(|&i| self.sets[i].clone()).collect();
        let regions: Vec<&Region> = sets.iter().map(|s| &s.region).collect();
        let mut ambient = Region::union(&regions)?;
        ambient.constraint = crate::geometry::Constraint::And(vec![
            self.ambient.constraint.clone(),
            ambient.constraint,
        ]);
        Cover::new(ambient, sets)
    }
}
