//! Open subsets of `C^n` described by boolean trees of strict inequalities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::scalar::{CoordMap, ScalarExpr};
use crate::error::{Error, Result};
use crate::point::CPoint;

/// Boolean combination of strict inequalities `lhs < rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    True,
    Lt(ScalarExpr, ScalarExpr),
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
    Not(Box<Constraint>),
    /// Holds at `z` iff `inner` holds at `map(z)`; false where `map` is undefined.
    Preimage { map: CoordMap, inner: Box<Constraint> },
}

impl Constraint {
    pub fn eval(&self, z: &CPoint) -> Result<bool> {
        Ok(match self {
            Constraint::True => true,
            Constraint::Lt(a, b) => a.eval(z)? < b.eval(z)?,
            Constraint::And(cs) => {
                for c in cs {
                    if !c.eval(z)? {
                        return Ok(false);
                    }
                }
                true
            }
            Constraint::Or(cs) => {
                for c in cs {
                    if c.eval(z)? {
                        return Ok(true);
                    }
                }
                false
            }
            Constraint::Not(c) => !c.eval(z)?,
            Constraint::Preimage { map, inner } => match map.apply(z) {
                Ok(w) => inner.eval(&w)?,
                Err(Error::Domain(_)) => false,
                Err(e) => return Err(e),
            },
        })
    }

    pub fn lt(a: ScalarExpr, b: ScalarExpr) -> Self {
        Constraint::Lt(a, b)
    }

    pub fn gt(a: ScalarExpr, b: ScalarExpr) -> Self {
        Constraint::Lt(b, a)
    }

    pub fn not(c: Constraint) -> Self {
        Constraint::Not(Box::new(c))
    }

    pub fn preimage(map: CoordMap, inner: Constraint) -> Self {
        Constraint::Preimage {
            map,
            inner: Box::new(inner),
        }
    }
}

/// Axis-aligned box in `R^{2n}`, coordinates ordered `(x_1, y_1, ..., x_n, y_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || !lo.len().is_multiple_of(2) {
            return Err(Error::Invalid("bbox needs matching even-length bounds".into()));
        }
        if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("bbox bounds must be finite".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::Invalid("bbox has lo > hi".into()));
        }
        Ok(BBox { lo, hi })
    }

    /// The cube `center ± half_width` in every real coordinate.
    pub fn cube(center: &CPoint, half_width: f64) -> Self {
        let c = center.to_real();
        BBox {
            lo: c.iter().map(|v| v - half_width).collect(),
            hi: c.iter().map(|v| v + half_width).collect(),
        }
    }

    /// `[-a, a]^{2n}`.
    pub fn symmetric(n: usize, a: f64) -> Self {
        BBox {
            lo: vec![-a; 2 * n],
            hi: vec![a; 2 * n],
        }
    }

    pub fn real_dim(&self) -> usize {
        self.lo.len()
    }

    pub fn complex_dim(&self) -> usize {
        self.lo.len() / 2
    }

    pub fn contains(&self, z: &CPoint) -> bool {
        z.to_real()
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    pub fn intersect(&self, other: &BBox) -> BBox {
        BBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        }
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CPoint {
        let xy: Vec<f64> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| if l == h { *l } else { rng.gen_range(*l..*h) })
            .collect();
        CPoint::from_real(&xy).expect("finite box sample")
    }
}

/// An open subset of `C^n`: a constraint tree plus a finite box that contains it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub constraint: Constraint,
    pub bbox: BBox,
    /// Name of the analytic component labeler attached to this region, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labeler: Option<String>,
}

impl Region {
    pub fn new(constraint: Constraint, bbox: BBox) -> Self {
        Region {
            constraint,
            bbox,
            labeler: None,
        }
    }

    pub fn with_labeler(mut self, name: impl Into<String>) -> Self {
        self.labeler = Some(name.into());
        self
    }

    pub fn with_bbox(mut self, bbox: BBox) -> Self {
        self.bbox = bbox;
        self
    }

    pub fn complex_dim(&self) -> usize {
        self.bbox.complex_dim()
    }

    /// Strict membership: points on a defining hypersurface are outside.
    pub fn contains(&self, z: &CPoint) -> Result<bool> {
        if z.dim() != self.complex_dim() {
            return Err(Error::Invalid(format!(
                "point of dimension {} tested against region of dimension {}",
                z.dim(),
                self.complex_dim()
            )));
        }
        self.constraint.eval(z)
    }

    pub fn intersection(regions: &[&Region]) -> Result<Region> {
        let first = regions
            .first()
            .ok_or_else(|| Error::Invalid("empty intersection list".into()))?;
        let mut bbox = first.bbox.clone();
        for r in &regions[1..] {
            bbox = bbox.intersect(&r.bbox);
        }
        Ok(Region::new(
            Constraint::And(regions.iter().map(|r| r.constraint.clone()).collect()),
            bbox,
        ))
    }

    pub fn union(regions: &[&Region]) -> Result<Region> {
        let first = regions
            .first()
            .ok_or_else(|| Error::Invalid("empty union list".into()))?;
        let mut bbox = first.bbox.clone();
        for r in &regions[1..] {
            bbox = bbox.union(&r.bbox);
        }
        Ok(Region::new(
            Constraint::Or(regions.iter().map(|r| r.constraint.clone()).collect()),
            bbox,
        ))
    }

    /// Points of `self` outside `other` (the box is kept).
    pub fn minus(&self, other: &Region) -> Region {
        Region::new(
            Constraint::And(vec![
                self.constraint.clone(),
                Constraint::not(other.constraint.clone()),
            ]),
            self.bbox.clone(),
        )
    }

    /// Open ball `|z - center| < radius`.
    pub fn ball(center: &CPoint, radius: f64) -> Region {
        Region::new(
            Constraint::lt(
                ScalarExpr::DistSq(center.clone()),
                ScalarExpr::Const(radius * radius),
            ),
            BBox::cube(center, radius),
        )
    }

    /// Rejection sampling inside the box; `None` if nothing is found within `tries`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, tries: usize) -> Result<Option<CPoint>> {
        if self.bbox.is_empty() {
            return Ok(None);
        }
        for _ in 0..tries {
            let z = self.bbox.sample(rng);
            if self.contains(&z)? {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }

    /// Samples `count` points and reports the first one outside the box, if any.
    /// The box is only meaningful if it contains the region.
    pub fn check_bbox_on_samples<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        count: usize,
        spread: f64,
    ) -> Result<Option<CPoint>> {
        let wide = BBox {
            lo: self.bbox.lo.iter().map(|v| v - spread).collect(),
            hi: self.bbox.hi.iter().map(|v| v + spread).collect(),
        };
        for _ in 0..count {
            let z = wide.sample(rng);
            if !self.bbox.contains(&z) && self.contains(&z)? {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ball_membership_is_strict() {
        let c = CPoint::from_real(&[0.0, 0.0]).unwrap();
        let b = Region::ball(&c, 1.0);
        assert!(b.contains(&c).unwrap());
        assert!(!b.contains(&CPoint::from_real(&[1.0, 0.0]).unwrap()).unwrap());
    }

    #[test]
    fn not_of_strict_is_closed() {
        let c = CPoint::from_real(&[0.0, 0.0]).unwrap();
        let b = Region::ball(&c, 1.0);
        let outside = Region::new(Constraint::True, b.bbox.clone()).minus(&b);
        assert!(outside.contains(&CPoint::from_real(&[1.0, 0.0]).unwrap()).unwrap());
    }

    #[test]
    fn preimage_is_false_outside_map_domain() {
        let r = Region::new(
            Constraint::preimage(CoordMap::LogOverI, Constraint::True),
            BBox::symmetric(1, 1.0),
        );
        assert!(!r.contains(&CPoint::from_real(&[0.0, 0.0]).unwrap()).unwrap());
        assert!(r.contains(&CPoint::from_real(&[0.5, 0.0]).unwrap()).unwrap());
    }

    #[test]
    fn ball_bbox_contains_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = Region::ball(&CPoint::from_real(&[1.0, 2.0, -1.0, 0.0]).unwrap(), 0.5);
        assert!(b.check_bbox_on_samples(&mut rng, 2000, 0.5).unwrap().is_none());
    }

    #[test]
    fn dimension_mismatch_is_invalid() {
        let b = Region::ball(&CPoint::from_real(&[0.0, 0.0]).unwrap(), 1.0);
        assert!(b.contains(&CPoint::from_real(&[0.0, 0.0, 0.0, 0.0]).unwrap()).is_err());
    }
}
