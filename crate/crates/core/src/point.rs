//! Points of complex affine space stored as complex coordinates.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `C^n`, `z_j = x_j + i y_j`.
///
/// Serialized as the flat real array `[x_1, y_1, ..., x_n, y_n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoint(Vec<Complex64>);

impl CPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid("a point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invalid("point coordinates must be finite".into()));
        }
        Ok(CPoint(coords))
    }

    /// Builds a point from `[x_1, y_1, ..., x_n, y_n]`.
    pub fn from_real(xy: &[f64]) -> Result<Self> {
        if !xy.len().is_multiple_of(2) {
            return Err(Error::Invalid(format!("odd real coordinate count {}", xy.len())));
        }
        CPoint::new(xy.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
    }

    /// The point `(r, r, ..., r)` with real entries.
    pub fn real_diagonal(n: usize, r: f64) -> Result<Self> {
        CPoint::new(vec![Complex64::new(r, 0.0); n])
    }

    /// Point with moduli `exp(u_j)` and arguments `theta_j`.
    pub fn from_log_polar(u: &[f64], theta: &[f64]) -> Result<Self> {
        if u.len() != theta.len() {
            return Err(Error::Invalid("log-polar length mismatch".into()));
        }
        CPoint::new(
            u.iter()
                .zip(theta)
                .map(|(&u, &t)| Complex64::from_polar(u.exp(), t))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn coord(&self, j: usize) -> Complex64 {
        self.0[j]
    }

    pub fn x(&self, j: usize) -> f64 {
        self.0[j].re
    }

    pub fn y(&self, j: usize) -> f64 {
        self.0[j].im
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn dist(&self, other: &CPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &CPoint, t: f64) -> CPoint {
        CPoint(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a * (1.0 - t) + b * t)
                .collect(),
        )
    }

    /// Adds `delta` to real coordinate `k` (`k = 2j` is `x_j`, `k = 2j + 1` is `y_j`).
    pub fn shifted_real(&self, k: usize, delta: f64) -> CPoint {
        let mut c = self.0.clone();
        if k % 2 == 0 {
            c[k / 2].re += delta;
        } else {
            c[k / 2].im += delta;
        }
        CPoint(c)
    }

    pub fn offset(&self, delta: &[Complex64]) -> CPoint {
        CPoint(self.0.iter().zip(delta).map(|(a, d)| a + d).collect())
    }
}

impl Serialize for CPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_real().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let xy = Vec::<f64>::deserialize(d)?;
        CPoint::from_real(&xy).map_err(serde::de::Error::custom)
    }
}
