//! Square matrices of holomorphic expressions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expr::HExpr;
use crate::error::{Error, Result};
use crate::point::CPoint;

/// Default lower bound on `|det|` for matrices declared invertible.
pub const DET_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatExpr {
    pub entries: Vec<Vec<HExpr>>,
}

impl MatExpr {
    pub fn new(entries: Vec<Vec<HExpr>>) -> Result<Self> {
        let r = entries.len();
        if r == 0 || entries.iter().any(|row| row.len() != r) {
            return Err(Error::Invalid("matrix expression must be square and nonempty".into()));
        }
        Ok(MatExpr { entries })
    }

    pub fn scalar(e: HExpr) -> Self {
        MatExpr {
            entries: vec![vec![e]],
        }
    }

    pub fn identity(r: usize) -> Self {
        MatExpr {
            entries: (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| if i == j { HExpr::one() } else { HExpr::real(0.0) })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn as_scalar(&self) -> Option<&HExpr> {
        (self.rank() == 1).then(|| &self.entries[0][0])
    }

    pub fn eval(&self, z: &CPoint, component: Option<u32>) -> Result<DMatrix<Complex64>> {
        let r = self.rank();
        let mut m = DMatrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                m[(i, j)] = self.entries[i][j].eval(z, component)?;
            }
        }
        Ok(m)
    }

    /// Symbolic product `self · other`.
    pub fn mul(&self, other: &MatExpr) -> Result<MatExpr> {
        let r = self.rank();
        if other.rank() != r {
            return Err(Error::RankMismatch {
                left: r,
                right: other.rank(),
            });
        }
        if r == 1 {
            return Ok(MatExpr::scalar(HExpr::Product(vec![
                self.entries[0][0].clone(),
                other.entries[0][0].clone(),
            ])));
        }
        let entries = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        HExpr::Sum(
                            (0..r)
                                .map(|k| {
                                    HExpr::Product(vec![
                                        self.entries[i][k].clone(),
                                        other.entries[k][j].clone(),
                                    ])
                                })
                                .collect(),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(MatExpr { entries })
    }

    /// Structural inverse for rank-1 monomial data.
    pub fn structural_inverse(&self) -> Option<MatExpr> {
        self.as_scalar()
            .and_then(|e| e.structural_inverse())
            .map(MatExpr::scalar)
    }

    pub fn substitute(&self, subs: &[HExpr]) -> Result<MatExpr> {
        Ok(MatExpr {
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e.substitute(subs)).collect::<Result<_>>())
                .collect::<Result<_>>()?,
        })
    }

    pub fn uses_coordinates(&self) -> bool {
        self.entries.iter().flatten().any(|e| e.uses_coordinates())
    }

    pub fn is_piecewise(&self) -> bool {
        self.entries.iter().flatten().any(|e| e.is_piecewise())
    }

    /// `|det|` at `z`, failing if it does not exceed `floor`.
    pub fn check_det(&self, z: &CPoint, component: Option<u32>, floor: f64) -> Result<f64> {
        let d = self.eval(z, component)?.determinant().norm();
        if d > floor && d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Eval(format!("|det| = {d:e} at {z:?} is not above {floor:e}")))
        }
    }
}

/// Numerical inverse, failing on (near-)singular matrices.
pub fn invert(m: &DMatrix<Complex64>, floor: f64) -> Result<DMatrix<Complex64>> {
    if m.determinant().norm() <= floor {
        return Err(Error::Eval("matrix is singular to working precision".into()));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Eval("matrix inversion failed".into()))
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_matches_pointwise() {
        let z = CPoint::new(vec![Complex64::new(1.2, 0.3), Complex64::new(-0.4, 0.9)]).unwrap();
        let a = MatExpr::new(vec![
            vec![HExpr::Coord(0), HExpr::real(1.0)],
            vec![HExpr::real(0.0), HExpr::Coord(1)],
        ])
        .unwrap();
        let b = MatExpr::new(vec![
            vec![HExpr::real(2.0), HExpr::Coord(1)],
            vec![HExpr::Coord(0), HExpr::real(-1.0)],
        ])
        .unwrap();
        let sym = a.mul(&b).unwrap().eval(&z, None).unwrap();
        let num = a.eval(&z, None).unwrap() * b.eval(&z, None).unwrap();
        assert!(max_abs_diff(&sym, &num) < 1e-14);
        assert!(a.check_det(&z, None, DET_FLOOR).is_ok());
        assert!(MatExpr::new(vec![vec![HExpr::one(), HExpr::one()]]).is_err());
    }

    #[test]
    fn identity_evaluates_to_identity() {
        let z = CPoint::from_real(&[0.0, 0.0]).unwrap();
        let i = MatExpr::identity(3).eval(&z, None).unwrap();
        assert_eq!(i, DMatrix::identity(3, 3));
    }
}
