//! Real-valued expression trees used to define regions by strict inequalities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::CPoint;

/// Holomorphic coordinate changes that regions and expressions can be pulled back along.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordMap {
    /// `w_j = exp(i z_j)`.
    ExpI,
    /// `z_j = -i Log(w_j)` with the principal logarithm, the local inverse of `ExpI`
    /// taking values in `-pi < x_j <= pi`.
    LogOverI,
}

impl CoordMap {
    pub fn apply(&self, z: &CPoint) -> Result<CPoint> {
        let i = Complex64::i();
        match self {
            CoordMap::ExpI => CPoint::new(z.coords().iter().map(|c| (i * c).exp()).collect()),
            CoordMap::LogOverI => {
                if z.coords().iter().any(|c| c.norm_sqr() == 0.0) {
                    return Err(Error::Domain("Log(w) at w = 0".into()));
                }
                CPoint::new(z.coords().iter().map(|c| -i * c.ln()).collect())
            }
        }
    }

    pub fn inverse(&self) -> CoordMap {
        match self {
            CoordMap::ExpI => CoordMap::LogOverI,
            CoordMap::LogOverI => CoordMap::ExpI,
        }
    }
}

/// Scalar expression in the real coordinates of a point.
///
/// `Rho` and `RhoGradNorm` take the value `+inf` on the coordinate hyperplanes, which is the
/// limit of both functions there; `LogModulus` has no such extension and reports a domain error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarExpr {
    Const(f64),
    X(usize),
    Y(usize),
    Modulus(usize),
    LogModulus(usize),
    /// `sum_j (log|z_j|)^2`.
    Rho,
    /// Euclidean norm of the real gradient of `Rho`, `(sum_j 4 (log|z_j|)^2 / |z_j|^2)^(1/2)`.
    RhoGradNorm,
    /// `sum_j |z_j|^2`.
    NormSq,
    /// `sum_j |z_j - c_j|^2`.
    DistSq(CPoint),
    Sum(Vec<ScalarExpr>),
    Product(Vec<ScalarExpr>),
    Pow(Box<ScalarExpr>, f64),
    Abs(Box<ScalarExpr>),
    Affine {
        constant: f64,
        terms: Vec<(f64, ScalarExpr)>,
    },
    /// The inner expression evaluated at `map(z)`.
    Mapped {
        map: CoordMap,
        expr: Box<ScalarExpr>,
    },
}

impl ScalarExpr {
    pub fn eval(&self, z: &CPoint) -> Result<f64> {
        let v = self.eval_raw(z)?;
        if v.is_nan() {
            return Err(Error::Domain(format!("expression {self:?} is undefined here")));
        }
        Ok(v)
    }

    fn eval_raw(&self, z: &CPoint) -> Result<f64> {
        let check = |j: usize| {
            if j >= z.dim() {
                Err(Error::Invalid(format!("coordinate {j} out of range for dimension {}", z.dim())))
            } else {
                Ok(())
            }
        };
        Ok(match self {
            ScalarExpr::Const(c) => *c,
            ScalarExpr::X(j) => {
                check(*j)?;
                z.x(*j)
            }
            ScalarExpr::Y(j) => {
                check(*j)?;
                z.y(*j)
            }
            ScalarExpr::Modulus(j) => {
                check(*j)?;
                z.coord(*j).norm()
            }
            ScalarExpr::LogModulus(j) => {
                check(*j)?;
                let r = z.coord(*j).norm();
                if r == 0.0 {
                    return Err(Error::Domain(format!("log|z_{}| at z_{} = 0", j + 1, j + 1)));
                }
                r.ln()
            }
            ScalarExpr::Rho => z
                .coords()
                .iter()
                .map(|c| {
                    let r = c.norm();
                    if r == 0.0 {
                        f64::INFINITY
                    } else {
                        r.ln().powi(2)
                    }
                })
                .sum(),
            ScalarExpr::RhoGradNorm => z
                .coords()
                .iter()
                .map(|c| {
                    let r = c.norm();
                    if r == 0.0 {
                        f64::INFINITY
                    } else {
                        4.0 * r.ln().powi(2) / (r * r)
                    }
                })
                .sum::<f64>()
                .sqrt(),
            ScalarExpr::NormSq => z.norm_sqr(),
            ScalarExpr::DistSq(c) => {
                if c.dim() != z.dim() {
                    return Err(Error::Invalid("DistSq center dimension mismatch".into()));
                }
                c.coords()
                    .iter()
                    .zip(z.coords())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum()
            }
            ScalarExpr::Sum(items) => {
                let mut acc = 0.0;
                for e in items {
                    acc += e.eval_raw(z)?;
                }
                acc
            }
            ScalarExpr::Product(items) => {
                let mut acc = 1.0;
                for e in items {
                    acc *= e.eval_raw(z)?;
                }
                acc
            }
            ScalarExpr::Pow(base, p) => base.eval_raw(z)?.powf(*p),
            ScalarExpr::Abs(e) => e.eval_raw(z)?.abs(),
            ScalarExpr::Affine { constant, terms } => {
                let mut acc = *constant;
                for (w, e) in terms {
                    acc += w * e.eval_raw(z)?;
                }
                acc
            }
            ScalarExpr::Mapped { map, expr } => expr.eval_raw(&map.apply(z)?)?,
        })
    }

    pub fn constant(c: f64) -> Self {
        ScalarExpr::Const(c)
    }

    pub fn scaled(self, w: f64) -> Self {
        ScalarExpr::Affine {
            constant: 0.0,
            terms: vec![(w, self)],
        }
    }

    pub fn abs(self) -> Self {
        ScalarExpr::Abs(Box::new(self))
    }

    pub fn pow(self, p: f64) -> Self {
        ScalarExpr::Pow(Box::new(self), p)
    }

    pub fn mapped(self, map: CoordMap) -> Self {
        ScalarExpr::Mapped {
            map,
            expr: Box::new(self),
        }
    }

    /// `a - b` as an affine combination.
    pub fn minus(a: ScalarExpr, b: ScalarExpr) -> Self {
        ScalarExpr::Affine {
            constant: 0.0,
            terms: vec![(1.0, a), (-1.0, b)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(xy: &[f64]) -> CPoint {
        CPoint::from_real(xy).unwrap()
    }

    #[test]
    fn rho_is_infinite_on_axes_but_log_modulus_errors() {
        let z = pt(&[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(ScalarExpr::Rho.eval(&z).unwrap(), f64::INFINITY);
        assert!(matches!(ScalarExpr::LogModulus(0).eval(&z), Err(Error::Domain(_))));
        assert_eq!(ScalarExpr::LogModulus(1).eval(&z).unwrap(), 0.0);
    }

    #[test]
    fn nan_results_are_domain_errors() {
        let z = pt(&[0.0, 0.0]);
        let e = ScalarExpr::minus(ScalarExpr::Rho, ScalarExpr::Rho);
        assert!(matches!(e.eval(&z), Err(Error::Domain(_))));
    }

    #[test]
    fn affine_and_abs() {
        let z = pt(&[3.0, -4.0]);
        let e = ScalarExpr::Affine {
            constant: 1.0,
            terms: vec![(2.0, ScalarExpr::Y(0).abs()), (-1.0, ScalarExpr::Modulus(0))],
        };
        assert_eq!(e.eval(&z).unwrap(), 1.0 + 8.0 - 5.0);
    }

    #[test]
    fn mapped_expression_reads_preimage_coordinates() {
        // y_1 of -i Log(w) is -log|w_1|.
        let w = pt(&[0.0, std::f64::consts::E]);
        let e = ScalarExpr::Y(0).mapped(CoordMap::LogOverI);
        assert!((e.eval(&w).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn coordinate_maps_invert_on_the_principal_strip() {
        let z = pt(&[0.7, -0.3, -2.5, 0.9]);
        let w = CoordMap::ExpI.apply(&z).unwrap();
        let back = CoordMap::LogOverI.apply(&w).unwrap();
        assert!(back.dist(&z) < 1e-14);
    }
}
