//! Holomorphic expression trees for transition functions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::CPoint;

/// Expression in the complex coordinates `z_0, ..., z_{n-1}` (0-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case")]
pub enum HExpr {
    Const(Complex64),
    Coord(usize),
    IntPower(Box<HExpr>, i32),
    Product(Vec<HExpr>),
    Sum(Vec<HExpr>),
    Exp(Box<HExpr>),
    /// One expression per connected component of the overlap it is attached to.
    Piecewise(BTreeMap<u32, HExpr>),
}

impl HExpr {
    pub fn one() -> Self {
        HExpr::Const(Complex64::new(1.0, 0.0))
    }

    pub fn real(v: f64) -> Self {
        HExpr::Const(Complex64::new(v, 0.0))
    }

    pub fn coord(j: usize) -> Self {
        HExpr::Coord(j)
    }

    pub fn pow(self, k: i32) -> Self {
        HExpr::IntPower(Box::new(self), k)
    }

    pub fn exp(self) -> Self {
        HExpr::Exp(Box::new(self))
    }

    /// `c * z^k` for an exponent vector `k`, with unit factors omitted.
    pub fn monomial(c: Complex64, exponents: &[i32]) -> Self {
        let mut factors = Vec::new();
        if c != Complex64::new(1.0, 0.0) {
            factors.push(HExpr::Const(c));
        }
        for (j, &k) in exponents.iter().enumerate() {
            match k {
                0 => {}
                1 => factors.push(HExpr::Coord(j)),
                _ => factors.push(HExpr::Coord(j).pow(k)),
            }
        }
        match factors.len() {
            0 => HExpr::one(),
            1 => factors.pop().expect("one factor"),
            _ => HExpr::Product(factors),
        }
    }

    pub fn eval(&self, z: &CPoint, component: Option<u32>) -> Result<Complex64> {
        Ok(match self {
            HExpr::Const(c) => *c,
            HExpr::Coord(j) => {
                if *j >= z.dim() {
                    return Err(Error::Eval(format!("coordinate {j} in dimension {}", z.dim())));
                }
                z.coord(*j)
            }
            HExpr::IntPower(b, k) => {
                let v = b.eval(z, component)?;
                if *k < 0 && v.norm_sqr() == 0.0 {
                    return Err(Error::Domain(format!("zero raised to the power {k}")));
                }
                v.powi(*k)
            }
            HExpr::Product(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in fs {
                    acc *= f.eval(z, component)?;
                }
                acc
            }
            HExpr::Sum(ts) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in ts {
                    acc += t.eval(z, component)?;
                }
                acc
            }
            HExpr::Exp(e) => e.eval(z, component)?.exp(),
            HExpr::Piecewise(map) => {
                let c = component
                    .ok_or_else(|| Error::Eval("piecewise expression needs a component".into()))?;
                map.get(&c)
                    .ok_or_else(|| Error::Eval(format!("piecewise expression has no branch {c}")))?
                    .eval(z, component)?
            }
        })
    }

    pub fn is_piecewise(&self) -> bool {
        match self {
            HExpr::Piecewise(_) => true,
            HExpr::Const(_) | HExpr::Coord(_) => false,
            HExpr::IntPower(b, _) | HExpr::Exp(b) => b.is_piecewise(),
            HExpr::Product(v) | HExpr::Sum(v) => v.iter().any(|e| e.is_piecewise()),
        }
    }

    /// Keys of a top-level piecewise expression.
    pub fn piece_labels(&self) -> Option<Vec<u32>> {
        match self {
            HExpr::Piecewise(m) => Some(m.keys().copied().collect()),
            _ => None,
        }
    }

    /// The expression seen on one component (top-level piecewise resolved).
    pub fn on_component(&self, label: u32) -> Result<&HExpr> {
        match self {
            HExpr::Piecewise(m) => m
                .get(&label)
                .ok_or_else(|| Error::Eval(format!("piecewise expression has no branch {label}"))),
            e => Ok(e),
        }
    }

    pub fn uses_coordinates(&self) -> bool {
        match self {
            HExpr::Const(_) => false,
            HExpr::Coord(_) => true,
            HExpr::IntPower(b, _) | HExpr::Exp(b) => b.uses_coordinates(),
            HExpr::Product(v) | HExpr::Sum(v) => v.iter().any(|e| e.uses_coordinates()),
            HExpr::Piecewise(m) => m.values().any(|e| e.uses_coordinates()),
        }
    }

    /// Replaces every `Coord(j)` by `subs[j]`.
    pub fn substitute(&self, subs: &[HExpr]) -> Result<HExpr> {
        Ok(match self {
            HExpr::Const(c) => HExpr::Const(*c),
            HExpr::Coord(j) => subs
                .get(*j)
                .cloned()
                .ok_or_else(|| Error::Eval(format!("no substitution for coordinate {j}")))?,
            HExpr::IntPower(b, k) => HExpr::IntPower(Box::new(b.substitute(subs)?), *k),
            HExpr::Product(v) => HExpr::Product(v.iter().map(|e| e.substitute(subs)).collect::<Result<_>>()?),
            HExpr::Sum(v) => HExpr::Sum(v.iter().map(|e| e.substitute(subs)).collect::<Result<_>>()?),
            HExpr::Exp(e) => HExpr::Exp(Box::new(e.substitute(subs)?)),
            HExpr::Piecewise(m) => HExpr::Piecewise(
                m.iter()
                    .map(|(k, e)| Ok((*k, e.substitute(subs)?)))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    /// Structural check for expressions declared nowhere-vanishing: no zero constant
    /// factors, and no sums (whose zeros cannot be ruled out structurally).
    pub fn check_nonvanishing(&self) -> Result<()> {
        match self {
            HExpr::Const(c) if c.norm_sqr() == 0.0 => {
                Err(Error::Invalid("zero constant in a nonvanishing expression".into()))
            }
            HExpr::Const(_) | HExpr::Coord(_) | HExpr::Exp(_) => Ok(()),
            HExpr::IntPower(b, _) => b.check_nonvanishing(),
            HExpr::Product(v) => v.iter().try_for_each(|e| e.check_nonvanishing()),
            HExpr::Sum(_) => Err(Error::Invalid(
                "sums are not admitted in nonvanishing expressions".into(),
            )),
            HExpr::Piecewise(m) => m.values().try_for_each(|e| e.check_nonvanishing()),
        }
    }

    /// Inverse of a nonvanishing product-of-powers expression, built structurally.
    pub fn structural_inverse(&self) -> Option<HExpr> {
        Some(match self {
            HExpr::Const(c) if c.norm_sqr() > 0.0 => {
                let inv = c.inv();
                // keep +-1 exact
                HExpr::Const(if c.im == 0.0 && c.re.abs() == 1.0 { *c } else { inv })
            }
            HExpr::Coord(_) => self.clone().pow(-1),
            HExpr::IntPower(b, k) => HExpr::IntPower(b.clone(), k.checked_neg()?),
            HExpr::Product(v) => HExpr::Product(v.iter().map(|e| e.structural_inverse()).collect::<Option<_>>()?),
            HExpr::Exp(e) => HExpr::Exp(Box::new(HExpr::Product(vec![HExpr::real(-1.0), (**e).clone()]))),
            HExpr::Piecewise(m) => HExpr::Piecewise(
                m.iter()
                    .map(|(k, e)| Some((*k, e.structural_inverse()?)))
                    .collect::<Option<_>>()?,
            ),
            _ => return None,
        })
    }
}

/// `max_j |∂f/∂z̄_j|` estimated by central differences with step `h`.
pub fn holomorphy_residual_fn<F>(f: F, z: &CPoint, h: f64) -> Result<f64>
where
    F: Fn(&CPoint) -> Result<Complex64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Invalid(format!("finite-difference step must be positive, got {h}")));
    }
    let mut worst: f64 = 0.0;
    for j in 0..z.dim() {
        let shift = |d: Complex64| {
            let mut delta = vec![Complex64::new(0.0, 0.0); z.dim()];
            delta[j] = d;
            z.offset(&delta)
        };
        let dx = (f(&shift(Complex64::new(h, 0.0)))? - f(&shift(Complex64::new(-h, 0.0)))?) / (2.0 * h);
        let dy = (f(&shift(Complex64::new(0.0, h)))? - f(&shift(Complex64::new(0.0, -h)))?) / (2.0 * h);
        let dbar = 0.5 * (dx + Complex64::i() * dy);
        worst = worst.max(dbar.norm());
    }
    Ok(worst)
}

pub fn holomorphy_residual(e: &HExpr, z: &CPoint, h: f64, component: Option<u32>) -> Result<f64> {
    holomorphy_residual_fn(|w| e.eval(w, component), z, h)
}

/// Argument of `c` in the window `(center - pi, center + pi]`.
pub fn arg_near(c: Complex64, center: f64) -> f64 {
    let a = c.arg();
    let k = ((center - a) / (2.0 * PI)).round();
    let mut v = a + 2.0 * PI * k;
    if v <= center - PI {
        v += 2.0 * PI;
    } else if v > center + PI {
        v -= 2.0 * PI;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[(f64, f64)]) -> CPoint {
        CPoint::new(c.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn eval_examples() {
        let z = pt(&[(2.0, 0.0), (1.5, 0.5)]);
        assert_eq!(HExpr::real(-1.0).eval(&z, None).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(HExpr::Coord(1).eval(&z, None).unwrap(), Complex64::new(1.5, 0.5));
        let e = HExpr::Const(Complex64::new(0.0, 2.0 * PI)).exp();
        assert!((e.eval(&z, None).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn piecewise_needs_component() {
        let e = HExpr::Piecewise(BTreeMap::from([(0, HExpr::one()), (1, HExpr::real(-1.0))]));
        let z = pt(&[(1.0, 0.0)]);
        assert!(matches!(e.eval(&z, None), Err(Error::Eval(_))));
        assert_eq!(e.eval(&z, Some(1)).unwrap().re, -1.0);
        assert!(e.eval(&z, Some(7)).is_err());
    }

    #[test]
    fn negative_power_of_zero_is_rejected() {
        let z = pt(&[(0.0, 0.0)]);
        assert!(matches!(HExpr::Coord(0).pow(-1).eval(&z, None), Err(Error::Domain(_))));
    }

    #[test]
    fn holomorphic_residuals() {
        let z = pt(&[(0.7, -0.2), (1.1, 0.4)]);
        let prod = HExpr::Product(vec![HExpr::Coord(0), HExpr::Coord(1)]);
        assert!(holomorphy_residual(&prod, &z, 1e-4, None).unwrap() < 1e-6);
        assert_eq!(holomorphy_residual(&HExpr::real(3.0), &z, 1e-4, None).unwrap(), 0.0);
        let modulus = |w: &CPoint| Ok(Complex64::new(w.coord(0).norm(), 0.0));
        assert!(holomorphy_residual_fn(modulus, &z, 1e-4).unwrap() > 1e-3);
        assert!(holomorphy_residual(&prod, &z, 0.0, None).is_err());
    }

    #[test]
    fn structural_inverse_multiplies_to_one() {
        let z = pt(&[(0.7, -0.2), (1.1, 0.4)]);
        let e = HExpr::monomial(Complex64::new(2.0, 1.0), &[2, -3]);
        let inv = e.structural_inverse().unwrap();
        let p = e.eval(&z, None).unwrap() * inv.eval(&z, None).unwrap();
        assert!((p - 1.0).norm() < 1e-12);
        assert!(HExpr::Sum(vec![]).structural_inverse().is_none());
    }

    #[test]
    fn arg_window() {
        let c = Complex64::new(-1.0, -1e-9);
        assert!((arg_near(c, PI) - (PI + 1e-9)).abs() < 1e-12);
        assert!((arg_near(c, 0.0) + PI).abs() < 1e-6);
    }

    #[test]
    fn json_round_trip() {
        let e = HExpr::Piecewise(BTreeMap::from([(0, HExpr::one()), (1, HExpr::Coord(1).pow(-1))]));
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<HExpr>(&s).unwrap(), e);
    }
}
