//! Logarithms of monomial expressions `c · Π z_j^{k_j}` on a component.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::expr::{arg_near, HExpr};
use crate::error::{Error, Result};
use crate::point::CPoint;

/// `log c + Σ k_j (log|z_j| + i arg z_j)`, with `arg z_j` taken in the window of width
/// `2π` centred at `branch_center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonLog {
    pub log_const: Complex64,
    pub terms: Vec<MonLogTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonLogTerm {
    pub coord: usize,
    pub power: i32,
    pub branch_center: f64,
}

impl MonLog {
    pub fn eval(&self, z: &CPoint) -> Result<Complex64> {
        let mut acc = self.log_const;
        for t in &self.terms {
            let c = z.coord(t.coord);
            if c.norm_sqr() == 0.0 {
                return Err(Error::Domain(format!("log z_{} at z_{} = 0", t.coord, t.coord)));
            }
            acc += t.power as f64 * Complex64::new(c.norm().ln(), arg_near(c, t.branch_center));
        }
        Ok(acc)
    }

    /// Integer offset (in units of `2πi`) of each branch relative to the principal one at `z`.
    pub fn branch_offsets(&self, z: &CPoint) -> Vec<i64> {
        self.terms
            .iter()
            .map(|t| {
                let c = z.coord(t.coord);
                ((arg_near(c, t.branch_center) - c.arg()) / (2.0 * PI)).round() as i64
            })
            .collect()
    }
}

/// Collects `(log c, exponents)` of a monomial expression, `None` if not monomial.
fn monomial_parts(e: &HExpr, exps: &mut Vec<(usize, i32)>) -> Result<Complex64> {
    Ok(match e {
        HExpr::Const(c) => {
            if c.norm_sqr() == 0.0 {
                return Err(Error::Shape("log of zero".into()));
            }
            // exact for +-1, principal otherwise
            if c.im == 0.0 && c.re == 1.0 {
                Complex64::new(0.0, 0.0)
            } else if c.im == 0.0 && c.re == -1.0 {
                Complex64::new(0.0, PI)
            } else {
                c.ln()
            }
        }
        HExpr::Exp(inner) => match inner.as_ref() {
            HExpr::Const(c) => *c,
            _ => return Err(Error::Shape("exp of a non-constant".into())),
        },
        HExpr::Coord(j) => {
            exps.push((*j, 1));
            Complex64::new(0.0, 0.0)
        }
        HExpr::IntPower(b, k) => {
            let mut inner = Vec::new();
            let l = monomial_parts(b, &mut inner)?;
            for (j, p) in inner {
                exps.push((j, p.checked_mul(*k).ok_or_else(|| Error::Shape("exponent overflow".into()))?));
            }
            l * *k as f64
        }
        HExpr::Product(fs) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for f in fs {
                acc += monomial_parts(f, exps)?;
            }
            acc
        }
        HExpr::Sum(_) => return Err(Error::Shape("sum".into())),
        HExpr::Piecewise(_) => return Err(Error::Shape("nested piecewise".into())),
    })
}

/// Number of perturbed points used to validate a logarithm.
pub const MONLOG_CHECKS: usize = 32;

/// A logarithm of `e` on the component `label`, with branch windows centred at the
/// representative's arguments. Validated at the representative and at
/// [`MONLOG_CHECKS`] nearby points (relative perturbation `1e-3`).
pub fn mon_log(e: &HExpr, label: u32, representative: &CPoint) -> Result<MonLog> {
    let branch = e.on_component(label)?;
    let mut raw = Vec::new();
    let log_const = monomial_parts(branch, &mut raw)?;
    let mut powers: std::collections::BTreeMap<usize, i32> = Default::default();
    for (j, k) in raw {
        if j >= representative.dim() {
            return Err(Error::Shape(format!("coordinate {j} out of range")));
        }
        *powers.entry(j).or_insert(0) += k;
    }
    let terms = powers
        .into_iter()
        .filter(|&(_, k)| k != 0)
        .map(|(coord, power)| MonLogTerm {
            coord,
            power,
            branch_center: representative.coord(coord).arg(),
        })
        .collect();
    let ml = MonLog { log_const, terms };

    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6f6e6c6f67);
    let check = |z: &CPoint| -> Result<()> {
        let want = e.eval(z, Some(label))?;
        let got = ml.eval(z)?.exp();
        if (got - want).norm() > 1e-10 * want.norm().max(1.0) {
            return Err(Error::Branch(format!(
                "exp(log) = {got} but the expression is {want} at {z:?}"
            )));
        }
        Ok(())
    };
    check(representative)?;
    for _ in 0..MONLOG_CHECKS {
        let delta: Vec<Complex64> = representative
            .coords()
            .iter()
            .map(|c| {
                let s = 1e-3 * c.norm().max(1.0);
                Complex64::new(rng.gen_range(-s..s), rng.gen_range(-s..s))
            })
            .collect();
        check(&representative.offset(&delta))?;
    }
    Ok(ml)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn pt(c: &[(f64, f64)]) -> CPoint {
        CPoint::new(c.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn minus_one_on_upper_component() {
        let f = HExpr::Piecewise(BTreeMap::from([(0, HExpr::one()), (1, HExpr::real(-1.0))]));
        let z = pt(&[(0.0, 0.5), (0.0, 0.0)]);
        let l = mon_log(&f, 1, &z).unwrap();
        assert_eq!(l.eval(&z).unwrap(), Complex64::new(0.0, PI));
        assert_eq!(mon_log(&f, 0, &z).unwrap().eval(&z).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn coordinate_log_is_principal_near_positive_axis() {
        let p = pt(&[(2.03, 0.0), (2.03, 0.0)]);
        let l = mon_log(&HExpr::Coord(1), 0, &p).unwrap();
        assert!((l.eval(&p).unwrap() - p.coord(1).ln()).norm() < 1e-15);
        assert_eq!(l.branch_offsets(&p), vec![0]);
    }

    #[test]
    fn branch_follows_representative_across_the_cut() {
        let rep = pt(&[(-1.0, 0.0)]);
        let l = mon_log(&HExpr::Coord(0), 0, &rep).unwrap();
        let below = pt(&[(-1.0, -0.01)]);
        assert!(l.eval(&below).unwrap().im > 3.0);
        assert_eq!(l.branch_offsets(&below), vec![1]);
    }

    #[test]
    fn non_monomials_are_shape_errors() {
        let z = pt(&[(1.0, 0.0)]);
        let s = HExpr::Sum(vec![HExpr::Coord(0), HExpr::one()]);
        assert!(matches!(mon_log(&s, 0, &z), Err(Error::Shape(_))));
        assert!(matches!(mon_log(&HExpr::Coord(0).exp(), 0, &z), Err(Error::Shape(_))));
    }
}
