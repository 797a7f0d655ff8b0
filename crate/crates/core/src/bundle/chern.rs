//! Exponential-sequence maps at cochain level: pushing integer 1-cocycles to line bundles,
//! extracting first Chern cocycles, and deciding triviality of ±1-valued cocycles.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::data::{BundleData, TransitionKey};
use crate::error::{Error, Result};
use crate::holo::{mon_log, HExpr, MatExpr, MonLog};
use crate::nerve::{
    coboundary, is_coboundary, CellKey, CoboundaryVerdict, Cover, IntCochain, Obstruction,
    ResolvedNerve, Ring,
};

/// Multiplier applied to an integer cocycle before exponentiating.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// `exp(πi c)`
    Half,
    /// `exp(2πi c)`
    Full,
}

fn require_cocycle(nerve: &ResolvedNerve, c: &IntCochain) -> Result<()> {
    if c.degree != 1 || c.ring != Ring::Z {
        return Err(Error::Invalid("expected an integer 1-cochain".into()));
    }
    for (k, _) in c.entries() {
        if !nerve.has_cell(k) {
            return Err(Error::Invalid(format!("cell {k:?} not in the nerve")));
        }
    }
    if !coboundary(nerve, c)?.is_zero() {
        return Err(Error::NotCocycle("δc ≠ 0".into()));
    }
    Ok(())
}

/// Rank-1 bundle with `T(i -> j) = exp(scale · c_{ij})` per component. The values are the
/// exact constants `±1`.
pub fn exp_sequence_push(cover: &Cover, nerve: &ResolvedNerve, c: &IntCochain, scale: Scale) -> Result<BundleData> {
    require_cocycle(nerve, c)?;
    let t = nerve.level(1).iter().map(|s| {
        let pieces: BTreeMap<u32, HExpr> = s
            .components
            .iter()
            .map(|comp| {
                let v = c.value(&s.vertices, comp.label);
                let sign = match scale {
                    Scale::Half if v.rem_euclid(2) == 1 => -1.0,
                    _ => 1.0,
                };
                (comp.label, HExpr::real(sign))
            })
            .collect();
        (
            TransitionKey {
                from: s.vertices[0],
                to: s.vertices[1],
            },
            MatExpr::scalar(HExpr::Piecewise(pieces)),
        )
    });
    BundleData::new(cover.clone(), nerve.clone(), 1, t)
}

/// Log of one edge transition on one component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeLog {
    pub simplex: Vec<usize>,
    pub label: u32,
    pub log: MonLog,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernCocycle {
    pub cochain: IntCochain,
    pub logs: Vec<EdgeLog>,
    /// Largest `|raw - round(raw)|`.
    pub max_rounding: f64,
}

/// `c(ijk, C) = (λ_jk - λ_ik + λ_ij) / 2πi` evaluated at the representative of `C`, where
/// `λ_ab` is a logarithm of `T(a -> b)` on the face component of `C`.
pub fn chern_cocycle(b: &BundleData, tol: f64) -> Result<ChernCocycle> {
    if b.rank != 1 {
        return Err(Error::Invalid("first Chern cocycles are computed for line bundles".into()));
    }
    let mut logs: BTreeMap<CellKey, MonLog> = BTreeMap::new();
    for s in b.nerve.level(1) {
        let e = b
            .stored(s.vertices[0], s.vertices[1])
            .and_then(|m| m.as_scalar())
            .expect("validated edge");
        for c in &s.components {
            let l = mon_log(e, c.label, &c.representative).map_err(|err| match err {
                Error::Shape(m) => Error::Shape(format!("transition on {:?}/{}: {m}", s.vertices, c.label)),
                other => other,
            })?;
            logs.insert(CellKey::new(s.vertices.clone(), c.label), l);
        }
    }
    let mut cochain = IntCochain::zero(2, Ring::Z);
    let mut max_rounding: f64 = 0.0;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    for s in b.nerve.level(2) {
        for c in &s.components {
            let z = &c.representative;
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..3 {
                let mut f = s.vertices.clone();
                f.remove(m);
                let l = &logs[&CellKey::new(f, c.faces[m])];
                let v = l.eval(z)?;
                acc += if m % 2 == 0 { v } else { -v };
            }
            let raw = acc / two_pi_i;
            let rounded = raw.re.round();
            let residual = (raw - rounded).norm();
            if !(residual < tol) {
                return Err(Error::Rounding {
                    simplex: s.vertices.clone(),
                    label: c.label,
                    residual,
                    tol,
                });
            }
            max_rounding = max_rounding.max(residual);
            cochain.set(CellKey::new(s.vertices.clone(), c.label), rounded as i64);
        }
    }
    if b.nerve.k_max >= 3 && !coboundary(&b.nerve, &cochain)?.is_zero() {
        return Err(Error::NotCocycle("Chern cochain is not closed".into()));
    }
    Ok(ChernCocycle {
        cochain,
        logs: logs
            .into_iter()
            .map(|(k, log)| EdgeLog {
                simplex: k.simplex,
                label: k.label,
                log,
            })
            .collect(),
        max_rounding,
    })
}

/// Pointwise product of two line bundles on the same cover and nerve.
pub fn tensor(a: &BundleData, b: &BundleData) -> Result<BundleData> {
    if a.rank != 1 || b.rank != 1 {
        return Err(Error::Invalid("tensor products are formed for line bundles".into()));
    }
    if a.nerve != b.nerve {
        return Err(Error::Invalid("tensor factors must share a nerve".into()));
    }
    let t = a.transitions().iter().map(|(k, m)| {
        let other = b.stored(k.from, k.to).expect("same nerve");
        let e = HExpr::Piecewise(
            a.nerve
                .simplex(&[k.from, k.to])
                .expect("edge")
                .components
                .iter()
                .map(|c| {
                    let x = m.entries[0][0].on_component(c.label).cloned();
                    let y = other.entries[0][0].on_component(c.label).cloned();
                    (c.label, x.and_then(|x| Ok(HExpr::Product(vec![x, y?]))))
                })
                .map(|(l, r)| r.map(|e| (l, e)))
                .collect::<Result<_>>()?,
        );
        Ok((*k, MatExpr::scalar(e)))
    });
    BundleData::new(a.cover.clone(), a.nerve.clone(), 1, t.collect::<Result<Vec<_>>>()?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FlatVerdict {
    /// Signs `s_i` with `T(i -> j) = s_j / s_i` on every overlap component.
    Trivializable { signs: Vec<i8> },
    Obstructed { certificate: Obstruction },
}

impl FlatVerdict {
    pub fn is_trivializable(&self) -> bool {
        matches!(self, FlatVerdict::Trivializable { .. })
    }
}

fn sign_of(e: &HExpr) -> Option<bool> {
    match e {
        HExpr::Const(c) if c.im == 0.0 && c.re == 1.0 => Some(false),
        HExpr::Const(c) if c.im == 0.0 && c.re == -1.0 => Some(true),
        _ => None,
    }
}

/// The `Z/2` cocycle of a line bundle whose transitions are locally constant `±1`.
pub fn sign_cocycle(b: &BundleData) -> Result<IntCochain> {
    if b.rank != 1 {
        return Err(Error::Precondition("sign cocycles need a line bundle".into()));
    }
    let mut c = IntCochain::zero(1, Ring::Z2);
    for s in b.nerve.level(1) {
        let e = &b.stored(s.vertices[0], s.vertices[1]).expect("validated edge").entries[0][0];
        for comp in &s.components {
            let piece = e.on_component(comp.label).map_err(|_| {
                Error::Precondition(format!("no branch for component {} of {:?}", comp.label, s.vertices))
            })?;
            let neg = sign_of(piece).ok_or_else(|| {
                Error::Precondition(format!(
                    "transition on {:?}/{} is not a constant ±1",
                    s.vertices, comp.label
                ))
            })?;
            c.set(CellKey::new(s.vertices.clone(), comp.label), neg as i64);
        }
    }
    Ok(c)
}

/// Solves `T(i -> j) = s_j / s_i` with `s_i ∈ {±1}` as a linear system over `Z/2`.
pub fn flat_class_test(b: &BundleData) -> Result<FlatVerdict> {
    let c = sign_cocycle(b)?;
    Ok(match is_coboundary(&b.nerve, &c)? {
        CoboundaryVerdict::Yes { primitive } => FlatVerdict::Trivializable {
            signs: (0..b.cover.len())
                .map(|i| if primitive.value(&[i], 0) == 1 { -1 } else { 1 })
                .collect(),
        },
        CoboundaryVerdict::No { certificate } => FlatVerdict::Obstructed { certificate },
    })
}
