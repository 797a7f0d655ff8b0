//! Integer Čech cochains on a resolved nerve and the alternating-sum coboundary.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::nerve::{CellKey, ResolvedNerve};
use super::snf::IntMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ring {
    Z,
    Z2,
}

impl Ring {
    pub fn reduce(&self, v: i64) -> i64 {
        match self {
            Ring::Z => v,
            Ring::Z2 => v.rem_euclid(2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct CochainRepr {
    degree: usize,
    ring: Ring,
    values: Vec<(CellKey, i64)>,
}

/// A k-cochain: one integer per (k-simplex, component). Absent keys read as 0 and zero
/// values are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "CochainRepr", into = "CochainRepr")]
pub struct IntCochain {
    pub degree: usize,
    pub ring: Ring,
    values: BTreeMap<CellKey, i64>,
}

impl From<CochainRepr> for IntCochain {
    fn from(r: CochainRepr) -> Self {
        let mut c = IntCochain::zero(r.degree, r.ring);
        for (k, v) in r.values {
            c.set(k, v);
        }
        c
    }
}

impl From<IntCochain> for CochainRepr {
    fn from(c: IntCochain) -> Self {
        CochainRepr {
            degree: c.degree,
            ring: c.ring,
            values: c.values.into_iter().collect(),
        }
    }
}

impl IntCochain {
    pub fn zero(degree: usize, ring: Ring) -> Self {
        IntCochain {
            degree,
            ring,
            values: BTreeMap::new(),
        }
    }

    /// Builds a cochain from explicit values, rejecting keys absent from the nerve.
    pub fn from_values(
        nerve: &ResolvedNerve,
        degree: usize,
        ring: Ring,
        values: impl IntoIterator<Item = (CellKey, i64)>,
    ) -> Result<Self> {
        let mut c = IntCochain::zero(degree, ring);
        for (k, v) in values {
            if k.simplex.len() != degree + 1 || !nerve.has_cell(&k) {
                return Err(Error::Invalid(format!(
                    "cell {:?}/{} is not a {}-cell of the nerve",
                    k.simplex, k.label, degree
                )));
            }
            c.set(k, v);
        }
        Ok(c)
    }

    /// Values listed in the nerve's canonical cell order.
    pub fn from_vector(nerve: &ResolvedNerve, degree: usize, ring: Ring, v: &[i64]) -> Result<Self> {
        let cells = nerve.cells(degree);
        if cells.len() != v.len() {
            return Err(Error::Invalid(format!(
                "expected {} values for degree {}, got {}",
                cells.len(),
                degree,
                v.len()
            )));
        }
        let mut c = IntCochain::zero(degree, ring);
        for (k, &x) in cells.into_iter().zip(v) {
            c.set(k, x);
        }
        Ok(c)
    }

    /// The same value on every k-cell.
    pub fn constant(nerve: &ResolvedNerve, degree: usize, ring: Ring, value: i64) -> Self {
        let mut c = IntCochain::zero(degree, ring);
        for k in nerve.cells(degree) {
            c.set(k, value);
        }
        c
    }

    pub fn get(&self, key: &CellKey) -> i64 {
        self.values.get(key).copied().unwrap_or(0)
    }

    pub fn value(&self, simplex: &[usize], label: u32) -> i64 {
        self.get(&CellKey::new(simplex.to_vec(), label))
    }

    pub fn set(&mut self, key: CellKey, v: i64) {
        let v = self.ring.reduce(v);
        if v == 0 {
            self.values.remove(&key);
        } else {
            self.values.insert(key, v);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CellKey, &i64)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Dense values in the nerve's canonical cell order.
    pub fn to_vector(&self, nerve: &ResolvedNerve) -> Vec<i64> {
        nerve.cells(self.degree).iter().map(|k| self.get(k)).collect()
    }

    pub fn add(&self, other: &IntCochain) -> Result<IntCochain> {
        if self.degree != other.degree || self.ring != other.ring {
            return Err(Error::Invalid("adding cochains of different degree or ring".into()));
        }
        let mut out = self.clone();
        for (k, v) in &other.values {
            let s = out.get(k).checked_add(*v).ok_or_else(|| Error::Overflow("cochain sum".into()))?;
            out.set(k.clone(), s);
        }
        Ok(out)
    }

    pub fn neg(&self) -> IntCochain {
        let mut out = IntCochain::zero(self.degree, self.ring);
        for (k, v) in &self.values {
            out.set(k.clone(), -v);
        }
        out
    }

    pub fn to_ring(&self, ring: Ring) -> IntCochain {
        let mut out = IntCochain::zero(self.degree, ring);
        for (k, v) in &self.values {
            out.set(k.clone(), *v);
        }
        out
    }
}

/// `(δc)(σ, C) = Σ_m (-1)^m c(σ without vertex m, face_m(C))`.
pub fn coboundary(nerve: &ResolvedNerve, c: &IntCochain) -> Result<IntCochain> {
    let k = c.degree;
    let mut out = IntCochain::zero(k + 1, c.ring);
    for s in nerve.level(k + 1) {
        for comp in &s.components {
            let mut acc: i64 = 0;
            for m in 0..s.vertices.len() {
                let mut f = s.vertices.clone();
                f.remove(m);
                let v = c.value(&f, comp.faces[m]);
                let term = if m % 2 == 0 { v } else { -v };
                acc = acc
                    .checked_add(term)
                    .ok_or_else(|| Error::Overflow("coboundary".into()))?;
            }
            out.set(CellKey::new(s.vertices.clone(), comp.label), acc);
        }
    }
    Ok(out)
}

/// Matrix of `δ: C^k -> C^{k+1}` in canonical cell orders (rows: (k+1)-cells).
pub fn coboundary_matrix(nerve: &ResolvedNerve, k: usize) -> IntMatrix {
    let cols = nerve.cell_index(k);
    let rows = nerve.cells(k + 1);
    let mut m = IntMatrix::zeros(rows.len(), cols.len());
    for (r, key) in rows.iter().enumerate() {
        let comp = nerve
            .component(&key.simplex, key.label)
            .expect("cell listed by the nerve");
        for idx in 0..key.simplex.len() {
            let mut f = key.simplex.clone();
            f.remove(idx);
            let c = cols[&CellKey::new(f, comp.faces[idx])];
            let sign = if idx % 2 == 0 { 1 } else { -1 };
            let cur = m.get(r, c).clone();
            m.set(r, c, cur + BigInt::from(sign));
        }
    }
    m
}
