//! Čech cohomology of resolved nerves with `Z` and `Z/2` coefficients, and exact
//! coboundary decisions with checkable certificates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::cochain::{coboundary, coboundary_matrix, IntCochain, Ring};
use super::nerve::{CellKey, ResolvedNerve};
use super::snf::{smith_divisors, smith_normal_form, IntMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyResult {
    pub degree: usize,
    pub ring: Ring,
    /// Free rank over `Z`, or dimension over `Z/2`.
    pub rank: usize,
    /// Elementary divisors greater than one (decimal), `Z` only.
    pub torsion: Vec<String>,
    /// Dimension of `C^k`.
    pub cochain_dim: usize,
    /// Rank of `δ: C^{k-1} -> C^k`.
    pub image_rank: usize,
    /// Rank of `δ: C^k -> C^{k+1}`.
    pub cocycle_corank: usize,
    /// Cocycles whose classes generate the free part (`Z` only, on request).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<IntCochain>>,
}

fn require_degree(nerve: &ResolvedNerve, k: usize) -> Result<()> {
    if k + 1 > nerve.k_max {
        return Err(Error::Invalid(format!(
            "H^{k} needs the nerve built to degree {} (built to {})",
            k + 1,
            nerve.k_max
        )));
    }
    Ok(())
}

fn to_i64(v: &BigInt, what: &str) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::Overflow(format!("{what} does not fit in i64")))
}

fn vec_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `H^k = ker δ^k / im δ^{k-1}`.
pub fn cohomology(nerve: &ResolvedNerve, k: usize, ring: Ring, generators: bool) -> Result<CohomologyResult> {
    require_degree(nerve, k)?;
    let n = nerve.cell_count(k);
    let d_out = coboundary_matrix(nerve, k);
    match ring {
        Ring::Z => {
            let (image_rank, torsion) = if k == 0 {
                (0, Vec::new())
            } else {
                let s = smith_divisors(&coboundary_matrix(nerve, k - 1));
                (s.rank(), s.torsion().iter().map(|d| d.to_string()).collect())
            };
            let out_rank = smith_divisors(&d_out).rank();
            let rank = n - out_rank - image_rank;
            let gens = if generators {
                Some(free_generators(nerve, k, &d_out, rank)?)
            } else {
                None
            };
            Ok(CohomologyResult {
                degree: k,
                ring,
                rank,
                torsion,
                cochain_dim: n,
                image_rank,
                cocycle_corank: out_rank,
                generators: gens,
            })
        }
        Ring::Z2 => {
            let image_rank = if k == 0 {
                0
            } else {
                Gf2Matrix::from_int(&coboundary_matrix(nerve, k - 1)).rank()
            };
            let out_rank = Gf2Matrix::from_int(&d_out).rank();
            Ok(CohomologyResult {
                degree: k,
                ring,
                rank: n - out_rank - image_rank,
                torsion: Vec::new(),
                cochain_dim: n,
                image_rank,
                cocycle_corank: out_rank,
                generators: None,
            })
        }
    }
}

/// Cocycles projecting onto a basis of the free part of `ker δ^k / im δ^{k-1}`.
fn free_generators(nerve: &ResolvedNerve, k: usize, d_out: &IntMatrix, rank: usize) -> Result<Vec<IntCochain>> {
    let n = nerve.cell_count(k);
    if rank == 0 {
        return Ok(Vec::new());
    }
    // Z-basis of ker δ^k: trailing columns of V.
    let s_out = smith_normal_form(d_out);
    let v = s_out.v.as_ref().expect("transforms requested");
    let kernel = v.select_cols(&(s_out.rank()..n).collect::<Vec<_>>());
    // Coordinates of kernel vectors in the free part of coker δ^{k-1}.
    let (u_in, r_in) = if k == 0 {
        (IntMatrix::identity(n), 0)
    } else {
        let s = smith_normal_form(&coboundary_matrix(nerve, k - 1));
        let r = s.rank();
        (s.u.expect("transforms requested"), r)
    };
    let proj = u_in.select_rows(&(r_in..n).collect::<Vec<_>>()).mul(&kernel);
    let sp = smith_normal_form(&proj);
    if sp.rank() != rank {
        return Err(Error::Invalid(format!(
            "generator lattice has rank {}, expected {}",
            sp.rank(),
            rank
        )));
    }
    let lifted = kernel.mul(sp.v.as_ref().expect("transforms requested"));
    (0..rank)
        .map(|j| {
            let col: Vec<i64> = lifted
                .column(j)
                .iter()
                .map(|x| to_i64(x, "generator entry"))
                .collect::<Result<_>>()?;
            IntCochain::from_vector(nerve, k, Ring::Z, &col)
        })
        .collect()
}

/// Left vector `w` with `w · δ ≡ 0` and `w · c ≢ 0` modulo `modulus` (0 means exactly),
/// witnessing that `c` is not a coboundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub weights: Vec<(CellKey, i64)>,
    pub pairing: i64,
    pub modulus: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CoboundaryVerdict {
    Yes { primitive: IntCochain },
    No { certificate: Obstruction },
}

impl CoboundaryVerdict {
    pub fn is_coboundary(&self) -> bool {
        matches!(self, CoboundaryVerdict::Yes { .. })
    }
}

/// Decides whether the cocycle `c` is `δb` for some `b` over its ring, exactly.
pub fn is_coboundary(nerve: &ResolvedNerve, c: &IntCochain) -> Result<CoboundaryVerdict> {
    let k = c.degree;
    if k < nerve.k_max {
        let dc = coboundary(nerve, c)?;
        if !dc.is_zero() {
            return Err(Error::NotCocycle(format!(
                "δc has {} nonzero entries",
                dc.entries().count()
            )));
        }
    }
    let cells = nerve.cells(k);
    let target = c.to_vector(nerve);
    if k == 0 {
        // Only the zero 0-cochain is a coboundary.
        return Ok(match target.iter().position(|&v| v != 0) {
            None => CoboundaryVerdict::Yes {
                primitive: IntCochain::zero(0, c.ring),
            },
            Some(i) => CoboundaryVerdict::No {
                certificate: Obstruction {
                    weights: vec![(cells[i].clone(), 1)],
                    pairing: target[i],
                    modulus: if c.ring == Ring::Z2 { 2 } else { 0 },
                },
            },
        });
    }
    let m = coboundary_matrix(nerve, k - 1);
    match c.ring {
        Ring::Z => solve_integer(nerve, k, &cells, &m, &target, c),
        Ring::Z2 => {
            let rhs: Vec<bool> = target.iter().map(|v| v.rem_euclid(2) == 1).collect();
            match Gf2Matrix::from_int(&m).solve(&rhs) {
                Ok(x) => {
                    let xs: Vec<i64> = x.iter().map(|&b| b as i64).collect();
                    let b = IntCochain::from_vector(nerve, k - 1, Ring::Z2, &xs)?;
                    if coboundary(nerve, &b)? != *c {
                        return Err(Error::Invalid("mod-2 primitive failed re-verification".into()));
                    }
                    Ok(CoboundaryVerdict::Yes { primitive: b })
                }
                Err(w) => Ok(CoboundaryVerdict::No {
                    certificate: Obstruction {
                        weights: cells
                            .iter()
                            .zip(&w)
                            .filter(|(_, &b)| b)
                            .map(|(k, _)| (k.clone(), 1))
                            .collect(),
                        pairing: 1,
                        modulus: 2,
                    },
                }),
            }
        }
    }
}

fn solve_integer(
    nerve: &ResolvedNerve,
    k: usize,
    cells: &[CellKey],
    m: &IntMatrix,
    target: &[i64],
    c: &IntCochain,
) -> Result<CoboundaryVerdict> {
    let s = smith_normal_form(m);
    let u = s.u.as_ref().expect("transforms requested");
    let v = s.v.as_ref().expect("transforms requested");
    let y = u.mul_vec(&vec_big(target));
    let mut x = vec![BigInt::zero(); m.cols];
    for (i, yi) in y.iter().enumerate() {
        let (modulus, ok) = match s.divisors.get(i) {
            Some(d) => (d.clone(), yi.is_multiple_of(d)),
            None => (BigInt::zero(), yi.is_zero()),
        };
        if !ok {
            let weights = cells
                .iter()
                .zip(u.row(i))
                .filter(|(_, w)| !w.is_zero())
                .map(|(key, w)| Ok((key.clone(), to_i64(w, "certificate weight")?)))
                .collect::<Result<_>>()?;
            return Ok(CoboundaryVerdict::No {
                certificate: Obstruction {
                    weights,
                    pairing: to_i64(yi, "certificate pairing")?,
                    modulus: to_i64(&modulus, "certificate modulus")?,
                },
            });
        }
        if let Some(d) = s.divisors.get(i) {
            x[i] = yi / d;
        }
    }
    let b: Vec<i64> = v
        .mul_vec(&x)
        .iter()
        .map(|e| to_i64(e, "primitive entry"))
        .collect::<Result<_>>()?;
    let primitive = IntCochain::from_vector(nerve, k - 1, Ring::Z, &b)?;
    if coboundary(nerve, &primitive)? != *c {
        return Err(Error::Invalid("integer primitive failed re-verification".into()));
    }
    Ok(CoboundaryVerdict::Yes { primitive })
}

/// Re-checks an obstruction against the nerve: `w · δ^{k-1} ≡ 0` and `w · c ≢ 0`.
pub fn verify_obstruction(nerve: &ResolvedNerve, c: &IntCochain, ob: &Obstruction) -> Result<bool> {
    let k = c.degree;
    let index = nerve.cell_index(k);
    let mut w = vec![BigInt::zero(); index.len()];
    for (key, v) in &ob.weights {
        let i = *index
            .get(key)
            .ok_or_else(|| Error::Invalid(format!("certificate cell {key:?} not in nerve")))?;
        w[i] = BigInt::from(*v);
    }
    let reduce = |x: &BigInt| -> BigInt {
        if ob.modulus == 0 {
            x.clone()
        } else {
            x.mod_floor(&BigInt::from(ob.modulus))
        }
    };
    if k > 0 {
        let m = coboundary_matrix(nerve, k - 1);
        if m.vec_mul(&w).iter().any(|x| !reduce(x).is_zero()) {
            return Ok(false);
        }
    }
    let pairing: BigInt = w
        .iter()
        .zip(c.to_vector(nerve))
        .map(|(a, b)| a * BigInt::from(b))
        .sum();
    Ok(!reduce(&pairing).is_zero() && pairing == BigInt::from(ob.pairing))
}

/// Dense matrix over `Z/2` with bit-packed rows.
#[derive(Clone, Debug)]
pub struct Gf2Matrix {
    pub rows: usize,
    pub cols: usize,
    bits: Vec<Vec<u64>>,
}

impl Gf2Matrix {
    pub fn from_int(m: &IntMatrix) -> Self {
        let words = m.cols.div_ceil(64).max(1);
        let mut bits = vec![vec![0u64; words]; m.rows];
        for (r, row) in bits.iter_mut().enumerate() {
            for c in 0..m.cols {
                if m.get(r, c).is_odd() {
                    row[c / 64] |= 1 << (c % 64);
                }
            }
        }
        Gf2Matrix {
            rows: m.rows,
            cols: m.cols,
            bits,
        }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.bits.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, b) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & b != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves `M x = rhs`; on failure returns `w` with `w^T M = 0` and `w · rhs = 1`.
    pub fn solve(&self, rhs: &[bool]) -> std::result::Result<Vec<bool>, Vec<bool>> {
        assert_eq!(rhs.len(), self.rows, "rhs length");
        // Augmented rows: [M | rhs | e_r] so each row remembers which input rows it combines.
        let tag_off = self.cols + 1;
        let width = tag_off + self.rows;
        let words = width.div_ceil(64);
        let set = |row: &mut Vec<u64>, i: usize| row[i / 64] |= 1 << (i % 64);
        let get = |row: &[u64], i: usize| row[i / 64] >> (i % 64) & 1 == 1;
        let mut rows: Vec<Vec<u64>> = (0..self.rows)
            .map(|r| {
                let mut row = vec![0u64; words];
                for c in 0..self.cols {
                    if self.bits[r][c / 64] >> (c % 64) & 1 == 1 {
                        set(&mut row, c);
                    }
                }
                if rhs[r] {
                    set(&mut row, self.cols);
                }
                set(&mut row, tag_off + r);
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| get(&rows[r], c)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && get(row, c) {
                    row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
                }
            }
            pivots.push(c);
            rank += 1;
        }
        for row in &rows[rank..] {
            if get(row, self.cols) {
                return Err((0..self.rows).map(|r| get(row, tag_off + r)).collect());
            }
        }
        let mut x = vec![false; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = get(&rows[i], self.cols);
        }
        Ok(x)
    }
}
