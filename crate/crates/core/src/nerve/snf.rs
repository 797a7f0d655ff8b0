//! Exact Smith normal form over the integers.
//!
//! Elimination runs on checked `i128` first and restarts on `BigInt` if any intermediate
//! overflows, so results are always exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `v^T M`.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.rows, v.len(), "dimension mismatch");
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(i, j);
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Submatrix of the listed rows (all columns).
    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                out.set(i, c, self.get(r, c).clone());
            }
        }
        out
    }

    /// Submatrix of the listed columns (all rows).
    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c).clone());
            }
        }
        out
    }
}

/// `U · M · V = D` with `U`, `V` unimodular and `D = diag(d_1, ..., d_rank, 0, ...)`,
/// `d_i > 0`, `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithForm {
    pub rows: usize,
    pub cols: usize,
    pub divisors: Vec<BigInt>,
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// Divisors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn d_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.rows, self.cols);
        for (i, v) in self.divisors.iter().enumerate() {
            d.set(i, i, v.clone());
        }
        d
    }
}

trait Scalar: Clone + fmt::Debug {
    fn s_zero() -> Self;
    fn s_one() -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn s_is_zero(&self) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    fn s_is_negative(&self) -> bool;
    /// Floor-free truncated quotient is enough for Euclidean reduction.
    fn quot(&self, d: &Self) -> Self;
    fn divides(&self, other: &Self) -> bool;
    /// `self - q * b`, `None` on overflow.
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self>;
    fn s_neg(&self) -> Option<Self>;
}

impl Scalar for i128 {
    fn s_zero() -> Self {
        0
    }
    fn s_one() -> Self {
        1
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn s_is_zero(&self) -> bool {
        *self == 0
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn s_is_negative(&self) -> bool {
        *self < 0
    }
    fn quot(&self, d: &Self) -> Self {
        self / d
    }
    fn divides(&self, other: &Self) -> bool {
        other % self == 0
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn s_neg(&self) -> Option<Self> {
        self.checked_neg()
    }
}

impl Scalar for BigInt {
    fn s_zero() -> Self {
        Zero::zero()
    }
    fn s_one() -> Self {
        One::one()
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn s_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cmp_abs(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn s_is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn quot(&self, d: &Self) -> Self {
        self / d
    }
    fn divides(&self, other: &Self) -> bool {
        other.is_multiple_of(self)
    }
    fn sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn s_neg(&self) -> Option<Self> {
        Some(-self)
    }
}

struct Dense<T> {
    rows: usize,
    cols: usize,
    a: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    fn from(m: &IntMatrix) -> Option<Self> {
        Some(Dense {
            rows: m.rows,
            cols: m.cols,
            a: m.data.iter().map(T::from_big).collect::<Option<_>>()?,
        })
    }

    fn identity(n: usize) -> Self {
        let mut a = vec![T::s_zero(); n * n];
        for i in 0..n {
            a[i * n + i] = T::s_one();
        }
        Dense { rows: n, cols: n, a }
    }

    fn at(&self, r: usize, c: usize) -> &T {
        &self.a[r * self.cols + c]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.a.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in 0..self.rows {
                self.a.swap(r * self.cols + i, r * self.cols + j);
            }
        }
    }

    /// row_i -= q * row_j
    fn row_sub(&mut self, i: usize, j: usize, q: &T) -> Option<()> {
        for c in 0..self.cols {
            let b = &self.a[j * self.cols + c];
            if !b.s_is_zero() {
                let v = self.a[i * self.cols + c].sub_mul(q, b)?;
                self.a[i * self.cols + c] = v;
            }
        }
        Some(())
    }

    /// col_i -= q * col_j
    fn col_sub(&mut self, i: usize, j: usize, q: &T) -> Option<()> {
        for r in 0..self.rows {
            let b = &self.a[r * self.cols + j];
            if !b.s_is_zero() {
                let v = self.a[r * self.cols + i].sub_mul(q, b)?;
                self.a[r * self.cols + i] = v;
            }
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) -> Option<()> {
        for c in 0..self.cols {
            let v = self.a[i * self.cols + c].s_neg()?;
            self.a[i * self.cols + c] = v;
        }
        Some(())
    }

    fn to_int(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.a.iter().map(|v| v.to_big()).collect(),
        }
    }
}

/// Row/column operations mirrored onto the optional transforms.
struct Work<T> {
    a: Dense<T>,
    u: Option<Dense<T>>,
    v: Option<Dense<T>>,
}

impl<T: Scalar> Work<T> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if let Some(u) = &mut self.u {
            u.swap_rows(i, j);
        }
    }
    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if let Some(v) = &mut self.v {
            v.swap_cols(i, j);
        }
    }
    fn row_sub(&mut self, i: usize, j: usize, q: &T) -> Option<()> {
        self.a.row_sub(i, j, q)?;
        if let Some(u) = &mut self.u {
            u.row_sub(i, j, q)?;
        }
        Some(())
    }
    fn col_sub(&mut self, i: usize, j: usize, q: &T) -> Option<()> {
        self.a.col_sub(i, j, q)?;
        if let Some(v) = &mut self.v {
            v.col_sub(i, j, q)?;
        }
        Some(())
    }
    fn negate_row(&mut self, i: usize) -> Option<()> {
        self.a.negate_row(i)?;
        if let Some(u) = &mut self.u {
            u.negate_row(i)?;
        }
        Some(())
    }
}

fn smith_generic<T: Scalar>(m: &IntMatrix, transforms: bool) -> Option<SmithForm> {
    let (rows, cols) = (m.rows, m.cols);
    let mut w = Work {
        a: Dense::<T>::from(m)?,
        u: transforms.then(|| Dense::identity(rows)),
        v: transforms.then(|| Dense::identity(cols)),
    };
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero magnitude in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        'scan: for r in t..rows {
            for c in t..cols {
                let x = w.a.at(r, c);
                if x.s_is_zero() {
                    continue;
                }
                if best.is_none_or(|(br, bc)| x.cmp_abs(w.a.at(br, bc)) == Ordering::Less) {
                    best = Some((r, c));
                    if x.cmp_abs(&T::s_one()) == Ordering::Equal {
                        break 'scan;
                    }
                }
            }
        }
        let Some((br, bc)) = best else { break };
        w.swap_rows(t, br);
        w.swap_cols(t, bc);

        loop {
            let mut dirty = false;
            // Clear column t below the pivot.
            for r in (t + 1)..rows {
                if w.a.at(r, t).s_is_zero() {
                    continue;
                }
                let q = w.a.at(r, t).quot(w.a.at(t, t));
                w.row_sub(r, t, &q)?;
                if !w.a.at(r, t).s_is_zero() {
                    dirty = true;
                }
            }
            // Clear row t right of the pivot.
            for c in (t + 1)..cols {
                if w.a.at(t, c).s_is_zero() {
                    continue;
                }
                let q = w.a.at(t, c).quot(w.a.at(t, t));
                w.col_sub(c, t, &q)?;
                if !w.a.at(t, c).s_is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // Move the smallest remainder in row/column t onto the pivot and repeat.
                let mut best = (t, t);
                for r in (t + 1)..rows {
                    let x = w.a.at(r, t);
                    if !x.s_is_zero() && x.cmp_abs(w.a.at(best.0, best.1)) == Ordering::Less {
                        best = (r, t);
                    }
                }
                for c in (t + 1)..cols {
                    let x = w.a.at(t, c);
                    if !x.s_is_zero() && x.cmp_abs(w.a.at(best.0, best.1)) == Ordering::Less {
                        best = (t, c);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            // Divisibility: the pivot must divide the whole trailing block.
            let p = w.a.at(t, t).clone();
            let mut offender = None;
            if p.cmp_abs(&T::s_one()) != Ordering::Equal {
                'div: for r in (t + 1)..rows {
                    for c in (t + 1)..cols {
                        if !p.divides(w.a.at(r, c)) {
                            offender = Some(r);
                            break 'div;
                        }
                    }
                }
            }
            match offender {
                Some(r) => {
                    // row_t += row_r, then the column sweep reduces the offending entry.
                    let minus_one = T::s_one().s_neg()?;
                    w.row_sub(t, r, &minus_one)?;
                }
                None => break,
            }
        }
        if w.a.at(t, t).s_is_negative() {
            w.negate_row(t)?;
        }
        divisors.push(w.a.at(t, t).to_big());
        t += 1;
    }
    Some(SmithForm {
        rows,
        cols,
        divisors,
        u: w.u.map(|u| u.to_int()),
        v: w.v.map(|v| v.to_int()),
    })
}

/// Smith normal form with transforms `U`, `V` such that `U · M · V = D`.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    smith_generic::<i128>(m, true)
        .or_else(|| smith_generic::<BigInt>(m, true))
        .expect("bigint elimination cannot overflow")
}

/// Elementary divisors only (no transforms; faster).
pub fn smith_divisors(m: &IntMatrix) -> SmithForm {
    smith_generic::<i128>(m, false)
        .or_else(|| smith_generic::<BigInt>(m, false))
        .expect("bigint elimination cannot overflow")
}

/// Forces the exact-arithmetic path; used to cross-check the fast path.
pub fn smith_normal_form_bigint(m: &IntMatrix) -> SmithForm {
    smith_generic::<BigInt>(m, true).expect("bigint elimination cannot overflow")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        let (u, v) = (s.u.as_ref().unwrap(), s.v.as_ref().unwrap());
        assert_eq!(u.mul(m).mul(v), s.d_matrix());
        for w in s.divisors.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(s.divisors.iter().all(|d| d.is_positive()));
        s
    }

    #[test]
    fn identity_and_zero() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.divisors, vec![BigInt::from(1); 3]);
        let z = check(&IntMatrix::zeros(2, 3));
        assert!(z.divisors.is_empty());
    }

    #[test]
    fn two_three_gives_one_six() {
        let s = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.divisors, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn rectangular_with_torsion() {
        let m = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = check(&m);
        assert_eq!(
            s.divisors,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
        assert_eq!(smith_divisors(&m).divisors, s.divisors);
    }

    #[test]
    fn huge_entries_fall_back_to_bigint() {
        let big = i64::MAX;
        let m = IntMatrix::from_rows(&[vec![big, big - 1], vec![big - 2, big]]);
        let s = check(&m);
        assert_eq!(s, smith_normal_form_bigint(&m));
    }
}
