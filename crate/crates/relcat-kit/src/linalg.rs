//! Dense matrices over the exact rationals and the elimination routines the
//! homotopy-limit machinery relies on: rank, kernel bases in echelon form,
//! linear solves and inverses.

use crate::rational::Q;
use serde::{Deserialize, Serialize};

/// Dense row-major matrix over `Q`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl std::fmt::Debug for QMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "QMat {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(12) {
            let row: Vec<String> = (0..self.cols.min(16)).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> QMat {
        QMat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> QMat {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> QMat {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        QMat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> QMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        QMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Integer-entry convenience constructor, mostly for tests.
    pub fn from_int_rows(rows: &[&[i64]]) -> QMat {
        QMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| Q::from_int(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> QMat {
        QMat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = QMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                let orow = k * other.cols;
                let trow = r * other.cols;
                for c in 0..other.cols {
                    let b = &other.data[orow + c];
                    if !b.is_zero() {
                        let prod = a * b;
                        out.data[trow + c] += &prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Q::zero(); self.rows];
        for r in 0..self.rows {
            let row = self.row(r);
            let mut acc = Q::zero();
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            out[r] = acc;
        }
        out
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert!(self.rows == other.rows && self.cols == other.cols);
        QMat::from_fn(self.rows, self.cols, |r, c| self.at(r, c) + other.at(r, c))
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert!(self.rows == other.rows && self.cols == other.cols);
        QMat::from_fn(self.rows, self.cols, |r, c| self.at(r, c) - other.at(r, c))
    }

    pub fn neg(&self) -> QMat {
        QMat::from_fn(self.rows, self.cols, |r, c| -self.at(r, c))
    }

    /// Writes `block` into `self` with upper-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &QMat) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.at(r, c).clone());
            }
        }
    }

    pub fn hstack(parts: &[&QMat]) -> QMat {
        let rows = parts.first().map_or(0, |m| m.rows);
        assert!(parts.iter().all(|m| m.rows == rows));
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = QMat::zeros(rows, cols);
        let mut c0 = 0;
        for m in parts {
            out.set_block(0, c0, m);
            c0 += m.cols;
        }
        out
    }

    pub fn vstack(parts: &[&QMat]) -> QMat {
        let cols = parts.first().map_or(0, |m| m.cols);
        assert!(parts.iter().all(|m| m.cols == cols));
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = QMat::zeros(rows, cols);
        let mut r0 = 0;
        for m in parts {
            out.set_block(r0, 0, m);
            r0 += m.rows;
        }
        out
    }
}

/// Reduced row echelon form together with its pivot bookkeeping.
pub struct Echelon {
    pub mat: QMat,
    /// pivot_cols[i] = column of the pivot in row i (strictly increasing).
    pub pivot_cols: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }
}

/// Brings a copy of `m` to reduced row echelon form.
///
/// Pivot selection prefers unit entries so that the overwhelmingly common
/// 0/±1 matrices of this crate eliminate without fraction growth.
pub fn rref(m: &QMat) -> Echelon {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // find a pivot in column c at or below row r, preferring units
        let mut pivot = None;
        for rr in r..rows {
            let v = a.at(rr, c);
            if v.is_zero() {
                continue;
            }
            if v.is_unit() {
                pivot = Some(rr);
                break;
            }
            if pivot.is_none() {
                pivot = Some(rr);
            }
        }
        let Some(p) = pivot else { continue };
        a.data.swap_unchecked_rows(p, r, cols);
        // normalize pivot row
        let pv = a.at(r, c).clone();
        if !pv.is_one() {
            let inv = pv.recip();
            for j in c..cols {
                let v = a.at(r, j);
                if !v.is_zero() {
                    a.set(r, j, v * &inv);
                }
            }
        }
        // clear the column everywhere else
        for rr in 0..rows {
            if rr == r {
                continue;
            }
            let f = a.at(rr, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in c..cols {
                let s = a.at(r, j);
                if s.is_zero() {
                    continue;
                }
                let val = a.at(rr, j) - &(&f * s);
                a.set(rr, j, val);
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    Echelon { mat: a, pivot_cols }
}

trait SwapRows {
    fn swap_unchecked_rows(&mut self, a: usize, b: usize, cols: usize);
}

impl SwapRows for Vec<Q> {
    fn swap_unchecked_rows(&mut self, a: usize, b: usize, cols: usize) {
        if a == b {
            return;
        }
        for j in 0..cols {
            self.swap(a * cols + j, b * cols + j);
        }
    }
}

pub fn rank(m: &QMat) -> usize {
    rref(m).rank()
}

/// A kernel basis in echelon form: column `i` of `basis` has a 1 in position
/// `free_cols[i]` and zeros in the other free positions, so coordinates of a
/// kernel vector can be read off at the free positions.
pub struct KernelBasis {
    pub basis: QMat,
    pub free_cols: Vec<usize>,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.free_cols.len()
    }

    /// Coordinates of a vector already known to lie in the kernel.
    pub fn express(&self, v: &[Q]) -> Vec<Q> {
        self.free_cols.iter().map(|&c| v[c].clone()).collect()
    }
}

/// Basis of the null space {x : m x = 0}.
pub fn kernel_basis(m: &QMat) -> KernelBasis {
    let ech = rref(m);
    let cols = m.cols;
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; cols];
        for (row, &pc) in ech.pivot_cols.iter().enumerate() {
            v[pc] = Some(row);
        }
        v
    };
    let free_cols: Vec<usize> = (0..cols).filter(|c| pivot_set[*c].is_none()).collect();
    let mut basis = QMat::zeros(cols, free_cols.len());
    for (k, &fc) in free_cols.iter().enumerate() {
        basis.set(fc, k, Q::one());
        for (row, &pc) in ech.pivot_cols.iter().enumerate() {
            let v = ech.mat.at(row, fc);
            if !v.is_zero() {
                basis.set(pc, k, -v);
            }
        }
    }
    KernelBasis { basis, free_cols }
}

/// Solves a·X = b exactly. Returns None when inconsistent.
pub fn solve(a: &QMat, b: &QMat) -> Option<QMat> {
    assert_eq!(a.rows, b.rows);
    let aug = QMat::hstack(&[a, b]);
    let ech = rref(&aug);
    // inconsistency: a pivot in the b-part
    if ech.pivot_cols.iter().any(|&c| c >= a.cols) {
        return None;
    }
    let mut x = QMat::zeros(a.cols, b.cols);
    for (row, &pc) in ech.pivot_cols.iter().enumerate() {
        for j in 0..b.cols {
            x.set(pc, j, ech.mat.at(row, a.cols + j).clone());
        }
    }
    Some(x)
}

pub fn invert(m: &QMat) -> Option<QMat> {
    if m.rows != m.cols {
        return None;
    }
    let sol = solve(m, &QMat::identity(m.rows))?;
    if m.mul(&sol) == QMat::identity(m.rows) {
        Some(sol)
    } else {
        None
    }
}

/// rank == rows, i.e. the matrix is surjective as a linear map.
pub fn is_surjective(m: &QMat) -> bool {
    rank(m) == m.rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_and_kernel_small() {
        let m = QMat::from_int_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&m), 2);
        let k = kernel_basis(&m);
        assert_eq!(k.dim(), 1);
        assert!(m.mul(&k.basis).is_zero());
    }

    #[test]
    fn solve_finds_exact_solutions() {
        let a = QMat::from_int_rows(&[&[2, 1], &[1, 3]]);
        let b = QMat::from_int_rows(&[&[1], &[0]]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.mul(&x), b);
        assert_eq!(x.at(0, 0), &Q::new(3, 5));
        // inconsistent system
        let a2 = QMat::from_int_rows(&[&[1, 1], &[1, 1]]);
        let b2 = QMat::from_int_rows(&[&[1], &[2]]);
        assert!(solve(&a2, &b2).is_none());
    }

    #[test]
    fn invert_roundtrip() {
        let m = QMat::from_int_rows(&[&[1, 2], &[3, 5]]);
        let inv = invert(&m).unwrap();
        assert_eq!(m.mul(&inv), QMat::identity(2));
        let sing = QMat::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert!(invert(&sing).is_none());
    }

    fn arb_mat(rows: usize, cols: usize) -> impl Strategy<Value = QMat> {
        proptest::collection::vec(-4i64..5, rows * cols)
            .prop_map(move |v| QMat::from_fn(rows, cols, |r, c| Q::from_int(v[r * cols + c])))
    }

    proptest! {
        #[test]
        fn kernel_is_annihilated_and_complements_rank(m in arb_mat(4, 6)) {
            let k = kernel_basis(&m);
            prop_assert!(m.mul(&k.basis).is_zero());
            prop_assert_eq!(k.dim() + rank(&m), m.cols());
            // express() really inverts the basis on kernel members
            for j in 0..k.dim() {
                let v = k.basis.col(j);
                let coords = k.express(&v);
                let rebuilt = k.basis.mul_vec(&coords);
                prop_assert_eq!(rebuilt, v);
            }
        }

        #[test]
        fn rank_transpose_invariant(m in arb_mat(3, 5)) {
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }
    }
}
