//! Dense matrices over a [`Field`] and row-space utilities.

use crate::error::{bail, Result};
use crate::gf::Field;

/// Row-major dense matrix of field indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn push_row(&mut self, r: &[u32]) {
        assert_eq!(r.len(), self.cols);
        self.data.extend_from_slice(r);
        self.rows += 1;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a != 0 {
                    let (src, dst) = (other.row(k), &mut out.data[i * other.cols..(i + 1) * other.cols]);
                    f.axpy(dst, a, src);
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, f: &Field, v: &[u32]) -> Vec<u32> {
        (0..self.rows).map(|i| f.dot(self.row(i), v)).collect()
    }

    /// `v * self` for a row vector `v`.
    pub fn vec_mul(&self, f: &Field, v: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.cols];
        for (i, &c) in v.iter().enumerate() {
            f.axpy(&mut out, c, self.row(i));
        }
        out
    }

    /// In-place reduced row echelon form; returns pivot columns.
    /// Zero rows are dropped.
    pub fn rref(&mut self, f: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv_nz(self.get(r, c));
            for v in self.row_mut(r) {
                *v = f.mul(*v, inv);
            }
            let prow = self.row(r).to_vec();
            for i in 0..self.rows {
                if i != r {
                    let factor = self.get(i, c);
                    if factor != 0 {
                        f.axpy(self.row_mut(i), f.neg(factor), &prow);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        self.rows = r;
        self.data.truncate(r * self.cols);
        pivots
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.clone().rref(f).len()
    }

    /// Basis (as rows) of the right kernel `{x : self * x = 0}`.
    pub fn nullspace(&self, f: &Field) -> Matrix {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(0, self.cols);
        for &fc in &free {
            let mut v = vec![0u32; self.cols];
            v[fc] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(ri, fc));
            }
            out.push_row(&v);
        }
        out
    }

    /// Some `x` with `self * x = b`, or `None` when inconsistent.
    pub fn solve(&self, f: &Field, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            aug.row_mut(i)[..self.cols].copy_from_slice(self.row(i));
            aug.set(i, self.cols, b[i]);
        }
        let pivots = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(ri, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self, f: &Field) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            aug.row_mut(i)[..n].copy_from_slice(self.row(i));
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref(f);
        if pivots.len() < n || (n > 0 && pivots[n - 1] >= n) {
            return None;
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            out.row_mut(i).copy_from_slice(&aug.row(i)[n..]);
        }
        Some(out)
    }
}

/// A subspace held in reduced row echelon form, used for membership tests
/// and canonical coset representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSpace {
    pub basis: Matrix,
    pub pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(f: &Field, m: &Matrix) -> RowSpace {
        let mut basis = m.clone();
        let pivots = basis.rref(f);
        RowSpace { basis, pivots }
    }

    pub fn from_rows(f: &Field, rows: &[Vec<u32>], cols: usize) -> RowSpace {
        RowSpace::new(f, &Matrix::from_rows(rows, cols))
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn len(&self) -> usize {
        self.basis.cols
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Canonical representative of `v + span`: pivot coordinates cleared.
    pub fn reduce(&self, f: &Field, v: &[u32]) -> Vec<u32> {
        let mut out = v.to_vec();
        self.reduce_in_place(f, &mut out);
        out
    }

    pub fn reduce_in_place(&self, f: &Field, v: &mut [u32]) {
        for (ri, &pc) in self.pivots.iter().enumerate() {
            let c = v[pc];
            if c != 0 {
                f.axpy(v, f.neg(c), self.basis.row(ri));
            }
        }
    }

    pub fn contains(&self, f: &Field, v: &[u32]) -> bool {
        self.reduce(f, v).iter().all(|&x| x == 0)
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the span.
    pub fn coords(&self, f: &Field, v: &[u32]) -> Option<Vec<u32>> {
        let c: Vec<u32> = self.pivots.iter().map(|&pc| v[pc]).collect();
        let back = self.basis.vec_mul(f, &c);
        (back == v).then_some(c)
    }

    /// Whether every row of `other` lies in this space.
    pub fn contains_space(&self, f: &Field, other: &Matrix) -> Option<Vec<u32>> {
        (0..other.rows).map(|i| other.row(i)).find(|r| !self.contains(f, r)).map(|r| r.to_vec())
    }

    /// Add a vector; returns whether the dimension grew.
    pub fn insert(&mut self, f: &Field, v: &[u32]) -> bool {
        if self.contains(f, v) {
            return false;
        }
        self.basis.push_row(v);
        let pivots = self.basis.rref(f);
        self.pivots = pivots;
        true
    }
}

/// All `q^k` vectors of `F^k` in lexicographic order (last coordinate fastest).
pub fn for_each_vector(q: u32, k: usize, mut visit: impl FnMut(&[u32])) {
    let mut v = vec![0u32; k];
    loop {
        visit(&v);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < q {
                break;
            }
            v[i] = 0;
        }
    }
}

/// Index-th vector of `F^k` in the order of [`for_each_vector`].
pub fn vector_at(q: u32, k: usize, mut idx: u64) -> Vec<u32> {
    let mut v = vec![0u32; k];
    for i in (0..k).rev() {
        v[i] = (idx % q as u64) as u32;
        idx /= q as u64;
    }
    v
}

/// `q^k`, failing when it exceeds `limit`.
pub fn checked_count(q: u32, k: usize, limit: u64) -> Result<u64> {
    let mut c: u64 = 1;
    for _ in 0..k {
        c = c.saturating_mul(q as u64);
    }
    if c > limit {
        bail!(Infeasible, "enumeration of {q}^{k} vectors exceeds the limit {limit}");
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_is_orthogonal() {
        let f = Field::prime(5).unwrap();
        let m = Matrix::from_rows(&[vec![1, 2, 3, 4], vec![0, 1, 1, 1]], 4);
        let ns = m.nullspace(&f);
        assert_eq!(ns.rows, 2);
        for i in 0..ns.rows {
            assert!(m.mul_vec(&f, ns.row(i)).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solve_and_inverse() {
        let f = Field::new(2, 3).unwrap();
        let m = Matrix::from_rows(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 1, 2]], 3);
        if let Some(inv) = m.inverse(&f) {
            assert_eq!(m.mul(&f, &inv), Matrix::identity(3));
        }
        let b = vec![1, 0, 3];
        if let Some(x) = m.solve(&f, &b) {
            assert_eq!(m.mul_vec(&f, &x), b);
        }
    }

    #[test]
    fn rowspace_reduce_is_canonical() {
        let f = Field::prime(3).unwrap();
        let rs = RowSpace::from_rows(&f, &[vec![1, 1, 0], vec![0, 1, 2]], 3);
        let v = vec![2, 0, 1];
        let w = vec![f.add(2, 1), f.add(0, 1), 1];
        assert_eq!(rs.reduce(&f, &v), rs.reduce(&f, &w));
        assert!(rs.contains(&f, &[1, 2, 2]));
        assert_eq!(rs.coords(&f, &[1, 2, 2]).map(|c| rs.basis.vec_mul(&f, &c)), Some(vec![1, 2, 2]));
    }
}
