// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! Compressed sparse row storage for the small complex matrices used here.

use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, MatRef};

use crate::c64;

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Complex CSR matrix. Column indices are sorted within each row, duplicate
/// triplets are summed and exact zeros are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<c64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, c64::new(1.0, 0.0))))
    }

    pub fn from_diagonal(diag: &[c64]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Panics if any triplet lies outside `nrows × ncols`.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, c64)>,
    {
        let mut entries: Vec<(usize, usize, c64)> = triplets.into_iter().collect();
        for &(i, j, _) in &entries {
            assert!(
                i < nrows && j < ncols,
                "triplet ({i}, {j}) outside {nrows}x{ncols}"
            );
        }
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut iter = entries.into_iter().peekable();
        while let Some((i, j, mut v)) = iter.next() {
            while let Some(&(ni, nj, nv)) = iter.peek() {
                if ni != i || nj != j {
                    break;
                }
                v += nv;
                iter.next();
            }
            if v != ZERO {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let range = self.row_ptr[i]..self.row_ptr[i + 1];
            range.map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, c64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        range.map(move |k| (self.col_idx[k], self.values[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => ZERO,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(i, j, v)| (j, i, v)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.iter().map(|(i, j, v)| (j, i, v.conj())),
        )
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn scale(&self, factor: c64) -> Self {
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.iter().map(|(i, j, v)| (i, j, v * factor)),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(self.nrows, self.ncols, self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(c64::new(-1.0, 0.0)))
    }

    /// Sparse × sparse product.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "inner dimensions differ");
        let mut triplets = Vec::new();
        let mut acc = vec![ZERO; other.ncols];
        let mut touched = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if acc[j] == ZERO {
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &touched {
                triplets.push((i, j, acc[j]));
                acc[j] = ZERO;
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, triplets)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.nrows, other.ncols);
        let triplets = self.iter().flat_map(|(i, j, a)| {
            other
                .iter()
                .map(move |(k, l, b)| (i * p + k, j * q + l, a * b))
        });
        Self::from_triplets(self.nrows * p, self.ncols * q, triplets.collect::<Vec<_>>())
    }

    /// `y = self · x`.
    pub fn mul_vec_into(&self, x: &[c64], y: &mut [c64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = ZERO;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    /// Dense product `self · m`.
    pub fn mul_dense(&self, m: MatRef<'_, c64>) -> Mat<c64> {
        assert_eq!(self.ncols, m.nrows());
        let mut out = Mat::<c64>::zeros(self.nrows, m.ncols());
        for c in 0..m.ncols() {
            for i in 0..self.nrows {
                let mut s = ZERO;
                for (k, a) in self.row(i) {
                    s += a * m[(k, c)];
                }
                out[(i, c)] = s;
            }
        }
        out
    }

    /// Dense product `m · self`.
    pub fn dense_mul(&self, m: MatRef<'_, c64>) -> Mat<c64> {
        assert_eq!(m.ncols(), self.nrows);
        let mut out = Mat::<c64>::zeros(m.nrows(), self.ncols);
        for (k, j, b) in self.iter() {
            for r in 0..m.nrows() {
                out[(r, j)] += m[(r, k)] * b;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut out = Mat::<c64>::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            out[(i, j)] = v;
        }
        out
    }

    pub fn to_faer(&self) -> SparseColMat<usize, c64> {
        let triplets: Vec<_> = self.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &triplets)
            .expect("CSR entries are unique and in range")
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let m = CsrMatrix::from_triplets(
            2,
            2,
            [(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (1, 0, c(1.0, 0.0)), (1, 0, c(-1.0, 0.0))],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
        assert_eq!(m.get(1, 0), ZERO);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = CsrMatrix::from_triplets(
            3,
            2,
            [(0, 0, c(1.0, 1.0)), (1, 1, c(2.0, 0.0)), (2, 0, c(0.0, -1.0))],
        );
        let b = CsrMatrix::from_triplets(2, 3, [(0, 2, c(3.0, 0.0)), (1, 0, c(1.0, 2.0))]);
        let sparse = a.matmul(&b).to_dense();
        let dense = a.to_dense() * b.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert!((sparse[(i, j)] - dense[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kron_block_layout() {
        let a = CsrMatrix::from_triplets(2, 2, [(1, 0, c(1.0, 0.0))]);
        let b = CsrMatrix::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.nrows(), 6);
        for i in 0..3 {
            assert_eq!(k.get(3 + i, i), c(1.0, 0.0));
        }
        assert_eq!(k.nnz(), 3);
    }

    #[test]
    fn dense_products_agree() {
        let a = CsrMatrix::from_triplets(
            2,
            2,
            [(0, 1, c(1.0, 2.0)), (1, 1, c(-1.0, 0.0)), (1, 0, c(0.5, 0.0))],
        );
        let m = Mat::<c64>::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64));
        let left = a.mul_dense(m.as_ref());
        let right = a.dense_mul(m.as_ref());
        let ad = a.to_dense();
        let left_ref = &ad * &m;
        let right_ref = &m * &ad;
        for i in 0..2 {
            for j in 0..2 {
                assert!((left[(i, j)] - left_ref[(i, j)]).norm() < 1e-15);
                assert!((right[(i, j)] - right_ref[(i, j)]).norm() < 1e-15);
            }
        }
    }
}
