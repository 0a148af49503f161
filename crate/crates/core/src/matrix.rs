//! Dense matrices over GF(q) with Gaussian elimination.

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Row-major dense matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Fe>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Fe> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Rows picked by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Columns `start..end`.
    pub fn col_range(&self, start: usize, end: usize) -> Self {
        let width = end - start;
        let mut data = Vec::with_capacity(self.rows * width);
        for r in 0..self.rows {
            data.extend_from_slice(&self.row(r)[start..end]);
        }
        Matrix {
            rows: self.rows,
            cols: width,
            data,
        }
    }

    pub fn mul(&self, f: &Field, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let rt = rhs.transpose();
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                out.set(r, c, f.dot(self.row(r), rt.row(c)));
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, f: &Field, v: &[Fe]) -> Result<Vec<Fe>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        Ok((0..self.cols)
            .map(|c| {
                let mut acc = Fe::ZERO;
                for (r, x) in v.iter().enumerate() {
                    acc = f.add(acc, f.mul(*x, self.get(r, c)));
                }
                acc
            })
            .collect())
    }

    pub fn sub(&self, f: &Field, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch("subtraction shapes differ".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| f.sub(*a, *b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Rank by row reduction.
    pub fn rank(&self, f: &Field) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, rank);
            let inv = f.inv(m.get(rank, c)).expect("pivot is nonzero");
            for r in 0..m.rows {
                if r != rank && !m.get(r, c).is_zero() {
                    let factor = f.mul(m.get(r, c), inv);
                    m.axpy_row(f, r, rank, factor);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Solves `self * X = rhs` for square nonsingular `self`.
    ///
    /// Pivots on the first nonzero entry of each column.
    pub fn solve(&self, f: &Field, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "solve needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, expected {}",
                rhs.rows, self.rows
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !a.get(r, c).is_zero())
                .ok_or(Error::SingularMatrix)?;
            a.swap_rows(p, c);
            b.swap_rows(p, c);
            let inv = f.inv(a.get(c, c))?;
            a.scale_row(f, c, inv);
            b.scale_row(f, c, inv);
            for r in 0..n {
                if r != c && !a.get(r, c).is_zero() {
                    let factor = a.get(r, c);
                    a.axpy_row(f, r, c, factor);
                    b.axpy_row(f, r, c, factor);
                }
            }
        }
        Ok(b)
    }

    pub fn invert(&self, f: &Field) -> Result<Matrix> {
        self.solve(f, &Matrix::identity(self.rows))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, f: &Field, r: usize, s: Fe) {
        for c in 0..self.cols {
            let v = f.mul(self.get(r, c), s);
            self.set(r, c, v);
        }
    }

    /// `row[dst] -= factor * row[src]`
    fn axpy_row(&mut self, f: &Field, dst: usize, src: usize, factor: Fe) {
        for c in 0..self.cols {
            let v = f.sub(self.get(dst, c), f.mul(factor, self.get(src, c)));
            self.set(dst, c, v);
        }
    }
}

/// Vandermonde matrix with row `i` equal to `(p_i^0, p_i^1, ..., p_i^{cols-1})`.
pub fn vandermonde(f: &Field, points: &[Fe], cols: usize) -> Result<Matrix> {
    if cols == 0 {
        return Err(Error::InvalidParams("vandermonde needs at least one column".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if p.is_zero() || p.0 >= f.modulus() || points[..i].contains(p) {
            return Err(Error::InvalidPoints);
        }
    }
    let mut m = Matrix::zeros(points.len(), cols);
    for (r, p) in points.iter().enumerate() {
        let mut x = Fe::ONE;
        for c in 0..cols {
            m.set(r, c, x);
            x = f.mul(x, *p);
        }
    }
    Ok(m)
}
