//! Minimal dense row-major matrix used throughout the crate.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
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
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · rhs` without materialising the transpose.
    pub fn t_matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: rhs.rows,
            });
        }
        let mut out = Matrix::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            let a_row = self.row(k);
            let b_row = rhs.row(k);
            for (i, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_same_shape(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_same_shape(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            data: self.data.iter().map(|v| v * c).collect(),
            ..*self
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..*self
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs_diff(&self, rhs: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| math::abs(a - b))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Column means.
    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (m, &v) in means.iter_mut().zip(self.row(i)) {
                *m += v;
            }
        }
        let n = self.rows as f64;
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    /// Covariance of the columns with divisor `n`.
    pub fn covariance(&self) -> Matrix {
        let means = self.column_means();
        let p = self.cols;
        let mut cov = Matrix::zeros(p, p);
        let mut centered = vec![0.0; p];
        for i in 0..self.rows {
            for ((c, &v), &m) in centered.iter_mut().zip(self.row(i)).zip(&means) {
                *c = v - m;
            }
            for a in 0..p {
                let ca = centered[a];
                for (b, &cb) in centered.iter().enumerate().skip(a) {
                    cov.data[a * p + b] += ca * cb;
                }
            }
        }
        let n = self.rows as f64;
        for a in 0..p {
            for b in a..p {
                let v = cov.data[a * p + b] / n;
                cov.data[a * p + b] = v;
                cov.data[b * p + a] = v;
            }
        }
        cov
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    fn check_same_shape(&self, rhs: &Matrix) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

/// Orthonormalises the columns of `m` by modified Gram-Schmidt with column
/// pivoting. Returns the first `rank` orthonormal columns, where columns
/// whose residual norm falls below `tol` times the largest initial column
/// norm are dropped.
pub fn orthonormalize_columns(m: &Matrix, tol: f64) -> Matrix {
    let mut cols: Vec<Vec<f64>> = (0..m.cols()).map(|j| m.column(j)).collect();
    let scale = cols.iter().map(|c| norm2(c)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut remaining: Vec<usize> = (0..cols.len()).collect();
    while !remaining.is_empty() {
        // pick the column with the largest residual norm
        let (pos, &best) = remaining
            .iter()
            .enumerate()
            .max_by(|a, b| norm2(&cols[*a.1]).total_cmp(&norm2(&cols[*b.1])))
            .expect("nonempty");
        let nrm = norm2(&cols[best]);
        if scale == 0.0 || nrm <= tol * scale {
            break;
        }
        let q: Vec<f64> = cols[best].iter().map(|v| v / nrm).collect();
        remaining.swap_remove(pos);
        for &j in &remaining {
            let c = dot(&q, &cols[j]);
            for (v, qi) in cols[j].iter_mut().zip(&q) {
                *v -= c * qi;
            }
        }
        basis.push(q);
    }
    Matrix::from_columns(&basis).unwrap_or_else(|_| Matrix::zeros(m.rows(), 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_transpose() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        let b = Matrix::from_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.row(2), &[5.0, 6.0, 11.0]);
        let ata = a.t_matmul(&a).unwrap();
        assert_eq!(ata, a.transpose().matmul(&a).unwrap());
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn covariance_uses_n_divisor() {
        let x = Matrix::from_rows(&[[1.0], [3.0]]).unwrap();
        assert_eq!(x.covariance()[(0, 0)], 1.0);
    }

    #[test]
    fn gram_schmidt_spans_input() {
        let m = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let q = orthonormalize_columns(&m, 1e-12);
        assert_eq!(q.cols(), 2);
        let qtq = q.t_matmul(&q).unwrap();
        assert!(qtq.max_abs_diff(&Matrix::identity(2)) < 1e-14);
        // rank-deficient input drops the dependent column
        let r = Matrix::from_rows(&[[1.0, 2.0], [1.0, 2.0]]).unwrap();
        assert_eq!(orthonormalize_columns(&r, 1e-10).cols(), 1);
    }
}
