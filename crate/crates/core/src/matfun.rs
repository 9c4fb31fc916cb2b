//! Dense symmetric-matrix kernels.
//!
//! Every matrix function here goes through the symmetric eigendecomposition:
//! the inputs are covariance/correlation matrices and graph Laplacians, so
//! `f(A) = V·diag(f(λ))·Vᵀ` is both exact and sufficient.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Relative pivot/eigenvalue tolerance below which a matrix is treated as
/// having left the positive-definite cone.
pub const PD_TOLERANCE: f64 = 1e-12;

/// Largest eigenvalue accepted by [`expm_sym`].
pub const EXP_OVERFLOW_LIMIT: f64 = 700.0;

/// A square matrix whose stored entries are exactly symmetric and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = m.rows();
        for i in 0..n {
            for j in (i + 1)..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// `(M + Mᵀ)/2`, for results of floating-point products that are
    /// symmetric only up to rounding.
    pub fn symmetric_part(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let n = m.rows();
        let mut out = m.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Self::new(out)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diag(diag))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    #[inline]
    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    fn max_diag(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)]).fold(0.0, f64::max)
    }
}

/// Lower-triangular factor with a strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular(Matrix);

impl LowerTriangular {
    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    #[inline]
    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Solves `L·x = b` by forward substitution.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            let row = self.0.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] = (b[i] - s) / row[i];
        }
        Ok(x)
    }

    /// Solves `Lᵀ·x = b` by back substitution.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|k| self.0[(k, i)] * x[k]).sum();
            x[i] = (b[i] - s) / self.0[(i, i)];
        }
        Ok(x)
    }

    /// `bᵀ(LLᵀ)⁻¹b = ‖L⁻¹b‖²`.
    pub fn inverse_quadratic_form(&self, b: &[f64]) -> Result<f64> {
        let y = self.solve(b)?;
        Ok(y.iter().map(|v| v * v).sum())
    }

    /// `L·Lᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| {
            let k = i.min(j) + 1;
            crate::linalg::dot(&self.0.row(i)[..k], &self.0.row(j)[..k])
        })
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenPair {
    /// `V·diag(f(λ))·Vᵀ`, mirrored from the upper triangle so the result is
    /// exactly symmetric.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += v[(i, k)] * fv[k] * v[(j, k)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    /// First `k` eigenvector columns.
    pub fn leading_vectors(&self, k: usize) -> Matrix {
        let n = self.vectors.rows();
        Matrix::from_fn(n, k.min(self.values.len()), |i, j| self.vectors[(i, j)])
    }
}

/// Cholesky factorisation `A = L·Lᵀ`.
pub fn cholesky(a: &SymMatrix) -> Result<LowerTriangular> {
    let n = a.dim();
    let tol = PD_TOLERANCE * a.max_diag();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let s: f64 = l.row(j)[..j].iter().map(|v| v * v).sum();
        let pivot = a.get(j, j) - s;
        if pivot <= tol || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { value: pivot });
        }
        let ljj = math::sqrt(pivot);
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let s = crate::linalg::dot(&l.row(i)[..j], &l.row(j)[..j]);
            l[(i, j)] = (a.get(i, j) - s) / ljj;
        }
    }
    Ok(LowerTriangular(l))
}

/// Symmetric eigendecomposition (Householder tridiagonalisation followed by
/// the implicit QL algorithm).
pub fn sym_eig(a: &SymMatrix) -> Result<EigenPair> {
    let n = a.dim();
    if n == 0 {
        return Ok(EigenPair {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| a.as_matrix().row(i).to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[i][order[j]]);
    if !values.iter().all(|x| x.is_finite()) || !vectors.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(EigenPair { values, vectors })
}

fn tridiagonalize(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    d.copy_from_slice(&v[n - 1][..n]);
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += math::abs(*dk);
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = math::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                let f = d[j];
                v[j][i] = f;
                let mut g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

fn ql_implicit(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    const MAX_ITER: usize = 100;
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(math::abs(d[l]) + math::abs(e[l]));
        let mut m = l;
        while m < n {
            if math::abs(e[m]) <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_ITER {
                    return Err(Error::NonFinite);
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = math::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = math::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        let h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !p.is_finite() {
                    return Err(Error::NonFinite);
                }
                if math::abs(e[l]) <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn check_spd_spectrum(eig: &EigenPair) -> Result<()> {
    let max = eig.values.first().copied().unwrap_or(0.0);
    let min = eig.values.last().copied().unwrap_or(0.0);
    if max <= 0.0 || min <= PD_TOLERANCE * max {
        return Err(Error::NotPositiveDefinite { value: min });
    }
    Ok(())
}

/// Principal matrix logarithm of an SPD matrix.
pub fn logm_spd(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = sym_eig(a)?;
    check_spd_spectrum(&eig)?;
    SymMatrix::new(eig.apply(math::ln))
}

/// Matrix exponential of a symmetric matrix.
pub fn expm_sym(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = sym_eig(a)?;
    if eig.values.first().is_some_and(|&l| l > EXP_OVERFLOW_LIMIT) {
        return Err(Error::NonFinite);
    }
    SymMatrix::new(eig.apply(math::exp))
}

/// `A^{-1/2}` for SPD `A`.
pub fn inv_sqrt_spd(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = sym_eig(a)?;
    check_spd_spectrum(&eig)?;
    SymMatrix::new(eig.apply(|l| 1.0 / math::sqrt(l)))
}

/// Least-squares projection onto nondecreasing sequences
/// (pool-adjacent-violators).
pub fn isotonic_nondecreasing(v: &[f64]) -> Vec<f64> {
    // blocks of (sum, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(v.len());
    for &x in v {
        blocks.push((x, 1));
        while blocks.len() > 1 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 / c0 as f64 <= s1 / c1 as f64 {
                break;
            }
            blocks.pop();
            let last = blocks.last_mut().expect("len > 1");
            *last = (s0 + s1, c0 + c1);
        }
    }
    let mut out = Vec::with_capacity(v.len());
    for (s, c) in blocks {
        let mean = s / c as f64;
        out.extend(core::iter::repeat_n(mean, c));
    }
    out
}
