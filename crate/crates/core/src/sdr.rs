//! Surrogate-response sufficient dimension reduction.
//!
//! A metric-valued response is replaced by real surrogates built from the
//! pairwise distance matrix `D`:
//!
//! - kernel-free (`sa-` methods): `N` random unit projections `D·v_j`;
//! - kernel (`F` methods): the `n` columns of the Gaussian Gram matrix
//!   `exp(−D²/2γ²)`.
//!
//! Each surrogate column feeds a Euclidean estimator (OLS slope or SIR
//! slice-mean kernel) in whitened predictor coordinates. The per-column
//! candidate matrices are averaged, and the leading `d` eigenvectors, mapped
//! back through the whitener, span the estimate.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::matfun::{self, SymMatrix};
use crate::math;
use crate::metrics::DistanceMatrix;
use crate::rng::{self, Stream};

/// Tolerance on `BᵀB = I` for a [`Basis`].
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-8;

/// A `p × d` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    columns: Matrix,
}

impl Basis {
    /// Accepts columns that are already orthonormal.
    pub fn from_orthonormal(columns: Matrix) -> Result<Self> {
        let gram = columns.t_matmul(&columns)?;
        if gram.max_abs_diff(&Matrix::identity(columns.cols())) > ORTHONORMAL_TOLERANCE {
            return Err(Error::config("basis columns are not orthonormal"));
        }
        Ok(Self { columns })
    }

    /// Orthonormalises arbitrary full-rank columns (Gram-Schmidt with
    /// column pivoting). The span is preserved.
    pub fn orthonormalize(columns: &Matrix) -> Result<Self> {
        if columns.cols() == 0 || columns.cols() > columns.rows() {
            return Err(Error::DimensionMismatch {
                expected: columns.rows(),
                found: columns.cols(),
            });
        }
        let q = linalg::orthonormalize_columns(columns, 1e-10);
        if q.cols() < columns.cols() {
            return Err(Error::config("basis columns are linearly dependent"));
        }
        Ok(Self { columns: q })
    }

    /// Span of a single direction.
    pub fn from_direction(v: &[f64]) -> Result<Self> {
        Self::orthonormalize(&Matrix::from_columns(&[v.to_vec()])?)
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.columns.rows()
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.columns.cols()
    }

    pub fn columns(&self) -> &Matrix {
        &self.columns
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.columns.column(j)
    }

    /// `B·Bᵀ`.
    pub fn projection(&self) -> Matrix {
        self.columns
            .matmul(&self.columns.transpose())
            .expect("conforming")
    }

    /// `X·B`: the sufficient predictors.
    pub fn reduce(&self, x: &Matrix) -> Result<Matrix> {
        x.matmul(&self.columns)
    }

    /// Multiplies column `j` by `-1`.
    pub fn flip_column(&mut self, j: usize) {
        for i in 0..self.p() {
            self.columns[(i, j)] = -self.columns[(i, j)];
        }
    }
}

/// Subspace estimation error `‖P₁ − P₂‖_F` between the orthogonal
/// projections onto the two spans.
pub fn subspace_delta(b1: &Basis, b2: &Basis) -> Result<f64> {
    projection_distance(b1.columns(), b2.columns())
}

/// `‖B₁(B₁ᵀB₁)⁻¹B₁ᵀ − B₂(B₂ᵀB₂)⁻¹B₂ᵀ‖_F` for arbitrary full-rank columns.
pub fn projection_distance(b1: &Matrix, b2: &Matrix) -> Result<f64> {
    if b1.rows() != b2.rows() {
        return Err(Error::DimensionMismatch {
            expected: b1.rows(),
            found: b2.rows(),
        });
    }
    let p1 = Basis::orthonormalize(b1)?.projection();
    let p2 = Basis::orthonormalize(b2)?.projection();
    Ok(p1.sub(&p2)?.frobenius_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Fréchet OLS: Gaussian-kernel surrogates, OLS candidates.
    Fols,
    /// Surrogate-assisted OLS: random-projection surrogates, OLS candidates.
    SaOls,
    /// Fréchet SIR: Gaussian-kernel surrogates, SIR candidates.
    Fsir,
    /// Surrogate-assisted SIR: random-projection surrogates, SIR candidates.
    SaSir,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Fols, Method::SaOls, Method::Fsir, Method::SaSir];

    pub fn label(self) -> &'static str {
        match self {
            Method::Fols => "FOLS",
            Method::SaOls => "sa-OLS",
            Method::Fsir => "FSIR",
            Method::SaSir => "sa-SIR",
        }
    }

    pub fn is_sir(self) -> bool {
        matches!(self, Method::Fsir | Method::SaSir)
    }

    pub fn uses_projections(self) -> bool {
        matches!(self, Method::SaOls | Method::SaSir)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: alloc::string::String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match norm.as_str() {
            "fols" => Ok(Method::Fols),
            "saols" => Ok(Method::SaOls),
            "fsir" => Ok(Method::Fsir),
            "sasir" => Ok(Method::SaSir),
            _ => Err(Error::InvalidConfig(alloc::format!("unknown estimator `{s}`"))),
        }
    }
}

/// Gaussian kernel bandwidth γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Median of the strictly positive off-diagonal distances.
    Median,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub method: Method,
    /// Structural dimension.
    pub d: usize,
    /// Number of slices H for the SIR methods.
    pub slices: usize,
    /// Number of random projections N for the `sa-` methods.
    pub projections: usize,
    pub bandwidth: Bandwidth,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            method: Method::SaOls,
            d: 1,
            slices: 5,
            projections: 1000,
            bandwidth: Bandwidth::Median,
            seed: 0,
        }
    }
}

impl EstimatorConfig {
    pub fn new(method: Method, d: usize) -> Self {
        Self {
            method,
            d,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::config("structural dimension d must be at least 1"));
        }
        if self.method.is_sir() && self.slices < 2 {
            return Err(Error::config("SIR needs at least 2 slices"));
        }
        if self.method.uses_projections() && self.projections == 0 {
            return Err(Error::config("at least one projection is required"));
        }
        if let Bandwidth::Fixed(g) = self.bandwidth {
            if !g.is_finite() || g <= 0.0 {
                return Err(Error::config("kernel bandwidth must be positive"));
            }
        }
        Ok(())
    }
}

/// Centred and whitened predictors `Z = (X − x̄)·Σ̂^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedPredictors {
    pub z: Matrix,
    pub mean: Vec<f64>,
    pub whitener: SymMatrix,
}

impl StandardizedPredictors {
    /// Maps directions in standardised coordinates back to the predictor
    /// scale (`Σ̂^{-1/2}·b`) and orthonormalises them.
    pub fn back_transform(&self, b: &Matrix) -> Result<Basis> {
        Basis::orthonormalize(&self.whitener.as_matrix().matmul(b)?)
    }
}

/// Whitens `X` using its covariance with divisor `n`.
pub fn standardize(x: &Matrix) -> Result<StandardizedPredictors> {
    let (n, p) = (x.rows(), x.cols());
    if n <= p || p == 0 {
        return Err(Error::SingularCovariance);
    }
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let mean = x.column_means();
    let cov = SymMatrix::symmetric_part(&x.covariance())?;
    let whitener = matfun::inv_sqrt_spd(&cov).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => Error::SingularCovariance,
        other => other,
    })?;
    let centered = Matrix::from_fn(n, p, |i, j| x[(i, j)] - mean[j]);
    let z = centered.matmul(whitener.as_matrix())?;
    Ok(StandardizedPredictors { z, mean, whitener })
}

/// Unit-norm Gaussian projection vectors, one per column. Column `j` is
/// drawn before column `j + 1`, so the first columns do not depend on `count`.
pub fn projection_vectors(n: usize, count: usize, seed: u64) -> Matrix {
    let mut stream = rng::substream(seed, Stream::Projections, 0);
    let mut v = Matrix::zeros(n, count);
    for j in 0..count {
        let col: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut stream)).collect();
        let norm = linalg::norm2(&col);
        for (i, c) in col.into_iter().enumerate() {
            v[(i, j)] = if norm > 0.0 { c / norm } else { 0.0 };
        }
    }
    v
}

/// `D·V` for `count` random unit vectors `V`; column `j` is one surrogate
/// response.
pub fn random_projections(d: &DistanceMatrix, count: usize, seed: u64) -> Matrix {
    let v = projection_vectors(d.n(), count, seed);
    d.as_matrix().matmul(&v).expect("conforming")
}

/// Median of the strictly positive off-diagonal distances.
pub fn median_bandwidth(d: &DistanceMatrix) -> Result<f64> {
    let mut pos: Vec<f64> = d.upper_triangle().into_iter().filter(|&v| v > 0.0).collect();
    if pos.is_empty() {
        return Err(Error::DegenerateBandwidth);
    }
    pos.sort_by(f64::total_cmp);
    let m = pos.len();
    Ok(if m % 2 == 1 {
        pos[m / 2]
    } else {
        0.5 * (pos[m / 2 - 1] + pos[m / 2])
    })
}

/// Gaussian Gram matrix `K_ij = exp(−D_ij²/(2γ²))`.
pub fn kernel_gram(d: &DistanceMatrix, bandwidth: Bandwidth) -> Result<Matrix> {
    let gamma = match bandwidth {
        Bandwidth::Median => median_bandwidth(d)?,
        Bandwidth::Fixed(g) if g > 0.0 && g.is_finite() => g,
        Bandwidth::Fixed(_) => return Err(Error::DegenerateBandwidth),
    };
    let scale = 1.0 / (2.0 * gamma * gamma);
    Ok(d.as_matrix().map(|x| math::exp(-x * x * scale)))
}

/// OLS slope in standardised coordinates, `(1/n)·Σ Zᵢ(yᵢ − ȳ)`.
pub fn ols_direction(z: &Matrix, y: &[f64]) -> Vec<f64> {
    let n = z.rows();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let mut b = vec![0.0; z.cols()];
    for (i, &yi) in y.iter().enumerate() {
        let r = yi - ybar;
        for (bj, &zij) in b.iter_mut().zip(z.row(i)) {
            *bj += zij * r;
        }
    }
    b.iter_mut().for_each(|v| *v /= n as f64);
    b
}

/// Slices of near-equal size along the order of `y`. Ties that straddle a
/// slice boundary are pulled into the lower slice.
pub fn slice_indices(y: &[f64], slices: usize) -> Result<Vec<Vec<usize>>> {
    let n = y.len();
    if slices < 2 || n < slices {
        return Err(Error::DegenerateSlicing);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
    let mut out = Vec::with_capacity(slices);
    let mut start = 0;
    for h in 0..slices {
        let mut end = ((h + 1) * n / slices).max(start);
        while end < n && end > 0 && y[order[end]] == y[order[end - 1]] {
            end += 1;
        }
        if end <= start {
            return Err(Error::DegenerateSlicing);
        }
        out.push(order[start..end].to_vec());
        start = end;
    }
    Ok(out)
}

/// SIR kernel `Σ_h (n_h/n)·m_h·m_hᵀ` with `m_h` the mean of the rows of `Z`
/// in slice `h`.
pub fn sir_kernel(z: &Matrix, y: &[f64], slices: usize) -> Result<SymMatrix> {
    let n = z.rows();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    let p = z.cols();
    let mut m = Matrix::zeros(p, p);
    accumulate_sir(z, y, slices, &mut m)?;
    for a in 0..p {
        for b in 0..a {
            m[(a, b)] = m[(b, a)];
        }
    }
    SymMatrix::new(m)
}

fn accumulate_sir(z: &Matrix, y: &[f64], slices: usize, acc: &mut Matrix) -> Result<()> {
    let n = z.rows() as f64;
    let p = z.cols();
    let mut mean = vec![0.0; p];
    for slice in slice_indices(y, slices)? {
        mean.iter_mut().for_each(|v| *v = 0.0);
        for &i in &slice {
            for (m, &v) in mean.iter_mut().zip(z.row(i)) {
                *m += v;
            }
        }
        let nh = slice.len() as f64;
        mean.iter_mut().for_each(|v| *v /= nh);
        let w = nh / n;
        for a in 0..p {
            for b in a..p {
                acc[(a, b)] += w * mean[a] * mean[b];
            }
        }
    }
    Ok(())
}

/// Candidate matrix averaged over surrogate columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub matrix: SymMatrix,
    pub used: usize,
    pub skipped: usize,
}

/// Which Euclidean estimator is applied to each surrogate column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnEstimator {
    Ols,
    Sir { slices: usize },
}

/// Averages the per-column OLS outer products `b_j b_jᵀ` or SIR kernels over
/// the columns of `surrogates` (`n × m`). SIR columns whose slicing is
/// degenerate are skipped and counted.
pub fn candidate_matrix(z: &Matrix, surrogates: &Matrix, estimator: ColumnEstimator) -> Result<Candidate> {
    let n = z.rows();
    if surrogates.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: surrogates.rows(),
        });
    }
    let p = z.cols();
    let cols = surrogates.cols();
    let mut acc = Matrix::zeros(p, p);
    let mut skipped = 0;
    match estimator {
        ColumnEstimator::Ols => {
            // B = Zᵀ(Y − Ȳ)/n, M = Σ_j b_j b_jᵀ
            let means = surrogates.column_means();
            let centered = Matrix::from_fn(n, cols, |i, j| surrogates[(i, j)] - means[j]);
            let b = z.t_matmul(&centered)?.scale(1.0 / n as f64);
            for a in 0..p {
                for c in a..p {
                    acc[(a, c)] = linalg::dot(b.row(a), b.row(c));
                }
            }
        }
        ColumnEstimator::Sir { slices } => {
            for j in 0..cols {
                let y = surrogates.column(j);
                match accumulate_sir(z, &y, slices, &mut acc) {
                    Ok(()) => {}
                    Err(Error::DegenerateSlicing) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    let used = cols - skipped;
    if used == 0 {
        return Err(Error::NoUsableSurrogates { skipped });
    }
    let inv = 1.0 / used as f64;
    for a in 0..p {
        for c in a..p {
            let v = acc[(a, c)] * inv;
            acc[(a, c)] = v;
            acc[(c, a)] = v;
        }
    }
    Ok(Candidate {
        matrix: SymMatrix::new(acc)?,
        used,
        skipped,
    })
}

/// Surrogate responses for `method`: random projections or Gram columns.
pub fn surrogates(d: &DistanceMatrix, cfg: &EstimatorConfig) -> Result<Matrix> {
    if cfg.method.uses_projections() {
        Ok(random_projections(d, cfg.projections, cfg.seed))
    } else {
        kernel_gram(d, cfg.bandwidth)
    }
}

/// Full output of [`estimate_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub basis: Basis,
    /// Eigenvalues of the averaged candidate matrix, descending.
    pub eigenvalues: Vec<f64>,
    pub skipped_columns: usize,
}

/// Estimates a `d`-dimensional basis of the central (mean) subspace.
pub fn estimate(x: &Matrix, d: &DistanceMatrix, cfg: &EstimatorConfig) -> Result<Basis> {
    estimate_detailed(x, d, cfg).map(|e| e.basis)
}

pub fn estimate_detailed(x: &Matrix, d: &DistanceMatrix, cfg: &EstimatorConfig) -> Result<Estimate> {
    cfg.validate()?;
    if d.n() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            found: d.n(),
        });
    }
    if cfg.d > x.cols() {
        return Err(Error::config("structural dimension exceeds predictor dimension"));
    }
    let std = standardize(x)?;
    let ys = surrogates(d, cfg)?;
    let estimator = if cfg.method.is_sir() {
        ColumnEstimator::Sir { slices: cfg.slices }
    } else {
        ColumnEstimator::Ols
    };
    let cand = candidate_matrix(&std.z, &ys, estimator)?;
    let eig = matfun::sym_eig(&cand.matrix)?;
    let basis = std.back_transform(&eig.leading_vectors(cfg.d))?;
    Ok(Estimate {
        basis,
        eigenvalues: eig.values,
        skipped_columns: cand.skipped,
    })
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Median => f.write_str("median"),
            Bandwidth::Fixed(g) => write!(f, "{g}"),
        }
    }
}

impl FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("median") {
            return Ok(Bandwidth::Median);
        }
        match s.trim().parse::<f64>() {
            Ok(g) if g > 0.0 && g.is_finite() => Ok(Bandwidth::Fixed(g)),
            _ => Err(Error::InvalidConfig(
                "bandwidth must be `median` or a positive number: ".to_string() + s,
            )),
        }
    }
}
