//! Global Fréchet regression in the 1-d Wasserstein space and its
//! leave-one-out prediction error.
//!
//! Distributions are represented by quantile functions on a shared midpoint
//! grid, where the weighted Fréchet mean is the weighted average of quantile
//! functions projected back onto the monotone cone.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::matfun::{self, SymMatrix};
use crate::metrics::{self, DistanceMatrix, EmpiricalDistribution, MetricObject, MetricSpec};
use crate::rng::{self, Stream};
use crate::sdr::{self, EstimatorConfig};

/// Default number of quantile levels.
pub const DEFAULT_QUANTILE_GRID: usize = 100;

/// Nondecreasing values on the levels `(k − ½)/K`, `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFunction {
    values: Vec<f64>,
}

impl QuantileFunction {
    /// Rejects empty or decreasing input.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::config("quantile values must be nondecreasing"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn grid(&self) -> Vec<f64> {
        let k = self.len() as f64;
        (0..self.len()).map(|i| (i as f64 + 0.5) / k).collect()
    }

    /// `∫(F⁻¹ − G⁻¹)²` by the midpoint rule on the shared grid.
    pub fn w2_sq(&self, other: &QuantileFunction) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(s / self.len() as f64)
    }
}

/// Empirical quantiles at the `k` midpoint levels.
pub fn to_quantile(d: &EmpiricalDistribution, k: usize) -> Result<QuantileFunction> {
    if d.is_empty() {
        return Err(Error::EmptySample);
    }
    if k == 0 {
        return Err(Error::config("quantile grid must be nonempty"));
    }
    Ok(QuantileFunction {
        values: (0..k).map(|i| d.midpoint_quantile(i, k)).collect(),
    })
}

/// Global Fréchet regression weights `1 + (s₀ − s̄)ᵀΣ̂⁻¹(Sᵢ − s̄)`, with Σ̂ the
/// covariance of the rows of `s` (divisor `n`).
pub fn global_weights(s: &Matrix, s0: &[f64]) -> Result<Vec<f64>> {
    let (n, q) = (s.rows(), s.cols());
    if s0.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: s0.len(),
        });
    }
    if n <= q {
        return Err(Error::SingularCovariance);
    }
    let mean = s.column_means();
    let cov = SymMatrix::symmetric_part(&s.covariance())?;
    let chol = matfun::cholesky(&cov).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => Error::SingularCovariance,
        other => other,
    })?;
    let centered0: Vec<f64> = s0.iter().zip(&mean).map(|(a, m)| a - m).collect();
    // a = Σ̂⁻¹(s₀ − s̄) via L Lᵀ a = (s₀ − s̄)
    let y = chol.solve(&centered0)?;
    let a = chol.solve_transpose(&y)?;
    Ok((0..n)
        .map(|i| {
            let lin: f64 = s
                .row(i)
                .iter()
                .zip(&mean)
                .zip(&a)
                .map(|((v, m), c)| (v - m) * c)
                .sum();
            1.0 + lin
        })
        .collect())
}

/// Predicted quantile function at `s0`.
pub fn global_frechet_predict(s: &Matrix, qs: &[QuantileFunction], s0: &[f64]) -> Result<QuantileFunction> {
    if qs.len() != s.rows() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            found: qs.len(),
        });
    }
    let k = qs.first().ok_or(Error::EmptySample)?.len();
    if let Some(bad) = qs.iter().find(|q| q.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: bad.len(),
        });
    }
    let w = global_weights(s, s0)?;
    // The weights sum to n, so (1/n)Σ wᵢqᵢ = q₁ + (1/n)Σ wᵢ(qᵢ − q₁); the
    // anchored form reproduces identical responses exactly.
    let anchor = qs[0].values();
    let n = qs.len() as f64;
    let mut raw = vec![0.0; k];
    for (wi, q) in w.iter().zip(qs) {
        for ((r, v), a) in raw.iter_mut().zip(q.values()).zip(anchor) {
            *r += wi * (v - a);
        }
    }
    raw.iter_mut().zip(anchor).for_each(|(r, a)| *r = a + *r / n);
    Ok(QuantileFunction {
        values: matfun::isotonic_nondecreasing(&raw),
    })
}

/// Pointwise average of quantile functions (the Wasserstein barycenter).
pub fn barycenter(qs: &[QuantileFunction]) -> Result<QuantileFunction> {
    let anchor = qs.first().ok_or(Error::EmptySample)?.values();
    let k = anchor.len();
    let mut mean = vec![0.0; k];
    for q in qs {
        if q.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: q.len(),
            });
        }
        for ((m, v), a) in mean.iter_mut().zip(q.values()).zip(anchor) {
            *m += v - a;
        }
    }
    mean.iter_mut()
        .zip(anchor)
        .for_each(|(m, a)| *m = a + *m / qs.len() as f64);
    Ok(QuantileFunction { values: mean })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    /// Mean of `per_observation_errors`.
    pub delta: f64,
    /// Squared W2 errors.
    pub per_observation_errors: Vec<f64>,
}

impl PredictionReport {
    pub fn from_errors(errors: Vec<f64>) -> Self {
        let delta = errors.iter().sum::<f64>() / errors.len().max(1) as f64;
        Self {
            delta,
            per_observation_errors: errors,
        }
    }
}

/// Shared state for leave-one-out folds. The distance matrix is computed once
/// and restricted per fold, which is exact because every distribution metric
/// is a function of the pair alone.
#[derive(Debug, Clone)]
pub struct LooProblem {
    x: Matrix,
    quantiles: Vec<QuantileFunction>,
    distances: DistanceMatrix,
    cfg: EstimatorConfig,
}

impl LooProblem {
    pub fn new(
        x: &Matrix,
        dists: &[EmpiricalDistribution],
        metric: &MetricSpec,
        cfg: &EstimatorConfig,
        grid: usize,
    ) -> Result<Self> {
        let n = x.rows();
        if dists.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: dists.len(),
            });
        }
        if n < x.cols() + 2 {
            return Err(Error::config("leave-one-out needs n >= p + 2"));
        }
        cfg.validate()?;
        let quantiles = dists
            .iter()
            .map(|d| to_quantile(d, grid))
            .collect::<Result<Vec<_>>>()?;
        let objects: Vec<MetricObject> = dists.iter().cloned().map(MetricObject::Distribution).collect();
        let distances = metrics::distance_matrix(&objects, metric)?;
        Ok(Self {
            x: x.clone(),
            quantiles,
            distances,
            cfg: cfg.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn quantiles(&self) -> &[QuantileFunction] {
        &self.quantiles
    }

    /// Squared W2 error of the prediction for observation `i` from a fit on
    /// the other `n − 1`.
    pub fn fold(&self, i: usize) -> Result<f64> {
        self.fold_inner(i).map_err(|e| Error::Fold {
            index: i,
            source: Box::new(e),
        })
    }

    fn fold_inner(&self, i: usize) -> Result<f64> {
        let keep: Vec<usize> = (0..self.n()).filter(|&j| j != i).collect();
        let x = self.x.select_rows(&keep);
        let d = self.distances.select(&keep);
        let cfg = EstimatorConfig {
            seed: rng::derive_seed(self.cfg.seed, &[Stream::Fold as u64, i as u64]),
            ..self.cfg.clone()
        };
        let basis = sdr::estimate(&x, &d, &cfg)?;
        let s = basis.reduce(&x)?;
        let s0 = basis
            .columns()
            .t_matmul(&Matrix::from_columns(&[self.x.row(i).to_vec()])?)?;
        let qs: Vec<QuantileFunction> = keep.iter().map(|&j| self.quantiles[j].clone()).collect();
        let pred = global_frechet_predict(&s, &qs, s0.as_slice())?;
        self.quantiles[i].w2_sq(&pred)
    }

    /// Runs every fold in order; the first failure aborts.
    pub fn run(&self) -> Result<PredictionReport> {
        let errors = (0..self.n()).map(|i| self.fold(i)).collect::<Result<Vec<_>>>()?;
        Ok(PredictionReport::from_errors(errors))
    }

    /// Error of the predictor that always returns the pooled barycenter.
    pub fn null_report(&self) -> Result<PredictionReport> {
        let bary = barycenter(&self.quantiles)?;
        let errors = self
            .quantiles
            .iter()
            .map(|q| q.w2_sq(&bary))
            .collect::<Result<Vec<_>>>()?;
        Ok(PredictionReport::from_errors(errors))
    }
}

/// Average leave-one-out squared W2 prediction error δ.
pub fn loo_prediction_error(
    x: &Matrix,
    dists: &[EmpiricalDistribution],
    metric: &MetricSpec,
    cfg: &EstimatorConfig,
    grid: usize,
) -> Result<PredictionReport> {
    LooProblem::new(x, dists, metric, cfg, grid)?.run()
}
