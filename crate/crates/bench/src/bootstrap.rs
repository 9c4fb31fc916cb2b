//! Nonparametric bootstrap of a one-dimensional basis estimate.

use frechet_sdr::metrics::DistanceMatrix;
use frechet_sdr::rng::{self, Stream};
use frechet_sdr::sdr::{self, Basis, EstimatorConfig};
use frechet_sdr::Matrix;
use rand::Rng;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapReport {
    /// Point estimate of the unit direction.
    pub estimate: Vec<f64>,
    /// Per-coefficient standard deviation across aligned resamples.
    pub se: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Requested resamples.
    pub resamples: usize,
    /// Resamples whose re-estimation failed; excluded from the SEs.
    pub failures: usize,
}

impl BootstrapReport {
    fn from_draws(estimate: Vec<f64>, draws: &[Vec<f64>], resamples: usize) -> Self {
        let p = estimate.len();
        let b = draws.len() as f64;
        let se: Vec<f64> = (0..p)
            .map(|k| {
                let mean = draws.iter().map(|v| v[k]).sum::<f64>() / b;
                let ss = draws.iter().map(|v| (v[k] - mean).powi(2)).sum::<f64>();
                (ss / (b - 1.0)).sqrt()
            })
            .collect();
        let lower = estimate.iter().zip(&se).map(|(e, s)| e - 2.0 * s).collect();
        let upper = estimate.iter().zip(&se).map(|(e, s)| e + 2.0 * s).collect();
        Self {
            estimate,
            se,
            lower,
            upper,
            resamples,
            failures: resamples - draws.len(),
        }
    }

    pub fn covers(&self, k: usize, value: f64) -> bool {
        self.lower[k] <= value && value <= self.upper[k]
    }
}

/// Indices of resample `b` drawn with replacement from `0..n`.
pub fn resample_indices(n: usize, seed: u64, b: usize) -> Vec<usize> {
    let mut r = rng::substream(seed, Stream::Bootstrap, b as u64);
    (0..n).map(|_| r.random_range(0..n)).collect()
}

pub fn bootstrap_basis(
    x: &Matrix,
    d: &DistanceMatrix,
    cfg: &EstimatorConfig,
    resamples: usize,
    seed: u64,
) -> Result<BootstrapReport> {
    let n = x.rows();
    bootstrap_basis_with(x, d, cfg, resamples, |b| resample_indices(n, seed, b))
}

/// As [`bootstrap_basis`], with the resample indices supplied by `indices`.
pub fn bootstrap_basis_with(
    x: &Matrix,
    d: &DistanceMatrix,
    cfg: &EstimatorConfig,
    resamples: usize,
    mut indices: impl FnMut(usize) -> Vec<usize>,
) -> Result<BootstrapReport> {
    if resamples < 2 {
        return Err(BenchError::InvalidResampleCount(resamples));
    }
    if cfg.d != 1 {
        return Err(BenchError::config(format!(
            "bootstrap needs d = 1, got {}",
            cfg.d
        )));
    }
    let point = sdr::estimate(x, d, cfg)?;
    bootstrap_around(&point, x, d, cfg, resamples, &mut indices)
}

/// Bootstraps with an externally supplied point estimate. Resample
/// directions are flipped to a nonnegative inner product with `point`.
pub fn bootstrap_around(
    point: &Basis,
    x: &Matrix,
    d: &DistanceMatrix,
    cfg: &EstimatorConfig,
    resamples: usize,
    mut indices: impl FnMut(usize) -> Vec<usize>,
) -> Result<BootstrapReport> {
    if resamples < 2 {
        return Err(BenchError::InvalidResampleCount(resamples));
    }
    let estimate = point.column(0);
    let mut draws = Vec::with_capacity(resamples);
    for b in 0..resamples {
        let idx = indices(b);
        let Ok(basis) = sdr::estimate(&x.select_rows(&idx), &d.select(&idx), cfg) else {
            continue;
        };
        let mut v = basis.column(0);
        if frechet_sdr::linalg::dot(&v, &estimate) < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        draws.push(v);
    }
    if draws.len() < 2 {
        return Err(BenchError::Execution(format!(
            "only {} of {resamples} bootstrap resamples succeeded",
            draws.len()
        )));
    }
    Ok(BootstrapReport::from_draws(estimate, &draws, resamples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use frechet_sdr::linalg;
    use frechet_sdr::metrics::{self, MetricObject, MetricSpec};
    use frechet_sdr::sdr::Method;
    use frechet_sdr::simgen;
    use rayon::prelude::*;

    fn linear_data(n: usize, beta: &[f64], seed: u64) -> (Matrix, DistanceMatrix) {
        let x = simgen::gen_predictors(n, beta.len(), seed);
        let noise = simgen::gen_predictors(n, 1, seed ^ 0x5eed);
        let objs: Vec<MetricObject> = (0..n)
            .map(|i| MetricObject::Vector(vec![linalg::dot(x.row(i), beta) + 0.5 * noise[(i, 0)]]))
            .collect();
        (x, metrics::distance_matrix(&objs, &MetricSpec::L2).unwrap())
    }

    fn cfg() -> EstimatorConfig {
        EstimatorConfig {
            projections: 50,
            ..EstimatorConfig::new(Method::SaOls, 1).with_seed(3)
        }
    }

    #[test]
    fn needs_two_resamples() {
        let (x, d) = linear_data(30, &[1.0, 0.0, 0.0, 0.0], 1);
        for b in [0, 1] {
            assert!(
                matches!(bootstrap_basis(&x, &d, &cfg(), b, 0), Err(BenchError::InvalidResampleCount(v)) if v == b)
            );
        }
    }

    #[test]
    fn identical_resamples_collapse_the_interval() {
        let (x, d) = linear_data(30, &[1.0, 1.0, 0.0, 0.0], 2);
        let r = bootstrap_basis_with(&x, &d, &cfg(), 5, |_| (0..30).collect()).unwrap();
        assert!(r.se.iter().all(|&s| s == 0.0));
        assert_eq!(r.lower, r.estimate);
        assert_eq!(r.upper, r.estimate);
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn interval_is_estimate_plus_minus_two_se() {
        let (x, d) = linear_data(40, &[1.0, -1.0, 0.5, 0.0], 3);
        let r = bootstrap_basis(&x, &d, &cfg(), 20, 11).unwrap();
        for k in 0..4 {
            assert_eq!(r.lower[k], r.estimate[k] - 2.0 * r.se[k]);
            assert_eq!(r.upper[k], r.estimate[k] + 2.0 * r.se[k]);
        }
        assert!(r.se.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn flipping_the_point_estimate_keeps_the_ses() {
        let (x, d) = linear_data(40, &[1.0, 1.0, 0.0, 0.0], 4);
        let point = sdr::estimate(&x, &d, &cfg()).unwrap();
        let mut flipped = point.clone();
        flipped.flip_column(0);
        let idx = |b| resample_indices(40, 9, b);
        let a = bootstrap_around(&point, &x, &d, &cfg(), 30, idx).unwrap();
        let b = bootstrap_around(&flipped, &x, &d, &cfg(), 30, idx).unwrap();
        for k in 0..4 {
            assert!((a.se[k] - b.se[k]).abs() < 1e-14);
            assert_eq!(a.estimate[k], -b.estimate[k]);
        }
    }

    #[test]
    fn multi_dimensional_configs_are_rejected() {
        let (x, d) = linear_data(30, &[1.0, 0.0, 0.0, 0.0], 5);
        let two = EstimatorConfig { d: 2, ..cfg() };
        assert!(matches!(
            bootstrap_basis(&x, &d, &two, 10, 0),
            Err(BenchError::Config(_))
        ));
    }

    /// Share of (trial, coefficient) pairs whose ±2 SE interval covers the
    /// true normalized coefficient, with the estimate's sign matched to it.
    #[test]
    fn intervals_cover_the_truth() {
        let norm = 3f64.sqrt();
        let beta = [1.0 / norm, 1.0 / norm, -1.0 / norm, 0.0];
        let covered: Vec<usize> = (0..50u64)
            .into_par_iter()
            .map(|t| {
                let (x, d) = linear_data(150, &beta, 100 + t);
                let r = bootstrap_basis(&x, &d, &cfg(), 200, t).unwrap();
                let s = linalg::dot(&r.estimate, &beta).signum();
                (0..4).filter(|&k| r.covers(k, s * beta[k])).count()
            })
            .collect();
        let rate = covered.iter().sum::<usize>() as f64 / 200.0;
        assert!(rate >= 0.8, "coverage {rate}");
    }
}
