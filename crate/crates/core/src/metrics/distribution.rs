use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

use super::Order;

/// A univariate sample, stored sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
    integer_valued: bool,
}

impl EmpiricalDistribution {
    /// Sorts the sample; the integer flag is set when every value is a whole
    /// number.
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        samples.sort_by(f64::total_cmp);
        let integer_valued = samples.iter().all(|&v| math::floor(v) == v);
        Ok(Self {
            values: samples,
            integer_valued,
        })
    }

    /// Overrides the detected integer flag, e.g. to force equal-width bins
    /// on rounded continuous data.
    pub fn with_integer_flag(mut self, integer_valued: bool) -> Self {
        self.integer_valued = integer_valued && self.values.iter().all(|&v| math::floor(v) == v);
        self
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn is_integer_valued(&self) -> bool {
        self.integer_valued
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Standard deviation with divisor `m`.
    pub fn sd(&self) -> f64 {
        let mu = self.mean();
        let var = self.values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / self.len() as f64;
        math::sqrt(var)
    }

    /// Left-continuous empirical quantile at the midpoint level
    /// `(k + ½)/grid` (`k` zero-based): the order statistic
    /// `⌈(k + ½)·m/grid⌉`, computed in exact integer arithmetic.
    #[inline]
    pub fn midpoint_quantile(&self, k: usize, grid: usize) -> f64 {
        let m = self.len();
        let num = (2 * k + 1) * m;
        let den = 2 * grid;
        let idx = num.div_ceil(den).clamp(1, m) - 1;
        self.values[idx]
    }
}

/// Univariate p-Wasserstein distance between empirical quantile functions,
/// evaluated on the midpoint grid with `max(len a, len b)` levels. For equal
/// sizes this is the sorted-sample pairing.
pub fn wasserstein(a: &EmpiricalDistribution, b: &EmpiricalDistribution, p: Order) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let grid = a.len().max(b.len());
    let diffs = (0..grid).map(|k| a.midpoint_quantile(k, grid) - b.midpoint_quantile(k, grid));
    let g = grid as f64;
    Ok(match p {
        Order::One => diffs.map(math::abs).sum::<f64>() / g,
        Order::Two => math::sqrt(diffs.map(|d| d * d).sum::<f64>() / g),
    })
}

/// Squared Hellinger distance `1 − Σ√(p̂ q̂)` between shared-bin histograms.
///
/// Two integer-valued samples are binned on the integers; otherwise `bins`
/// equal-width bins span the pooled range of the pair.
pub fn hellinger_sq(a: &EmpiricalDistribution, b: &EmpiricalDistribution, bins: usize) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if bins < 2 {
        return Err(Error::InvalidBins(bins));
    }
    let affinity = if a.is_integer_valued() && b.is_integer_valued() {
        integer_affinity(a.values(), b.values())
    } else {
        binned_affinity(a.values(), b.values(), bins)
    };
    Ok((1.0 - affinity).clamp(0.0, 1.0))
}

/// `√hellinger_sq`, the form consumed by the estimators.
pub fn hellinger(a: &EmpiricalDistribution, b: &EmpiricalDistribution, bins: usize) -> Result<f64> {
    hellinger_sq(a, b, bins).map(math::sqrt)
}

/// Bhattacharyya affinity of the two empirical pmfs on their exact values.
fn integer_affinity(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sum = 0.0;
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            i += 1;
        } else if b[j] < a[i] {
            j += 1;
        } else {
            let v = a[i];
            let ci = a[i..].iter().take_while(|&&x| x == v).count();
            let cj = b[j..].iter().take_while(|&&x| x == v).count();
            sum += math::sqrt((ci as f64 / na) * (cj as f64 / nb));
            i += ci;
            j += cj;
        }
    }
    sum
}

fn binned_affinity(a: &[f64], b: &[f64], bins: usize) -> f64 {
    let lo = a[0].min(b[0]);
    let hi = a[a.len() - 1].max(b[b.len() - 1]);
    if hi <= lo {
        return 1.0;
    }
    let width = hi - lo;
    let bin_of = |v: f64| -> usize {
        let t = math::floor((v - lo) / width * bins as f64);
        (t.max(0.0) as usize).min(bins - 1)
    };
    let mut pa = vec![0usize; bins];
    let mut pb = vec![0usize; bins];
    a.iter().for_each(|&v| pa[bin_of(v)] += 1);
    b.iter().for_each(|&v| pb[bin_of(v)] += 1);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    pa.iter()
        .zip(&pb)
        .map(|(&x, &y)| math::sqrt((x as f64 / na) * (y as f64 / nb)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn construction() {
        let d = dist(&[3.0, 1.0, 2.0]);
        assert_eq!(d.values(), &[1.0, 2.0, 3.0]);
        assert!(d.is_integer_valued());
        assert!(!dist(&[0.5, 1.0]).is_integer_valued());
        assert_eq!(EmpiricalDistribution::new(vec![]), Err(Error::EmptySample));
        assert!(EmpiricalDistribution::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn wasserstein_examples() {
        let a = dist(&[1.0, 2.0, 3.0]);
        let b = dist(&[2.0, 3.0, 4.0]);
        assert_eq!(wasserstein(&a, &b, Order::One).unwrap(), 1.0);
        assert_eq!(wasserstein(&a, &b, Order::Two).unwrap(), 1.0);
        assert_eq!(wasserstein(&a, &a, Order::Two).unwrap(), 0.0);
        let shifted = dist(&[1.0 - 2.5, 2.0 - 2.5, 3.0 - 2.5]);
        assert_eq!(wasserstein(&a, &shifted, Order::One).unwrap(), 2.5);
    }

    #[test]
    fn wasserstein_unequal_sizes() {
        // quantiles of {0,1} on a 4-point midpoint grid: 0,0,1,1
        let a = dist(&[0.0, 1.0]);
        let b = dist(&[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(wasserstein(&a, &b, Order::One).unwrap(), 0.0);
        let c = dist(&[0.0, 1.0, 2.0, 3.0]);
        // pairs (0,0) (0,1) (1,2) (1,3) → mean |diff| = 1
        assert_eq!(wasserstein(&a, &c, Order::One).unwrap(), 1.0);
    }

    #[test]
    fn hellinger_examples() {
        let a = dist(&[0.1, 0.2, 0.3]);
        assert_eq!(hellinger_sq(&a, &a, 30).unwrap(), 0.0);
        let lo = dist(&[0.0, 0.1, 0.2]);
        let hi = dist(&[5.0, 5.1, 5.2]);
        assert_eq!(hellinger_sq(&lo, &hi, 30).unwrap(), 1.0);
        assert_eq!(hellinger_sq(&a, &a, 1), Err(Error::InvalidBins(1)));
    }

    #[test]
    fn hellinger_integer_bins() {
        // pmfs {0: ½, 1: ½} and {1: ½, 2: ½}: affinity ½
        let a = dist(&[0.0, 1.0]);
        let b = dist(&[1.0, 2.0]);
        assert_abs_diff_eq!(hellinger_sq(&a, &b, 30).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(hellinger(&a, &b, 30).unwrap(), 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn constant_samples_share_one_bin() {
        let a = dist(&[2.5, 2.5]);
        assert_eq!(hellinger_sq(&a, &a, 30).unwrap(), 0.0);
    }
}
