//! Sampling checks against closed forms.

use frechet_sdr::metrics::{hellinger_sq, EmpiricalDistribution};
use frechet_sdr::rng::{self, Stream};
use frechet_sdr::simgen;
use rand_distr::{Distribution, Gamma, LogNormal, Poisson};
use statrs::function::gamma::ln_gamma;

const DRAWS: usize = 100_000;
/// Continuous pairs use a fine grid here; at 30 bins the binning bias of a
/// heavy-tailed log-normal pair exceeds the sampling tolerance.
const FINE_BINS: usize = 1000;

fn draw<D: Distribution<f64>>(d: D, index: u64) -> EmpiricalDistribution {
    let mut r = rng::substream(2024, Stream::Response, index);
    EmpiricalDistribution::new((0..DRAWS).map(|_| d.sample(&mut r)).collect()).unwrap()
}

#[test]
fn poisson_pair() {
    let a = draw(Poisson::new(1.0).unwrap(), 0);
    let b = draw(Poisson::new(4.0).unwrap(), 1);
    assert!(a.is_integer_valued());
    let expected = 1.0 - (-0.5f64 * (1.0 - 2.0f64).powi(2)).exp();
    let h = hellinger_sq(&a, &b, 30).unwrap();
    assert!((h - expected).abs() < 0.02, "{h} vs {expected}");
}

#[test]
fn gamma_pair_same_scale() {
    let (a1, a2) = (2.0, 5.0);
    let a = draw(Gamma::new(a1, 3.0).unwrap(), 2);
    let b = draw(Gamma::new(a2, 3.0).unwrap(), 3);
    let expected = 1.0 - (ln_gamma((a1 + a2) / 2.0) - 0.5 * (ln_gamma(a1) + ln_gamma(a2))).exp();
    let h = hellinger_sq(&a, &b, FINE_BINS).unwrap();
    assert!((h - expected).abs() < 0.02, "{h} vs {expected}");
}

#[test]
fn lognormal_pair_same_sigma() {
    let a = draw(LogNormal::new(0.0, 1.0).unwrap(), 4);
    let b = draw(LogNormal::new(1.0, 1.0).unwrap(), 5);
    let expected = 1.0 - (-1.0f64 / 8.0).exp();
    let h = hellinger_sq(&a, &b, FINE_BINS).unwrap();
    assert!((h - expected).abs() < 0.02, "{h} vs {expected}");
}

#[test]
fn t20_moments() {
    let x = simgen::gen_predictors(DRAWS, 2, 31);
    for j in 0..2 {
        let col = x.column(j);
        let mean = col.iter().sum::<f64>() / DRAWS as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (DRAWS - 1) as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 20.0 / 18.0).abs() < 0.05, "variance {var}");
    }
}
