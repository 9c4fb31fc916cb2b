use frechet_sdr::linalg;
use frechet_sdr::matfun;
use frechet_sdr::metrics::{self, DistanceMatrix, MetricObject, MetricSpec};
use frechet_sdr::sdr::{self, Basis, ColumnEstimator, EstimatorConfig, Method};
use frechet_sdr::simgen;
use frechet_sdr::Matrix;
use proptest::collection::vec;
use proptest::prelude::*;

fn scalar_distances(y: &[f64]) -> DistanceMatrix {
    let objs: Vec<MetricObject> = y.iter().map(|&v| MetricObject::Vector(vec![v])).collect();
    metrics::distance_matrix(&objs, &MetricSpec::L2).unwrap()
}

fn single_index_data(n: usize, p: usize, seed: u64) -> (Matrix, DistanceMatrix) {
    let x = simgen::gen_predictors(n, p, seed);
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let t = (x[(i, 0)] + x[(i, 1)]) / 2f64.sqrt();
            t + 0.3 * t * t + 0.1 * x[(i, 2)].sin()
        })
        .collect();
    (x, scalar_distances(&y))
}

fn rotation(theta: f64) -> Matrix {
    Matrix::from_rows(&[[theta.cos(), -theta.sin()], [theta.sin(), theta.cos()]]).unwrap()
}

proptest! {
    #[test]
    fn span_invariance(raw in vec(-3.0f64..3.0, 10), theta in 0.0f64..6.3) {
        let m = Matrix::from_vec(5, 2, raw).unwrap();
        prop_assume!(linalg::orthonormalize_columns(&m, 1e-6).cols() == 2);
        let b = Basis::orthonormalize(&m).unwrap();
        let rotated = Basis::from_orthonormal(b.columns().matmul(&rotation(theta)).unwrap()).unwrap();
        prop_assert!(sdr::subspace_delta(&b, &rotated).unwrap() < 1e-10);
    }

    #[test]
    fn basis_columns_are_orthonormal(raw in vec(-3.0f64..3.0, 12)) {
        let m = Matrix::from_vec(4, 3, raw).unwrap();
        prop_assume!(linalg::orthonormalize_columns(&m, 1e-6).cols() == 3);
        let b = Basis::orthonormalize(&m).unwrap();
        let g = b.columns().t_matmul(b.columns()).unwrap();
        prop_assert!(g.max_abs_diff(&Matrix::identity(3)) < 1e-8);
        prop_assert!(sdr::projection_distance(&m, b.columns()).unwrap() < 1e-8);
    }

    #[test]
    fn standardized_predictors_are_white(seed in any::<u64>()) {
        let x = simgen::gen_predictors(40, 4, seed);
        let s = sdr::standardize(&x).unwrap();
        prop_assert!(s.z.column_means().iter().all(|m| m.abs() < 1e-10));
        prop_assert!(s.z.covariance().max_abs_diff(&Matrix::identity(4)) < 1e-6);
    }

    #[test]
    fn ols_ignores_translation(y in vec(-5.0f64..5.0, 12), c in -100.0f64..100.0) {
        let z = sdr::standardize(&simgen::gen_predictors(12, 3, 4)).unwrap().z;
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let a = sdr::ols_direction(&z, &y);
        let b = sdr::ols_direction(&z, &shifted);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-10 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn sir_kernel_is_psd(y in vec(-5.0f64..5.0, 30), h in 2usize..8) {
        let z = sdr::standardize(&simgen::gen_predictors(30, 4, 9)).unwrap().z;
        let slices = sdr::slice_indices(&y, h).unwrap();
        prop_assert_eq!(slices.iter().map(Vec::len).sum::<usize>(), 30);
        let m = sdr::sir_kernel(&z, &y, h).unwrap();
        prop_assert!(matfun::sym_eig(&m).unwrap().values.iter().all(|&l| l >= -1e-10));
    }
}

#[test]
fn scale_invariance_for_every_method() {
    let (x, d) = single_index_data(60, 4, 5);
    let scaled = d.scaled(7.5).unwrap();
    for method in Method::ALL {
        let cfg = EstimatorConfig {
            projections: 200,
            ..EstimatorConfig::new(method, 1).with_seed(2)
        };
        let b1 = sdr::estimate(&x, &d, &cfg).unwrap();
        let b2 = sdr::estimate(&x, &scaled, &cfg).unwrap();
        let delta = sdr::subspace_delta(&b1, &b2).unwrap();
        assert!(delta < 1e-8, "{method}: {delta}");
    }
}

#[test]
fn estimates_are_deterministic() {
    let (x, d) = single_index_data(50, 4, 1);
    for method in Method::ALL {
        let cfg = EstimatorConfig {
            projections: 100,
            ..EstimatorConfig::new(method, 2).with_seed(99)
        };
        assert_eq!(
            sdr::estimate(&x, &d, &cfg).unwrap(),
            sdr::estimate(&x, &d, &cfg).unwrap()
        );
    }
}

/// For `n ≤ 6` the `2ⁿ` normalised sign vectors replace random projections;
/// the accumulated candidate must equal the brute-force average of `b bᵀ`.
#[test]
fn sign_enumeration_matches_brute_force() {
    for n in 3..=6 {
        let x = simgen::gen_predictors(n, 2, n as u64);
        let z = sdr::standardize(&x).unwrap().z;
        let y: Vec<f64> = (0..n).map(|i| x[(i, 0)].exp() - x[(i, 1)]).collect();
        let d = scalar_distances(&y);
        let count = 1usize << n;
        let scale = 1.0 / (n as f64).sqrt();
        let signs = Matrix::from_fn(n, count, |i, j| if j >> i & 1 == 1 { scale } else { -scale });
        let surrogates = d.as_matrix().matmul(&signs).unwrap();
        let cand = sdr::candidate_matrix(&z, &surrogates, ColumnEstimator::Ols).unwrap();

        let mut brute = [[0.0f64; 2]; 2];
        for j in 0..count {
            let v: Vec<f64> = (0..n).map(|i| signs[(i, j)]).collect();
            let yj: Vec<f64> = (0..n).map(|i| (0..n).map(|k| d.get(i, k) * v[k]).sum()).collect();
            let ybar = yj.iter().sum::<f64>() / n as f64;
            let mut b = [0.0f64; 2];
            for i in 0..n {
                for (c, bc) in b.iter_mut().enumerate() {
                    *bc += z[(i, c)] * (yj[i] - ybar) / n as f64;
                }
            }
            for r in 0..2 {
                for c in 0..2 {
                    brute[r][c] += b[r] * b[c] / count as f64;
                }
            }
        }
        for (r, row) in brute.iter().enumerate() {
            for (c, &want) in row.iter().enumerate() {
                let got = cand.matrix.get(r, c);
                assert!((got - want).abs() < 1e-12 * (1.0 + want.abs()));
            }
        }
        assert_eq!(cand.used, count);
    }
}

#[test]
fn degenerate_sir_columns_are_skipped() {
    let z = sdr::standardize(&simgen::gen_predictors(20, 2, 3)).unwrap().z;
    let mut ys = Matrix::zeros(20, 3);
    for i in 0..20 {
        ys[(i, 1)] = i as f64;
    }
    let cand = sdr::candidate_matrix(&z, &ys, ColumnEstimator::Sir { slices: 5 }).unwrap();
    assert_eq!((cand.used, cand.skipped), (1, 2));
    let flat = Matrix::zeros(20, 2);
    assert!(matches!(
        sdr::candidate_matrix(&z, &flat, ColumnEstimator::Sir { slices: 5 }),
        Err(frechet_sdr::Error::NoUsableSurrogates { skipped: 2 })
    ));
}

/// Scalar response `β₁ᵀX + 0.1ε` under the ℓ2 metric.
#[test]
fn euclidean_monte_carlo_sanity() {
    let (n, p, reps) = (500, 10, 50);
    let mut beta = vec![0.0; p];
    beta[0] = 0.5f64.sqrt();
    beta[1] = 0.5f64.sqrt();
    let truth = Basis::from_direction(&beta).unwrap();
    let noise = simgen::gen_predictors(n * reps, 1, 777);
    let mut total = 0.0;
    for r in 0..reps {
        let x = simgen::gen_predictors(n, p, 1000 + r as u64);
        let y: Vec<f64> = (0..n)
            .map(|i| linalg::dot(x.row(i), &beta) + 0.1 * noise[(r * n + i, 0)])
            .collect();
        let cfg = EstimatorConfig::new(Method::SaOls, 1).with_seed(r as u64);
        let b = sdr::estimate(&x, &scalar_distances(&y), &cfg).unwrap();
        total += sdr::subspace_delta(&b, &truth).unwrap();
    }
    let mean = total / reps as f64;
    assert!(mean < 0.3, "mean Δ = {mean}");
}
