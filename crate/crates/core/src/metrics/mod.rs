//! Distances on the four response spaces and the pairwise distance matrix.
//!
//! | family | object | metrics |
//! |--------|--------|---------|
//! | Euclidean | `Vec<f64>` | ℓ1, ℓ2, Mahalanobis |
//! | distributions | [`EmpiricalDistribution`] | W1, W2, Hellinger |
//! | SPD matrices | [`SymMatrix`] | Frobenius, Cholesky-Frobenius, log-Frobenius |
//! | networks | [`WeightedGraph`] | degree / closeness centrality, diffusion |

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::matfun::{self, SymMatrix};

mod distribution;
mod euclid;
mod graph;
mod spd;

pub use distribution::{hellinger, hellinger_sq, wasserstein, EmpiricalDistribution};
pub use euclid::{lp_distance, mahalanobis};
pub use graph::{centrality, centrality_distance, diffusion_distance, DiffusionSpectrum, WeightedGraph};
pub use spd::frobenius_variant;

/// Default number of equal-width Hellinger bins for continuous samples.
pub const DEFAULT_HELLINGER_BINS: usize = 30;
/// Default number of τ grid points for the diffusion distance.
pub const DEFAULT_TAU_GRID: usize = 50;

/// Exponent of an ℓp or Wasserstein distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrobeniusVariant {
    Raw,
    Cholesky,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CentralityKind {
    Degree,
    /// Harmonic closeness on the binarised graph.
    Closeness,
}

/// Covariance used by the Mahalanobis distance.
#[derive(Debug, Clone, PartialEq)]
pub enum Covariance {
    /// Sample covariance of the stacked response vectors.
    Sample,
    Explicit(SymMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    L1,
    L2,
    Mahalanobis(Covariance),
    Wasserstein(Order),
    Hellinger { bins: usize },
    Frobenius(FrobeniusVariant),
    Centrality(CentralityKind),
    Diffusion { tau_grid_size: usize },
}

/// A response object in one of the supported metric spaces.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricObject {
    Vector(Vec<f64>),
    Distribution(EmpiricalDistribution),
    Spd(SymMatrix),
    Graph(WeightedGraph),
}

impl MetricObject {
    pub fn kind(&self) -> ObjectKind {
        match self {
            MetricObject::Vector(_) => ObjectKind::Vector,
            MetricObject::Distribution(_) => ObjectKind::Distribution,
            MetricObject::Spd(_) => ObjectKind::Spd,
            MetricObject::Graph(_) => ObjectKind::Graph,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Vector,
    Distribution,
    Spd,
    Graph,
}

impl MetricSpec {
    pub fn hellinger() -> Self {
        MetricSpec::Hellinger {
            bins: DEFAULT_HELLINGER_BINS,
        }
    }

    pub fn diffusion() -> Self {
        MetricSpec::Diffusion {
            tau_grid_size: DEFAULT_TAU_GRID,
        }
    }

    /// The object variant this metric applies to.
    pub fn object_kind(&self) -> ObjectKind {
        match self {
            MetricSpec::L1 | MetricSpec::L2 | MetricSpec::Mahalanobis(_) => ObjectKind::Vector,
            MetricSpec::Wasserstein(_) | MetricSpec::Hellinger { .. } => ObjectKind::Distribution,
            MetricSpec::Frobenius(_) => ObjectKind::Spd,
            MetricSpec::Centrality(_) | MetricSpec::Diffusion { .. } => ObjectKind::Graph,
        }
    }

    /// Short machine-readable name, as used in emitted tables.
    pub fn label(&self) -> &'static str {
        match self {
            MetricSpec::L1 => "l1",
            MetricSpec::L2 => "l2",
            MetricSpec::Mahalanobis(_) => "mahalanobis",
            MetricSpec::Wasserstein(Order::One) => "w1",
            MetricSpec::Wasserstein(Order::Two) => "w2",
            MetricSpec::Hellinger { .. } => "hellinger",
            MetricSpec::Frobenius(FrobeniusVariant::Raw) => "frobenius",
            MetricSpec::Frobenius(FrobeniusVariant::Cholesky) => "chol_frobenius",
            MetricSpec::Frobenius(FrobeniusVariant::Log) => "log_frobenius",
            MetricSpec::Centrality(CentralityKind::Degree) => "degree_centrality",
            MetricSpec::Centrality(CentralityKind::Closeness) => "closeness_centrality",
            MetricSpec::Diffusion { .. } => "diffusion",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MetricSpec::Hellinger { bins } if *bins < 2 => Err(Error::InvalidBins(*bins)),
            MetricSpec::Diffusion { tau_grid_size: 0 } => {
                Err(Error::config("diffusion tau grid must have at least one point"))
            }
            MetricSpec::Mahalanobis(Covariance::Explicit(s)) => matfun::cholesky(s).map(|_| ()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSpec::Hellinger { bins } if *bins != DEFAULT_HELLINGER_BINS => {
                write!(f, "hellinger:{bins}")
            }
            MetricSpec::Diffusion { tau_grid_size } if *tau_grid_size != DEFAULT_TAU_GRID => {
                write!(f, "diffusion:{tau_grid_size}")
            }
            _ => f.write_str(self.label()),
        }
    }
}

/// Parses labels such as `l1`, `mahalanobis`, `w2`, `hellinger:40`,
/// `log_frobenius`, `closeness_centrality` or `diffusion:25`. The short
/// table names (`md`, `H`, `F`, `cholF`, `logF`, `Cd`, `Cc`, `Dd`) are also
/// accepted.
impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let parse_arg = |default: usize| -> Result<usize> {
            match arg {
                None => Ok(default),
                Some(a) => a.trim().parse().map_err(|_| Error::UnknownMetric(s.to_string())),
            }
        };
        let lower = name.trim().to_ascii_lowercase();
        let spec = match lower.as_str() {
            "l1" => MetricSpec::L1,
            "l2" => MetricSpec::L2,
            "mahalanobis" | "md" => MetricSpec::Mahalanobis(Covariance::Sample),
            "w1" => MetricSpec::Wasserstein(Order::One),
            "w2" => MetricSpec::Wasserstein(Order::Two),
            "hellinger" | "h" => MetricSpec::Hellinger {
                bins: parse_arg(DEFAULT_HELLINGER_BINS)?,
            },
            "frobenius" | "f" => MetricSpec::Frobenius(FrobeniusVariant::Raw),
            "chol_frobenius" | "cholf" => MetricSpec::Frobenius(FrobeniusVariant::Cholesky),
            "log_frobenius" | "logf" => MetricSpec::Frobenius(FrobeniusVariant::Log),
            "degree_centrality" | "cd" => MetricSpec::Centrality(CentralityKind::Degree),
            "closeness_centrality" | "cc" => MetricSpec::Centrality(CentralityKind::Closeness),
            "diffusion" | "dd" => MetricSpec::Diffusion {
                tau_grid_size: parse_arg(DEFAULT_TAU_GRID)?,
            },
            _ => return Err(Error::UnknownMetric(s.to_string())),
        };
        if arg.is_some() && !matches!(spec, MetricSpec::Hellinger { .. } | MetricSpec::Diffusion { .. }) {
            return Err(Error::UnknownMetric(s.to_string()));
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Symmetric, nonnegative, zero-diagonal matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    entries: Matrix,
    metric: Option<MetricSpec>,
}

impl DistanceMatrix {
    /// Validates a precomputed matrix. `metric` is `None` when the producing
    /// metric is unknown (e.g. ingested from a file).
    pub fn from_entries(entries: Matrix, metric: Option<MetricSpec>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.rows(),
                found: entries.cols(),
            });
        }
        if !entries.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = entries.rows();
        for i in 0..n {
            if entries[(i, i)] != 0.0 {
                return Err(Error::config(format!("distance diagonal ({i}, {i}) is not zero")));
            }
            for j in (i + 1)..n {
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                if entries[(i, j)] < 0.0 {
                    return Err(Error::config(format!("negative distance at ({i}, {j})")));
                }
            }
        }
        Ok(Self { entries, metric })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn metric(&self) -> Option<&MetricSpec> {
        self.metric.as_ref()
    }

    /// `c·D` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::config("distance scale must be positive and finite"));
        }
        Ok(Self {
            entries: self.entries.scale(c),
            metric: self.metric.clone(),
        })
    }

    /// Sub-matrix on `idx × idx`; repeated indices are allowed (bootstrap).
    pub fn select(&self, idx: &[usize]) -> Self {
        let entries = Matrix::from_fn(idx.len(), idx.len(), |a, b| self.entries[(idx[a], idx[b])]);
        Self {
            entries,
            metric: self.metric.clone(),
        }
    }

    /// Strictly-upper-triangle entries in row order.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            out.extend_from_slice(&self.entries.row(i)[i + 1..]);
        }
        out
    }
}

fn mismatch(spec: &MetricSpec) -> Error {
    Error::VariantMismatch { metric: spec.label() }
}

/// Per-object preprocessing so each pair costs only the final comparison.
enum Prepared {
    Vectors(Vec<Vec<f64>>),
    Mahalanobis(Vec<Vec<f64>>, matfun::LowerTriangular),
    Distributions(Vec<EmpiricalDistribution>),
    Matrices(Vec<Matrix>),
    Centralities(Vec<Vec<f64>>),
    Spectra(Vec<DiffusionSpectrum>),
}

fn collect_vectors(objects: &[MetricObject], spec: &MetricSpec) -> Result<Vec<Vec<f64>>> {
    let vs = objects
        .iter()
        .map(|o| match o {
            MetricObject::Vector(v) => Ok(v.clone()),
            _ => Err(mismatch(spec)),
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(first) = vs.first() {
        if let Some(bad) = vs.iter().find(|v| v.len() != first.len()) {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                found: bad.len(),
            });
        }
    }
    Ok(vs)
}

/// Sample covariance (divisor `n − 1`) of the stacked vectors, regularised
/// by `1e-8·trace/r·I` when the plain estimate is not positive definite.
pub fn sample_covariance_factor(vectors: &[Vec<f64>]) -> Result<matfun::LowerTriangular> {
    let n = vectors.len();
    let r = vectors.first().map_or(0, Vec::len);
    if n <= r || r == 0 {
        return Err(Error::SingularSampleCovariance);
    }
    let x = Matrix::from_rows(vectors)?;
    let cov = x.covariance().scale(n as f64 / (n as f64 - 1.0));
    let cov = SymMatrix::symmetric_part(&cov)?;
    if let Ok(l) = matfun::cholesky(&cov) {
        return Ok(l);
    }
    let trace: f64 = (0..r).map(|i| cov.get(i, i)).sum();
    let ridge = 1e-8 * trace / r as f64;
    let mut reg = cov.into_matrix();
    for i in 0..r {
        reg[(i, i)] += ridge;
    }
    matfun::cholesky(&SymMatrix::new(reg)?).map_err(|_| Error::SingularSampleCovariance)
}

fn prepare(objects: &[MetricObject], spec: &MetricSpec) -> Result<Prepared> {
    Ok(match spec {
        MetricSpec::L1 | MetricSpec::L2 => Prepared::Vectors(collect_vectors(objects, spec)?),
        MetricSpec::Mahalanobis(cov) => {
            let vs = collect_vectors(objects, spec)?;
            let factor = match cov {
                Covariance::Sample => sample_covariance_factor(&vs)?,
                Covariance::Explicit(s) => {
                    if let Some(v) = vs.first() {
                        if v.len() != s.dim() {
                            return Err(Error::DimensionMismatch {
                                expected: s.dim(),
                                found: v.len(),
                            });
                        }
                    }
                    matfun::cholesky(s)?
                }
            };
            Prepared::Mahalanobis(vs, factor)
        }
        MetricSpec::Wasserstein(_) | MetricSpec::Hellinger { .. } => Prepared::Distributions(
            objects
                .iter()
                .map(|o| match o {
                    MetricObject::Distribution(d) => Ok(d.clone()),
                    _ => Err(mismatch(spec)),
                })
                .collect::<Result<_>>()?,
        ),
        MetricSpec::Frobenius(variant) => {
            let mats = objects
                .iter()
                .map(|o| match o {
                    MetricObject::Spd(a) => spd::transform(a, *variant),
                    _ => Err(mismatch(spec)),
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = mats.first() {
                if let Some(bad) = mats.iter().find(|m| m.rows() != first.rows()) {
                    return Err(Error::DimensionMismatch {
                        expected: first.rows(),
                        found: bad.rows(),
                    });
                }
            }
            Prepared::Matrices(mats)
        }
        MetricSpec::Centrality(kind) => {
            let cs = objects
                .iter()
                .map(|o| match o {
                    MetricObject::Graph(g) => Ok(centrality(g, *kind)),
                    _ => Err(mismatch(spec)),
                })
                .collect::<Result<Vec<_>>>()?;
            check_node_counts(cs.iter().map(Vec::len))?;
            Prepared::Centralities(cs)
        }
        MetricSpec::Diffusion { .. } => {
            let ss = objects
                .iter()
                .map(|o| match o {
                    MetricObject::Graph(g) => DiffusionSpectrum::new(g),
                    _ => Err(mismatch(spec)),
                })
                .collect::<Result<Vec<_>>>()?;
            check_node_counts(ss.iter().map(DiffusionSpectrum::node_count))?;
            Prepared::Spectra(ss)
        }
    })
}

fn check_node_counts(mut counts: impl Iterator<Item = usize>) -> Result<()> {
    if let Some(first) = counts.next() {
        if let Some(bad) = counts.find(|&c| c != first) {
            return Err(Error::NodeCountMismatch(first, bad));
        }
    }
    Ok(())
}

impl Prepared {
    fn pair(&self, spec: &MetricSpec, i: usize, j: usize) -> Result<f64> {
        match (self, spec) {
            (Prepared::Vectors(v), MetricSpec::L1) => lp_distance(&v[i], &v[j], Order::One),
            (Prepared::Vectors(v), _) => lp_distance(&v[i], &v[j], Order::Two),
            (Prepared::Mahalanobis(v, l), _) => euclid::mahalanobis_factored(&v[i], &v[j], l),
            (Prepared::Distributions(d), MetricSpec::Wasserstein(order)) => wasserstein(&d[i], &d[j], *order),
            (Prepared::Distributions(d), MetricSpec::Hellinger { bins }) => hellinger(&d[i], &d[j], *bins),
            (Prepared::Matrices(m), _) => Ok(m[i].sub(&m[j])?.frobenius_norm()),
            (Prepared::Centralities(c), _) => Ok(graph::l1_gap(&c[i], &c[j])),
            (Prepared::Spectra(s), MetricSpec::Diffusion { tau_grid_size }) => {
                Ok(s[i].distance_to(&s[j], *tau_grid_size))
            }
            _ => Err(mismatch(spec)),
        }
    }
}

/// Builds the `n × n` pairwise distance matrix. Only the upper triangle is
/// evaluated; each entry is written independently.
pub fn distance_matrix(objects: &[MetricObject], spec: &MetricSpec) -> Result<DistanceMatrix> {
    spec.validate()?;
    let n = objects.len();
    if objects.iter().any(|o| o.kind() != spec.object_kind()) {
        return Err(mismatch(spec));
    }
    let prepared = prepare(objects, spec)?;
    let mut entries = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = prepared.pair(spec, i, j)?;
            entries[(i, j)] = d;
            entries[(j, i)] = d;
        }
    }
    DistanceMatrix::from_entries(entries, Some(spec.clone()))
}

impl From<Order> for u32 {
    fn from(o: Order) -> u32 {
        match o {
            Order::One => 1,
            Order::Two => 2,
        }
    }
}

impl TryFrom<u32> for Order {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        match p {
            1 => Ok(Order::One),
            2 => Ok(Order::Two),
            _ => Err(Error::config(format!("order must be 1 or 2, got {p}"))),
        }
    }
}

/// Labels of every metric the crate knows, in table order.
pub const METRIC_LABELS: [&str; 12] = [
    "l1",
    "l2",
    "mahalanobis",
    "w1",
    "w2",
    "hellinger",
    "frobenius",
    "chol_frobenius",
    "log_frobenius",
    "degree_centrality",
    "closeness_centrality",
    "diffusion",
];

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_object_gives_zero_matrix() {
        let d = distance_matrix(&[MetricObject::Vector(vec![1.0, 2.0])], &MetricSpec::L2).unwrap();
        assert_eq!(d.n(), 1);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn three_scalars_under_l1() {
        let objs: Vec<_> = [0.0, 3.0, 4.0]
            .iter()
            .map(|&v| MetricObject::Vector(vec![v]))
            .collect();
        let d = distance_matrix(&objs, &MetricSpec::L1).unwrap();
        assert_eq!(d.upper_triangle(), vec![3.0, 4.0, 1.0]);
        assert_eq!(d.get(2, 1), 1.0);
    }

    #[test]
    fn variant_mismatch_is_reported() {
        let objs = vec![MetricObject::Vector(vec![0.0])];
        assert!(matches!(
            distance_matrix(&objs, &MetricSpec::Wasserstein(Order::One)),
            Err(Error::VariantMismatch { .. })
        ));
    }

    #[test]
    fn mahalanobis_sample_mode_needs_more_points_than_dims() {
        let objs: Vec<_> = (0..2)
            .map(|i| MetricObject::Vector(vec![i as f64, 1.0]))
            .collect();
        assert_eq!(
            distance_matrix(&objs, &MetricSpec::Mahalanobis(Covariance::Sample)),
            Err(Error::SingularSampleCovariance)
        );
    }

    #[test]
    fn labels_round_trip() {
        for label in METRIC_LABELS {
            let spec: MetricSpec = label.parse().unwrap();
            assert_eq!(spec.label(), label);
            assert_eq!(spec.to_string().parse::<MetricSpec>().unwrap(), spec);
        }
        assert_eq!(
            "hellinger:40".parse::<MetricSpec>().unwrap(),
            MetricSpec::Hellinger { bins: 40 }
        );
        assert_eq!("logF".parse::<MetricSpec>().unwrap().label(), "log_frobenius");
        assert!("hellinger:1".parse::<MetricSpec>().is_err());
        assert!("l3".parse::<MetricSpec>().is_err());
        assert!("l1:3".parse::<MetricSpec>().is_err());
    }

    #[test]
    fn from_entries_validates() {
        let asym = Matrix::from_rows(&[[0.0, 1.0], [2.0, 0.0]]).unwrap();
        assert!(matches!(
            DistanceMatrix::from_entries(asym, None),
            Err(Error::NotSymmetric { .. })
        ));
        let neg = Matrix::from_rows(&[[0.0, -1.0], [-1.0, 0.0]]).unwrap();
        assert!(DistanceMatrix::from_entries(neg, None).is_err());
        let diag = Matrix::from_rows(&[[1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(DistanceMatrix::from_entries(diag, None).is_err());
    }
}
