//! Seeded simulation models.
//!
//! Predictors are i.i.d. `t₂₀(0, I_p)`. Responses follow Models I–XI:
//!
//! | model | space | response |
//! |-------|-------|----------|
//! | I, II | ℝ² | trigonometric / polynomial-exponential with Gaussian error |
//! | III, IV, V | distributions | 50 draws from Poisson, log-normal, Gamma |
//! | VI, VII, VIII | SPD | `expm` of a correlation, `2ΛΛᵀ`, 3×3 correlation |
//! | IX, X, XI | networks on 50 nodes | Erdős–Rényi, preferential attachment, SBM |
//!
//! Observation `i` draws from substreams keyed by `(seed, label, i)`, so the
//! data do not depend on generation order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, LogNormal, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::matfun::{self, SymMatrix};
use crate::math;
use crate::metrics::{EmpiricalDistribution, MetricObject, WeightedGraph};
use crate::rng::{self, Stream, StreamRng};
use crate::sdr::Basis;

/// Degrees of freedom of the predictor law.
pub const PREDICTOR_DF: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
    X,
    XI,
}

/// Response space of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResponseSpace {
    Euclidean,
    Distribution,
    Spd,
    Network,
}

impl ModelId {
    pub const ALL: [ModelId; 11] = [
        ModelId::I,
        ModelId::II,
        ModelId::III,
        ModelId::IV,
        ModelId::V,
        ModelId::VI,
        ModelId::VII,
        ModelId::VIII,
        ModelId::IX,
        ModelId::X,
        ModelId::XI,
    ];

    pub fn roman(self) -> &'static str {
        match self {
            ModelId::I => "I",
            ModelId::II => "II",
            ModelId::III => "III",
            ModelId::IV => "IV",
            ModelId::V => "V",
            ModelId::VI => "VI",
            ModelId::VII => "VII",
            ModelId::VIII => "VIII",
            ModelId::IX => "IX",
            ModelId::X => "X",
            ModelId::XI => "XI",
        }
    }

    pub fn space(self) -> ResponseSpace {
        use ModelId::*;
        match self {
            I | II => ResponseSpace::Euclidean,
            III | IV | V => ResponseSpace::Distribution,
            VI | VII | VIII => ResponseSpace::Spd,
            IX | X | XI => ResponseSpace::Network,
        }
    }

    /// Dimension of the true basis η.
    pub fn structural_dim(self) -> usize {
        match self {
            ModelId::II | ModelId::VII | ModelId::VIII => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t
            .strip_prefix("model")
            .or_else(|| t.strip_prefix("Model"))
            .unwrap_or(t)
            .trim_start_matches([' ', '_', '-']);
        if let Ok(k) = t.parse::<usize>() {
            if (1..=11).contains(&k) {
                return Ok(ModelId::ALL[k - 1]);
            }
        }
        ModelId::ALL
            .into_iter()
            .find(|m| m.roman().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownModel(String::from(s)))
    }
}

/// Reading of the second Gamma parameter in Model V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GammaParam {
    Scale,
    Rate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub id: ModelId,
    pub n: usize,
    pub p: usize,
    /// `(1, 1, 0, …)/√2`.
    pub beta1: Vec<f64>,
    /// `(0, 0, 1, 1, 0, …)/√2`.
    pub beta2: Vec<f64>,
    /// Multiplier of the Gaussian error in Models I and II.
    pub error_scale: f64,
    /// Suppresses the Gaussian error of Models I and II.
    pub zero_error: bool,
    /// Draws per distributional response.
    pub sample_size: usize,
    pub gamma_second: f64,
    pub gamma_param: GammaParam,
    /// `ε` in the `ε·I` term of Models VI–VIII.
    pub spd_noise: f64,
    /// Eigenvalue floor applied to Model VIII draws that are not positive
    /// definite.
    pub spd_floor: f64,
    pub network_size: usize,
    pub sbm_priors: [f64; 3],
    pub sbm_within: f64,
    pub sbm_between: f64,
}

impl ModelSpec {
    /// Paper defaults; requires `p ≥ 4` so that β₂ exists.
    pub fn new(id: ModelId, n: usize, p: usize) -> Result<Self> {
        if p < 4 {
            return Err(Error::config("models need p >= 4"));
        }
        if n < 2 {
            return Err(Error::config("models need n >= 2"));
        }
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let mut beta1 = vec![0.0; p];
        beta1[0] = h;
        beta1[1] = h;
        let mut beta2 = vec![0.0; p];
        beta2[2] = h;
        beta2[3] = h;
        Ok(Self {
            id,
            n,
            p,
            beta1,
            beta2,
            error_scale: if id == ModelId::I { 0.5 } else { 1.0 },
            zero_error: false,
            sample_size: 50,
            gamma_second: 3.0,
            gamma_param: GammaParam::Scale,
            spd_noise: 0.10,
            spd_floor: 0.01,
            network_size: 50,
            sbm_priors: [0.30, 0.45, 0.25],
            sbm_within: 6.0,
            sbm_between: 1.0,
        })
    }

    /// True basis η: β₁; `(e₁, e₂)` for Model II; `(β₁, β₂)` for VII and VIII.
    pub fn true_basis(&self) -> Basis {
        let cols = match self.id {
            ModelId::II => {
                let mut e1 = vec![0.0; self.p];
                let mut e2 = vec![0.0; self.p];
                e1[0] = 1.0;
                e2[1] = 1.0;
                vec![e1, e2]
            }
            ModelId::VII | ModelId::VIII => vec![self.beta1.clone(), self.beta2.clone()],
            _ => vec![self.beta1.clone()],
        };
        Basis::from_orthonormal(Matrix::from_columns(&cols).expect("equal lengths"))
            .expect("η has orthonormal columns")
    }
}

/// A generated sample with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub x: Matrix,
    pub responses: Vec<MetricObject>,
    pub true_basis: Basis,
    pub model: ModelSpec,
    pub seed: u64,
}

/// `n × p` matrix with i.i.d. `t₂₀(0, I_p)` rows `Z/√(u/20)`.
pub fn gen_predictors(n: usize, p: usize, seed: u64) -> Matrix {
    let chi = ChiSquared::new(PREDICTOR_DF).expect("positive df");
    let mut x = Matrix::zeros(n, p);
    for i in 0..n {
        let mut r = rng::substream(seed, Stream::Predictors, i as u64);
        let row = x.row_mut(i);
        for v in row.iter_mut() {
            *v = StandardNormal.sample(&mut r);
        }
        let u: f64 = chi.sample(&mut r);
        let s = math::sqrt(PREDICTOR_DF / u);
        row.iter_mut().for_each(|v| *v *= s);
    }
    x
}

/// One response per row of `x`.
pub fn gen_response(spec: &ModelSpec, x: &Matrix, seed: u64) -> Result<Vec<MetricObject>> {
    if x.cols() != spec.p {
        return Err(Error::DimensionMismatch {
            expected: spec.p,
            found: x.cols(),
        });
    }
    (0..x.rows())
        .map(|i| {
            let xi = x.row(i);
            let t1 = linalg::dot(&spec.beta1, xi);
            let t2 = linalg::dot(&spec.beta2, xi);
            let mut draws = rng::substream(seed, Stream::Response, i as u64);
            match spec.id {
                ModelId::I | ModelId::II => {
                    let mut err = rng::substream(seed, Stream::Error, i as u64);
                    let mut e = || -> f64 {
                        if spec.zero_error {
                            0.0
                        } else {
                            let z: f64 = StandardNormal.sample(&mut err);
                            spec.error_scale * z
                        }
                    };
                    let y = if spec.id == ModelId::I {
                        vec![math::sin(t1) + e(), math::cos(t1) + e()]
                    } else {
                        let (x1, x2) = (xi[0], xi[1]);
                        let y1 = x1 + x2 * x2 * x2 + e();
                        vec![y1, 0.5 * math::exp(x1 + 0.2) + e()]
                    };
                    Ok(MetricObject::Vector(y))
                }
                ModelId::III | ModelId::IV | ModelId::V => {
                    distribution_response(spec, t1, &mut draws).map(MetricObject::Distribution)
                }
                ModelId::VI | ModelId::VII | ModelId::VIII => {
                    spd_response(spec, t1, t2).map(MetricObject::Spd)
                }
                ModelId::IX => erdos_renyi(spec.network_size, math::logistic(math::sin(t1)), &mut draws)
                    .map(MetricObject::Graph),
                ModelId::X => {
                    let gamma = 1.0 + 0.8 * math::logistic(t1);
                    preferential_attachment(spec.network_size, gamma, &mut draws).map(MetricObject::Graph)
                }
                ModelId::XI => {
                    let mut labels = rng::substream(seed, Stream::Labels, i as u64);
                    sbm(spec, math::ceil(math::exp(t1)), &mut labels, &mut draws).map(MetricObject::Graph)
                }
            }
        })
        .collect()
}

/// Predictors and responses from one seed.
pub fn generate(spec: &ModelSpec, seed: u64) -> Result<SyntheticDataset> {
    let x = gen_predictors(spec.n, spec.p, seed);
    let responses = gen_response(spec, &x, seed)?;
    Ok(SyntheticDataset {
        x,
        responses,
        true_basis: spec.true_basis(),
        model: spec.clone(),
        seed,
    })
}

fn distribution_response(spec: &ModelSpec, t: f64, r: &mut StreamRng) -> Result<EmpiricalDistribution> {
    let m = spec.sample_size;
    let values: Vec<f64> = match spec.id {
        ModelId::III => {
            let d = Poisson::new(math::exp(t)).map_err(|_| Error::NonFinite)?;
            (0..m).map(|_| d.sample(r)).collect()
        }
        ModelId::IV => {
            let d = LogNormal::new(t, 1.0).map_err(|_| Error::NonFinite)?;
            (0..m).map(|_| d.sample(r)).collect()
        }
        _ => {
            let scale = match spec.gamma_param {
                GammaParam::Scale => spec.gamma_second,
                GammaParam::Rate => 1.0 / spec.gamma_second,
            };
            let d = Gamma::new(math::exp(t), scale).map_err(|_| Error::NonFinite)?;
            (0..m).map(|_| d.sample(r)).collect()
        }
    };
    EmpiricalDistribution::new(values)
}

fn spd_response(spec: &ModelSpec, t1: f64, t2: f64) -> Result<SymMatrix> {
    let eps = spec.spd_noise;
    match spec.id {
        ModelId::VI => {
            // (e^t − 1)/(e^t + 1) = tanh(t/2)
            let rho = math::tanh(0.5 * t1);
            let e = matfun::expm_sym(&SymMatrix::from_rows(&[[1.0, rho], [rho, 1.0]])?)?;
            SymMatrix::new(e.as_matrix().add(&Matrix::identity(2).scale(eps))?)
        }
        ModelId::VII => {
            let l = [math::exp(t1), math::exp(t2)];
            let m = Matrix::from_fn(2, 2, |i, j| 2.0 * l[i] * l[j] + if i == j { eps } else { 0.0 });
            if !m.is_finite() {
                return Err(Error::NonFinite);
            }
            SymMatrix::new(m)
        }
        _ => {
            let r1 = 0.5 * math::logistic(t1);
            let r2 = 0.8 * math::sin(t2);
            let d = 1.0 + eps;
            let a = SymMatrix::from_rows(&[[d, r1, r2], [r1, d, r1], [r2, r1, d]])?;
            let eig = matfun::sym_eig(&a)?;
            if eig.values.iter().all(|&l| l >= spec.spd_floor) {
                Ok(a)
            } else {
                let floor = spec.spd_floor;
                SymMatrix::new(eig.apply(|l| l.max(floor)))
            }
        }
    }
}

fn erdos_renyi(v: usize, prob: f64, r: &mut StreamRng) -> Result<WeightedGraph> {
    let mut w = Matrix::zeros(v, v);
    for a in 0..v {
        for b in (a + 1)..v {
            if r.random::<f64>() < prob {
                w[(a, b)] = 1.0;
                w[(b, a)] = 1.0;
            }
        }
    }
    WeightedGraph::new(w)
}

/// Growth from one node; each arrival links to one existing node chosen with
/// probability ∝ `degree^γ` (degree-0 nodes weigh 1).
fn preferential_attachment(v: usize, gamma: f64, r: &mut StreamRng) -> Result<WeightedGraph> {
    let mut w = Matrix::zeros(v, v);
    let mut deg = vec![0.0f64; v];
    let mut attach = vec![0.0f64; v];
    for new in 1..v {
        for (a, &d) in attach[..new].iter_mut().zip(&deg[..new]) {
            *a = if d > 0.0 { math::powf(d, gamma) } else { 1.0 };
        }
        let total: f64 = attach[..new].iter().sum();
        let mut u = r.random::<f64>() * total;
        let mut target = new - 1;
        for (k, &a) in attach[..new].iter().enumerate() {
            if u < a {
                target = k;
                break;
            }
            u -= a;
        }
        w[(target, new)] = 1.0;
        w[(new, target)] = 1.0;
        deg[target] += 1.0;
        deg[new] += 1.0;
    }
    WeightedGraph::new(w)
}

fn sbm(spec: &ModelSpec, shift: f64, labels: &mut StreamRng, r: &mut StreamRng) -> Result<WeightedGraph> {
    let v = spec.network_size;
    let block: Vec<usize> = (0..v)
        .map(|_| {
            let u = labels.random::<f64>();
            let mut acc = 0.0;
            for (k, &p) in spec.sbm_priors.iter().enumerate() {
                acc += p;
                if u < acc {
                    return k;
                }
            }
            spec.sbm_priors.len() - 1
        })
        .collect();
    let within = Poisson::new(spec.sbm_within + shift).map_err(|_| Error::NonFinite)?;
    let between = Poisson::new(spec.sbm_between + shift).map_err(|_| Error::NonFinite)?;
    let mut w = Matrix::zeros(v, v);
    for a in 0..v {
        for b in (a + 1)..v {
            let x: f64 = if block[a] == block[b] {
                within.sample(r)
            } else {
                between.sample(r)
            };
            w[(a, b)] = x;
            w[(b, a)] = x;
        }
    }
    WeightedGraph::new(w)
}

impl fmt::Display for ResponseSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResponseSpace::Euclidean => "euclidean",
            ResponseSpace::Distribution => "distribution",
            ResponseSpace::Spd => "spd",
            ResponseSpace::Network => "network",
        })
    }
}

impl FromStr for GammaParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "scale" => Ok(GammaParam::Scale),
            "rate" => Ok(GammaParam::Rate),
            _ => Err(Error::InvalidConfig(format!(
                "unknown gamma parameterisation `{s}`"
            ))),
        }
    }
}
