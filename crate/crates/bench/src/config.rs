//! Experiment configuration (TOML).
//!
//! ```toml
//! seed = 20240501
//! replicates = 100
//! out = "results"
//!
//! [[block]]
//! models = ["I", "II"]
//! sizes = [[100, 10], [500, 20]]
//! metrics = ["l1", "l2", "mahalanobis"]
//! estimators = ["sa-OLS", "sa-SIR"]
//! # optional: projections, slices, bandwidth, dim, gamma
//! ```

use std::path::{Path, PathBuf};

use frechet_sdr::metrics::{MetricSpec, ObjectKind};
use frechet_sdr::sdr::{Bandwidth, EstimatorConfig, Method};
use frechet_sdr::simgen::{GammaParam, ModelId, ModelSpec, ResponseSpace};
use serde::Deserialize;

use crate::error::{BenchError, Result};

pub const DEFAULT_SEED: u64 = 20240501;
pub const DEFAULT_REPLICATES: usize = 100;
pub const PAPER_REPLICATES: usize = 500;

/// One group of cells: every model × size × metric × estimator combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub models: Vec<ModelId>,
    pub sizes: Vec<(usize, usize)>,
    pub metrics: Vec<MetricSpec>,
    pub methods: Vec<Method>,
    pub projections: usize,
    pub slices: usize,
    pub bandwidth: Bandwidth,
    /// Structural dimension; defaults to each model's true `d`.
    pub dim: Option<usize>,
    pub gamma_param: GammaParam,
}

impl Block {
    pub fn new(
        models: Vec<ModelId>,
        sizes: Vec<(usize, usize)>,
        metrics: Vec<MetricSpec>,
        methods: Vec<Method>,
    ) -> Self {
        let defaults = EstimatorConfig::default();
        Self {
            models,
            sizes,
            metrics,
            methods,
            projections: defaults.projections,
            slices: defaults.slices,
            bandwidth: defaults.bandwidth,
            dim: None,
            gamma_param: GammaParam::Scale,
        }
    }

    pub fn dim_for(&self, model: ModelId) -> usize {
        self.dim.unwrap_or(model.structural_dim())
    }

    pub fn estimator(&self, method: Method, model: ModelId, seed: u64) -> EstimatorConfig {
        EstimatorConfig {
            method,
            d: self.dim_for(model),
            slices: self.slices,
            projections: self.projections,
            bandwidth: self.bandwidth,
            seed,
        }
    }

    pub fn model_spec(&self, model: ModelId, n: usize, p: usize) -> Result<ModelSpec> {
        let mut spec = ModelSpec::new(model, n, p)?;
        spec.gamma_param = self.gamma_param;
        Ok(spec)
    }

    fn validate(&self, index: usize) -> Result<()> {
        let ctx = |msg: String| BenchError::config(format!("block {}: {msg}", index + 1));
        if self.models.is_empty()
            || self.sizes.is_empty()
            || self.metrics.is_empty()
            || self.methods.is_empty()
        {
            return Err(ctx(
                "models, sizes, metrics and estimators must be nonempty".into()
            ));
        }
        for &(n, p) in &self.sizes {
            if p < 4 || n <= p + 1 {
                return Err(ctx(format!("size ({n}, {p}) needs p >= 4 and n > p + 1")));
            }
        }
        for &model in &self.models {
            for metric in &self.metrics {
                if metric.object_kind() != object_kind(model.space()) {
                    return Err(ctx(format!("metric {metric} does not apply to model {model}")));
                }
            }
            let d = self.dim_for(model);
            if d == 0 || self.sizes.iter().any(|&(_, p)| d > p) {
                return Err(ctx(format!("dim {d} is invalid for model {model}")));
            }
        }
        for &method in &self.methods {
            self.estimator(method, self.models[0], 0).validate()?;
        }
        Ok(())
    }
}

pub fn object_kind(space: ResponseSpace) -> ObjectKind {
    match space {
        ResponseSpace::Euclidean => ObjectKind::Vector,
        ResponseSpace::Distribution => ObjectKind::Distribution,
        ResponseSpace::Spd => ObjectKind::Spd,
        ResponseSpace::Network => ObjectKind::Graph,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub replicates: usize,
    pub out: Option<PathBuf>,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    replicates: Option<usize>,
    out: Option<PathBuf>,
    #[serde(rename = "block", default)]
    blocks: Vec<RawBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    models: Vec<String>,
    sizes: Vec<[usize; 2]>,
    metrics: Vec<String>,
    estimators: Vec<String>,
    projections: Option<usize>,
    slices: Option<usize>,
    bandwidth: Option<String>,
    dim: Option<usize>,
    gamma: Option<String>,
}

impl RawBlock {
    fn into_block(self) -> Result<Block> {
        let models = parse_all(&self.models)?;
        let metrics = parse_all(&self.metrics)?;
        let methods = parse_all(&self.estimators)?;
        let sizes = self.sizes.iter().map(|&[n, p]| (n, p)).collect();
        let mut block = Block::new(models, sizes, metrics, methods);
        if let Some(v) = self.projections {
            block.projections = v;
        }
        if let Some(v) = self.slices {
            block.slices = v;
        }
        if let Some(v) = self.bandwidth {
            block.bandwidth = v.parse()?;
        }
        if let Some(v) = self.gamma {
            block.gamma_param = v.parse()?;
        }
        block.dim = self.dim;
        Ok(block)
    }
}

fn parse_all<T>(items: &[String]) -> Result<Vec<T>>
where
    T: std::str::FromStr<Err = frechet_sdr::Error>,
{
    items
        .iter()
        .map(|s| s.parse::<T>().map_err(BenchError::from))
        .collect()
}

impl ExperimentConfig {
    pub fn new(blocks: Vec<Block>) -> Self {
        Self {
            seed: DEFAULT_SEED,
            replicates: DEFAULT_REPLICATES,
            out: None,
            blocks,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| BenchError::config(e.to_string()))?;
        let cfg = Self {
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            replicates: raw.replicates.unwrap_or(DEFAULT_REPLICATES),
            out: raw.out,
            blocks: raw
                .blocks
                .into_iter()
                .map(RawBlock::into_block)
                .collect::<Result<_>>()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(BenchError::config("replicates must be at least 1"));
        }
        if self.blocks.is_empty() {
            return Err(BenchError::config("no [[block]] entries"));
        }
        self.blocks
            .iter()
            .enumerate()
            .try_for_each(|(i, b)| b.validate(i))
    }

    /// The four simulation tables: all eleven models at both sizes with the
    /// metrics and estimators reported for each response space.
    pub fn paper_tables() -> Self {
        let sizes = vec![(100, 10), (500, 20)];
        let groups: [&[ModelId]; 4] = [
            &[ModelId::I, ModelId::II],
            &[ModelId::III, ModelId::IV, ModelId::V],
            &[ModelId::VI, ModelId::VII, ModelId::VIII],
            &[ModelId::IX, ModelId::X, ModelId::XI],
        ];
        let blocks = groups
            .iter()
            .map(|models| {
                let space = models[0].space();
                Block::new(
                    models.to_vec(),
                    sizes.clone(),
                    default_metrics(space),
                    default_methods(space),
                )
            })
            .collect();
        Self {
            replicates: PAPER_REPLICATES,
            ..Self::new(blocks)
        }
    }

    /// One block per model with the default metrics and estimators of its
    /// response space unless `metrics`/`methods` are given.
    pub fn for_models(
        models: &[ModelId],
        sizes: &[(usize, usize)],
        metrics: &[MetricSpec],
        methods: &[Method],
    ) -> Self {
        let blocks = models
            .iter()
            .map(|&m| {
                let space = m.space();
                Block::new(
                    vec![m],
                    sizes.to_vec(),
                    if metrics.is_empty() {
                        default_metrics(space)
                    } else {
                        metrics.to_vec()
                    },
                    if methods.is_empty() {
                        default_methods(space)
                    } else {
                        methods.to_vec()
                    },
                )
            })
            .collect();
        Self::new(blocks)
    }
}

/// The three metrics tabulated for each response space.
pub fn default_metrics(space: ResponseSpace) -> Vec<MetricSpec> {
    let names: &[&str] = match space {
        ResponseSpace::Euclidean => &["l1", "l2", "mahalanobis"],
        ResponseSpace::Distribution => &["w1", "w2", "hellinger"],
        ResponseSpace::Spd => &["frobenius", "chol_frobenius", "log_frobenius"],
        ResponseSpace::Network => &["degree_centrality", "closeness_centrality", "diffusion"],
    };
    names
        .iter()
        .map(|s| s.parse().expect("built-in metric"))
        .collect()
}

/// Estimators tabulated for each response space; the kernel methods are
/// reported only for distributions and SPD matrices.
pub fn default_methods(space: ResponseSpace) -> Vec<Method> {
    match space {
        ResponseSpace::Distribution | ResponseSpace::Spd => Method::ALL.to_vec(),
        ResponseSpace::Euclidean | ResponseSpace::Network => vec![Method::SaOls, Method::SaSir],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
        seed = 7
        replicates = 3

        [[block]]
        models = ["IV"]
        sizes = [[100, 10]]
        metrics = ["w1", "hellinger:40"]
        estimators = ["sa-SIR", "FOLS"]
        projections = 50
        gamma = "rate"
    "#;

    #[test]
    fn parses_sample() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.replicates, 3);
        let b = &cfg.blocks[0];
        assert_eq!(b.models, vec![ModelId::IV]);
        assert_eq!(b.metrics[1], MetricSpec::Hellinger { bins: 40 });
        assert_eq!(b.methods, vec![Method::SaSir, Method::Fols]);
        assert_eq!(b.projections, 50);
        assert_eq!(b.gamma_param, GammaParam::Rate);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            SAMPLE.replace("replicates = 3", "replicates = 0"),
            SAMPLE.replace("\"w1\"", "\"l1\""),
            SAMPLE.replace("[[100, 10]]", "[[10, 10]]"),
            SAMPLE.replace("sa-SIR", "sa-LASSO"),
            SAMPLE.replace("projections = 50", "projections = 50\ncolour = 1"),
        ];
        for text in bad {
            assert!(ExperimentConfig::from_toml_str(&text).is_err(), "{text}");
        }
    }

    #[test]
    fn paper_tables_validate() {
        let cfg = ExperimentConfig::paper_tables();
        cfg.validate().unwrap();
        assert_eq!(cfg.replicates, 500);
        let cells: usize = cfg
            .blocks
            .iter()
            .map(|b| b.models.len() * b.sizes.len() * b.metrics.len() * b.methods.len())
            .sum();
        assert_eq!(cells, 24 + 72 + 72 + 36);
    }
}
