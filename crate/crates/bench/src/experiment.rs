//! Monte Carlo runner for the simulation tables.
//!
//! A replicate of `(model, n, p)` generates one dataset, shared by every
//! metric and estimator of its block so that comparisons within a replicate
//! are paired. Seeds are hashed from `(master, model, n, p, r)`, so results do
//! not depend on the number of worker threads or on scheduling.

use std::time::{Duration, Instant};

use frechet_sdr::metrics::{self, MetricSpec};
use frechet_sdr::rng::{self, Stream};
use frechet_sdr::sdr::{self, Method};
use frechet_sdr::simgen::{self, ModelId};
use rayon::prelude::*;

use crate::config::{Block, ExperimentConfig};
use crate::error::{BenchError, Result};

/// A cell fails when more than this fraction of its replicates fail.
pub const MAX_FAILURE_RATE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub model: ModelId,
    pub n: usize,
    pub p: usize,
    pub metric: MetricSpec,
    pub method: Method,
    pub d: usize,
    /// Δ per replicate; `None` marks a failed replicate.
    pub deltas: Vec<Option<f64>>,
    pub mean: f64,
    /// Sample standard deviation across successful replicates.
    pub sd: f64,
    /// `sd/√successes`.
    pub se: f64,
    pub successes: usize,
    pub failures: usize,
    /// First error message among failed replicates.
    pub first_error: Option<String>,
    pub wall_time: Duration,
}

impl CellResult {
    fn from_deltas(
        key: CellKey,
        deltas: Vec<Option<f64>>,
        first_error: Option<String>,
        wall_time: Duration,
    ) -> Self {
        let ok: Vec<f64> = deltas.iter().flatten().copied().collect();
        let successes = ok.len();
        let failures = deltas.len() - successes;
        let (mean, sd) = mean_sd(&ok);
        let se = if successes > 0 {
            sd / (successes as f64).sqrt()
        } else {
            f64::NAN
        };
        Self {
            model: key.model,
            n: key.n,
            p: key.p,
            metric: key.metric,
            method: key.method,
            d: key.d,
            deltas,
            mean,
            sd,
            se,
            successes,
            failures,
            first_error,
            wall_time,
        }
    }

    pub fn attempted(&self) -> usize {
        self.successes + self.failures
    }

    pub fn is_failed(&self) -> bool {
        self.failures as f64 > MAX_FAILURE_RATE * self.attempted() as f64
    }

    /// Largest possible Δ between two `d`-dimensional subspaces.
    pub fn delta_bound(&self) -> f64 {
        (2.0 * self.d as f64).sqrt()
    }
}

/// Mean and sample SD (divisor `R − 1`; 0 for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let r = values.len();
    if r == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / r as f64;
    if r == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
    (mean, var.sqrt())
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub cells: Vec<CellResult>,
    pub wall_time: Duration,
}

impl ExperimentResult {
    pub fn failed_cells(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.is_failed())
    }

    pub fn find(&self, model: ModelId, metric: &str, method: Method) -> Option<&CellResult> {
        let metric: MetricSpec = metric.parse().ok()?;
        self.cells
            .iter()
            .find(|c| c.model == model && c.metric == metric && c.method == method)
    }
}

#[derive(Debug, Clone)]
struct CellKey {
    model: ModelId,
    n: usize,
    p: usize,
    metric: MetricSpec,
    method: Method,
    d: usize,
}

/// Seed of the dataset for replicate `r` of `(model, n, p)`.
pub fn dataset_seed(master: u64, model: ModelId, n: usize, p: usize, r: usize) -> u64 {
    rng::derive_seed(
        master,
        &[
            Stream::Replicate as u64,
            model as u64,
            n as u64,
            p as u64,
            r as u64,
        ],
    )
}

/// Outcome of one replicate: `[metric][method]` results and timings.
type ReplicateOutcome = Vec<Vec<(std::result::Result<f64, String>, Duration)>>;

/// Generates one dataset and evaluates every metric × estimator of `block`.
fn run_replicate(block: &Block, model: ModelId, n: usize, p: usize, seed: u64) -> ReplicateOutcome {
    let fail_all = |msg: String| -> ReplicateOutcome {
        block
            .metrics
            .iter()
            .map(|_| {
                block
                    .methods
                    .iter()
                    .map(|_| (Err(msg.clone()), Duration::ZERO))
                    .collect()
            })
            .collect()
    };
    let data = match block
        .model_spec(model, n, p)
        .and_then(|s| Ok(simgen::generate(&s, seed)?))
    {
        Ok(d) => d,
        Err(e) => return fail_all(format!("data generation: {e}")),
    };
    let est_seed = rng::derive_seed(seed, &[Stream::Projections as u64]);
    block
        .metrics
        .iter()
        .map(|metric| {
            let start = Instant::now();
            let dist = metrics::distance_matrix(&data.responses, metric);
            let share = start.elapsed() / block.methods.len() as u32;
            block
                .methods
                .iter()
                .map(|&method| {
                    let start = Instant::now();
                    let out = match &dist {
                        Err(e) => Err(format!("distance matrix: {e}")),
                        Ok(d) => {
                            let cfg = block.estimator(method, model, est_seed);
                            sdr::estimate(&data.x, d, &cfg)
                                .and_then(|b| sdr::subspace_delta(&b, &data.true_basis))
                                .map_err(|e| format!("{method}: {e}"))
                        }
                    };
                    (out, share + start.elapsed())
                })
                .collect()
        })
        .collect()
}

/// Runs every cell on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut jobs = Vec::new();
    for block in &cfg.blocks {
        for &model in &block.models {
            for &(n, p) in &block.sizes {
                for r in 0..cfg.replicates {
                    jobs.push((block, model, n, p, dataset_seed(cfg.seed, model, n, p, r)));
                }
            }
        }
    }
    let outcomes: Vec<ReplicateOutcome> = jobs
        .par_iter()
        .map(|&(block, model, n, p, seed)| run_replicate(block, model, n, p, seed))
        .collect();

    let mut cells = Vec::new();
    let mut offset = 0;
    for block in &cfg.blocks {
        for &model in &block.models {
            for &(n, p) in &block.sizes {
                let reps = &outcomes[offset..offset + cfg.replicates];
                offset += cfg.replicates;
                for (mi, metric) in block.metrics.iter().enumerate() {
                    for (ei, &method) in block.methods.iter().enumerate() {
                        let mut deltas = Vec::with_capacity(cfg.replicates);
                        let mut first_error = None;
                        let mut time = Duration::ZERO;
                        for rep in reps {
                            let (res, t) = &rep[mi][ei];
                            time += *t;
                            match res {
                                Ok(v) => deltas.push(Some(*v)),
                                Err(e) => {
                                    first_error.get_or_insert_with(|| e.clone());
                                    deltas.push(None);
                                }
                            }
                        }
                        let key = CellKey {
                            model,
                            n,
                            p,
                            metric: metric.clone(),
                            method,
                            d: block.dim_for(model),
                        };
                        cells.push(CellResult::from_deltas(key, deltas, first_error, time));
                    }
                }
            }
        }
    }
    Ok(ExperimentResult {
        cells,
        wall_time: start.elapsed(),
    })
}

/// Runs on a dedicated pool with `threads` workers (0 = rayon default).
pub fn run_experiment_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::Execution(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_sd_basics() {
        assert_eq!(mean_sd(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
        assert!(mean_sd(&[]).0.is_nan());
    }

    #[test]
    fn seeds_differ_by_every_component() {
        let base = dataset_seed(1, ModelId::I, 100, 10, 0);
        assert_ne!(base, dataset_seed(2, ModelId::I, 100, 10, 0));
        assert_ne!(base, dataset_seed(1, ModelId::II, 100, 10, 0));
        assert_ne!(base, dataset_seed(1, ModelId::I, 101, 10, 0));
        assert_ne!(base, dataset_seed(1, ModelId::I, 100, 11, 0));
        assert_ne!(base, dataset_seed(1, ModelId::I, 100, 10, 1));
    }

    #[test]
    fn small_run_accounts_for_every_replicate() {
        let mut block = Block::new(
            vec![ModelId::VI],
            vec![(40, 4)],
            vec!["frobenius".parse().unwrap(), "log_frobenius".parse().unwrap()],
            vec![Method::SaOls, Method::Fsir],
        );
        block.projections = 50;
        let cfg = ExperimentConfig {
            replicates: 4,
            ..ExperimentConfig::new(vec![block])
        };
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.cells.len(), 4);
        for c in &res.cells {
            assert_eq!(c.attempted(), 4);
            assert_eq!(c.deltas.len(), 4);
            assert!((c.se - c.sd / (c.successes as f64).sqrt()).abs() < 1e-12);
            assert!(c
                .deltas
                .iter()
                .flatten()
                .all(|&v| (0.0..=c.delta_bound() + 1e-8).contains(&v)));
        }
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let mut block = Block::new(
            vec![ModelId::IV, ModelId::V],
            vec![(30, 4)],
            vec!["w1".parse().unwrap()],
            vec![Method::SaSir, Method::Fols],
        );
        block.projections = 40;
        let cfg = ExperimentConfig {
            replicates: 3,
            ..ExperimentConfig::new(vec![block])
        };
        let one = run_experiment_with_threads(&cfg, 1).unwrap();
        let four = run_experiment_with_threads(&cfg, 4).unwrap();
        let deltas = |r: &ExperimentResult| r.cells.iter().map(|c| c.deltas.clone()).collect::<Vec<_>>();
        assert_eq!(deltas(&one), deltas(&four));
    }
}
