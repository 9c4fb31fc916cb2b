use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frechet_sdr::frechet_wass::{LooProblem, DEFAULT_QUANTILE_GRID};
use frechet_sdr::metrics::{self, DistanceMatrix, MetricSpec};
use frechet_sdr::sdr::{self, EstimatorConfig, Method};
use frechet_sdr::simgen::ModelId;
use frechet_sdr_bench::bootstrap::{self, BootstrapReport};
use frechet_sdr_bench::config::{ExperimentConfig, DEFAULT_SEED};
use frechet_sdr_bench::ingest::{self, Dataset, ResponseKind, Responses};
use frechet_sdr_bench::{experiment, tables, BenchError, Result};

#[derive(Parser)]
#[command(
    name = "frechet-sdr",
    version,
    about = "Fréchet sufficient dimension reduction benchmarks"
)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo tables and write summary CSVs.
    Simulate(SimulateArgs),
    /// Estimate a basis from one ingested dataset.
    Estimate(EstimateArgs),
    /// Leave-one-out prediction error for distributional responses.
    Predict(PredictArgs),
    /// Write the pairwise distance matrix of ingested responses.
    Distances(DistancesArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML experiment file.
    #[arg(long, conflicts_with_all = ["model", "metric", "estimator", "size", "paper"])]
    config: Option<PathBuf>,
    /// Run all four simulation tables.
    #[arg(long)]
    paper: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    /// Models to simulate (I–XI); repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    model: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    metric: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    estimator: Vec<String>,
    /// Sample size and dimension as `n,p`; repeatable.
    #[arg(long, value_parser = parse_size)]
    size: Vec<(usize, usize)>,
    /// Structural dimension override.
    #[arg(long)]
    dim: Option<usize>,
    /// Also write the per-replicate long-format file.
    #[arg(long)]
    long: bool,
}

#[derive(Args)]
struct DataArgs {
    /// Predictor CSV with a header row.
    #[arg(long)]
    predictors: PathBuf,
    /// Response file; see `--kind`.
    #[arg(long)]
    responses: PathBuf,
    #[arg(long, default_value = "samples")]
    kind: ResponseKind,
}

#[derive(Args)]
struct EstimatorArgs {
    /// Ignored for `--kind distances`.
    #[arg(long, default_value = "w2")]
    metric: String,
    #[arg(long, default_value = "sa-OLS")]
    estimator: String,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    projections: Option<usize>,
    #[arg(long)]
    slices: Option<usize>,
}

impl EstimatorArgs {
    fn config(&self) -> Result<EstimatorConfig> {
        let method: Method = self.estimator.parse()?;
        let mut cfg = EstimatorConfig::new(method, self.dim).with_seed(self.seed);
        if let Some(n) = self.projections {
            cfg.projections = n;
        }
        if let Some(h) = self.slices {
            cfg.slices = h;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn metric(&self) -> Result<MetricSpec> {
        Ok(self.metric.parse()?)
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Bootstrap resamples for standard errors (requires `--dim 1`).
    #[arg(long)]
    bootstrap: Option<usize>,
    /// Directory for `basis.csv` (and `bootstrap.csv`); stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Quantile grid size.
    #[arg(long, default_value_t = DEFAULT_QUANTILE_GRID)]
    grid: usize,
    /// Directory for `loo.csv`; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistancesArgs {
    #[arg(long)]
    responses: PathBuf,
    #[arg(long, default_value = "samples")]
    kind: ResponseKind,
    #[arg(long, default_value = "w2")]
    metric: String,
    /// Output CSV; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, p) = s.split_once(',').ok_or("expected `n,p`")?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(n)?, parse(p)?))
}

fn parse_list<T: std::str::FromStr<Err = frechet_sdr::Error>>(items: &[String]) -> Result<Vec<T>> {
    items.iter().map(|s| Ok(s.parse()?)).collect()
}

fn simulate(args: SimulateArgs, threads: usize) -> Result<()> {
    let mut cfg = if let Some(path) = &args.config {
        ExperimentConfig::from_path(path)?
    } else if args.paper {
        ExperimentConfig::paper_tables()
    } else if !args.model.is_empty() {
        let models: Vec<ModelId> = parse_list(&args.model)?;
        let metrics: Vec<MetricSpec> = parse_list(&args.metric)?;
        let methods: Vec<Method> = parse_list(&args.estimator)?;
        let sizes = if args.size.is_empty() {
            vec![(100, 10)]
        } else {
            args.size.clone()
        };
        ExperimentConfig::for_models(&models, &sizes, &metrics, &methods)
    } else {
        return Err(BenchError::config("simulate needs --config, --paper or --model"));
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    if let Some(d) = args.dim {
        cfg.blocks.iter_mut().for_each(|b| b.dim = Some(d));
    }
    cfg.validate()?;
    let out = args
        .out
        .or(cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("results"));

    let result = experiment::run_experiment_with_threads(&cfg, threads)?;
    let written = tables::emit_tables(&result, &out, args.long)?;
    print!("{}", tables::summary_string(&result.cells)?);
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    eprintln!("{} cells in {:.1?}", result.cells.len(), result.wall_time);
    let failed: Vec<_> = result.failed_cells().collect();
    if failed.is_empty() {
        return Ok(());
    }
    for c in &failed {
        eprintln!(
            "cell model {} ({}, {}) {} {}: {}/{} replicates failed, first error: {}",
            c.model,
            c.n,
            c.p,
            c.metric,
            c.method,
            c.failures,
            c.attempted(),
            c.first_error.as_deref().unwrap_or("unknown")
        );
    }
    Err(BenchError::Execution(format!(
        "{} cells exceeded the failure limit",
        failed.len()
    )))
}

fn distances_for(responses: &Responses, metric: &MetricSpec) -> Result<DistanceMatrix> {
    match responses {
        Responses::Distances(d) => Ok(d.clone()),
        Responses::Objects(objs) => Ok(metrics::distance_matrix(objs, metric)?),
    }
}

fn write_output(out: Option<&Path>, name: &str, body: &str) -> Result<()> {
    match out {
        None => io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| BenchError::io("<stdout>", e)),
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| BenchError::io(&path, e))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn matrix_csv(header: Option<&str>, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut s = String::new();
    if let Some(h) = header {
        s.push_str(h);
        s.push('\n');
    }
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn bootstrap_csv(r: &BootstrapReport) -> String {
    let mut s = String::from("coefficient,estimate,se,lower,upper\n");
    for k in 0..r.estimate.len() {
        s.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{:.4}\n",
            k + 1,
            r.estimate[k],
            r.se[k],
            r.lower[k],
            r.upper[k]
        ));
    }
    s
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let cfg = args.est.config()?;
    if args.bootstrap.is_some() && cfg.d != 1 {
        return Err(BenchError::config("--bootstrap needs --dim 1"));
    }
    let metric = args.est.metric()?;
    let Dataset { x, responses } =
        ingest::ingest_dataset(&args.data.predictors, &args.data.responses, args.data.kind)?;
    let d = distances_for(&responses, &metric)?;
    let est = sdr::estimate_detailed(&x, &d, &cfg)?;
    if est.skipped_columns > 0 {
        eprintln!("{} degenerate surrogate columns skipped", est.skipped_columns);
    }
    let header: Vec<String> = (1..=cfg.d).map(|j| format!("b{j}")).collect();
    let cols = est.basis.columns();
    let body = matrix_csv(
        Some(&header.join(",")),
        (0..cols.rows()).map(|i| cols.row(i).to_vec()),
    );
    write_output(args.out.as_deref(), "basis.csv", &body)?;
    if let Some(b) = args.bootstrap {
        let report = bootstrap::bootstrap_around(&est.basis, &x, &d, &cfg, b, |k| {
            bootstrap::resample_indices(x.rows(), cfg.seed, k)
        })?;
        if report.failures > 0 {
            eprintln!("{} of {b} resamples failed and were excluded", report.failures);
        }
        write_output(args.out.as_deref(), "bootstrap.csv", &bootstrap_csv(&report))?;
    }
    Ok(())
}

fn predict(args: PredictArgs) -> Result<()> {
    if args.data.kind != ResponseKind::Samples {
        return Err(BenchError::config("predict needs --kind samples"));
    }
    let cfg = args.est.config()?;
    let metric = args.est.metric()?;
    let x = ingest::read_predictors(&args.data.predictors)?;
    let samples = ingest::read_samples(&args.data.responses)?;
    let problem = LooProblem::new(&x, &samples, &metric, &cfg, args.grid)?;
    let fit = problem.run()?;
    let null = problem.null_report()?;
    let body = format!(
        "predictor,delta\n{},{:.4}\nbarycenter,{:.4}\n",
        cfg.method.label(),
        fit.delta,
        null.delta
    );
    write_output(args.out.as_deref(), "loo.csv", &body)
}

fn distances(args: DistancesArgs) -> Result<()> {
    let metric: MetricSpec = args.metric.parse()?;
    let responses = ingest::read_responses(&args.responses, args.kind)?;
    let d = distances_for(&responses, &metric)?;
    let m = d.as_matrix();
    let body = matrix_csv(None, (0..m.rows()).map(|i| m.row(i).to_vec()));
    match &args.out {
        None => write_output(None, "", &body),
        Some(path) => fs::write(path, body).map_err(|e| BenchError::io(path, e)),
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        // Only the first call can configure the global pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match cli.command {
        Command::Simulate(a) => simulate(a, cli.threads),
        Command::Estimate(a) => estimate(a),
        Command::Predict(a) => predict(a),
        Command::Distances(a) => distances(a),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
fn execute<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code() as u8
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(execute(std::env::args_os()))
}
