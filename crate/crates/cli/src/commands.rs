use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use log::warn;
use physarum_steiner::graph::{verify_steiner_tree, Instance};
use physarum_steiner::ms3po::Ms3poParams;
use physarum_steiner::stp::{read_optima, read_stp, OptimumRegistry};
use rayon::prelude::*;
use thiserror::Error;

use crate::record::{aggregate, mean_error_by_algorithm, write_rows, Aggregate, Format, RunRecord};
use crate::runner::{run_algorithm, Algorithm, RunError, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "steiner-bench", version, about = "Steiner tree solvers and benchmark sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one .stp instance and print its run record.
    Solve(SolveArgs),
    /// Run algorithms over every .stp file in a directory.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Fitness-evaluation budget per run.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
    /// Current injected at each source.
    #[arg(long = "I0", default_value_t = 1.0)]
    pub base_current: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.15)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    /// Inner iterations per outer iteration.
    #[arg(long = "K", default_value_t = 1000)]
    pub inner_iterations: usize,
    /// Outer iterations; defaults to budget / K.
    #[arg(long = "M")]
    pub outer_iterations: Option<usize>,
    /// HMS3-PO imbalance parameter.
    #[arg(long = "d", default_value_t = 2.0)]
    pub imbalance: f64,
    /// HMS3-PO target partition count; defaults to ceil(|T| / 4).
    #[arg(long = "n")]
    pub partitions: Option<usize>,
    /// Remove non-terminal leaves from MS3-PO trees.
    #[arg(long)]
    pub prune_leaves: bool,
    /// Spend the whole budget even when the optimum is known.
    #[arg(long)]
    pub no_early_stop: bool,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        let ms3po = Ms3poParams {
            base_current: self.base_current,
            epsilon: self.epsilon,
            alpha: self.alpha,
            mu: self.mu,
            delta: self.delta,
            inner_iterations: self.inner_iterations,
            outer_iterations: self.outer_iterations.unwrap_or(1),
            max_fitness_evaluations: self.budget,
            prune_leaves: self.prune_leaves,
            ..Ms3poParams::default()
        };
        SolverConfig {
            ms3po,
            outer_iterations_explicit: self.outer_iterations.is_some(),
            imbalance: self.imbalance,
            partitions: self.partitions,
            stop_at_optimum: !self.no_early_stop,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write rows here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fill the wall_milliseconds column (rows are then no longer reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Instance in SteinLib .stp format.
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "ms3po")]
    pub alg: Algorithm,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV of known optima (`name,optimum`).
    #[arg(long)]
    pub optima: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Directory holding .stp files.
    pub dir: PathBuf,
    /// Algorithms to run, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sph")]
    pub alg: Vec<Algorithm>,
    /// Seed range `a..b` (exclusive), `a..=b`, or a single seed.
    #[arg(long, default_value = "0..11")]
    pub seeds: SeedRange,
    #[arg(long)]
    pub optima: Option<PathBuf>,
    /// Concurrent runs; defaults to the number of cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Fold the seeds of each instance and algorithm into one row.
    #[arg(long, value_enum)]
    pub aggregate: Option<Aggregate>,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl SeedRange {
    pub fn seeds(self) -> impl Iterator<Item = u64> {
        self.start..self.end
    }
}

impl FromStr for SeedRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad seed `{t}`: {e}"));
        let (start, end) = if let Some((a, b)) = s.split_once("..=") {
            (num(a)?, num(b)? + 1)
        } else if let Some((a, b)) = s.split_once("..") {
            (num(a)?, num(b)?)
        } else {
            let a = num(s)?;
            (a, a + 1)
        };
        if start >= end {
            return Err(format!("empty seed range `{s}`"));
        }
        Ok(Self { start, end })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Refused(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Refused(_) => 3,
            CliError::Failed(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Exact(e) => CliError::Refused(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Bench(args) => bench(&args),
    }
}

fn load_registry(path: Option<&Path>) -> Result<Option<OptimumRegistry>, CliError> {
    path.map(|p| read_optima(p).map_err(|e| CliError::Parse(format!("{}: {e}", p.display()))))
        .transpose()
}

fn load_instance(path: &Path, registry: Option<&OptimumRegistry>) -> Result<Instance, CliError> {
    let instance = read_stp(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let optimum = registry
        .and_then(|r| r.get(&instance.name))
        .or(instance.known_optimum);
    Ok(instance.with_optimum(optimum))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn solve(args: &SolveArgs) -> Result<(), CliError> {
    let registry = load_registry(args.optima.as_deref())?;
    let instance = load_instance(&args.instance, registry.as_ref())?;
    let outcome = run_algorithm(&instance, args.alg, args.seed, &args.solver.config())?;
    verify_steiner_tree(&instance, &outcome.solution)
        .map_err(|e| CliError::Failed(format!("{} returned an infeasible tree: {e}", args.alg)))?;
    let record = RunRecord::new(&instance, args.alg, args.seed, &outcome, args.output.timing);
    write_rows(open_output(args.output.out.as_deref())?, &[record], args.output.format)?;
    Ok(())
}

/// `.stp` files in `dir`, sorted by file name.
pub fn instance_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("stp")))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every (instance, algorithm, seed) combination; rows come back in
/// that order regardless of scheduling.
pub fn bench_records(
    instances: &[Instance],
    algorithms: &[Algorithm],
    seeds: SeedRange,
    config: &SolverConfig,
    timing: bool,
) -> Result<Vec<RunRecord>, CliError> {
    let tasks: Vec<(&Instance, Algorithm, u64)> = instances
        .iter()
        .flat_map(|inst| {
            algorithms
                .iter()
                .flat_map(move |&alg| seeds.seeds().map(move |seed| (inst, alg, seed)))
        })
        .collect();
    let results: Vec<Result<Option<RunRecord>, CliError>> = tasks
        .par_iter()
        .map(|&(instance, alg, seed)| match run_algorithm(instance, alg, seed, config) {
            Ok(outcome) => {
                verify_steiner_tree(instance, &outcome.solution).map_err(|e| {
                    CliError::Failed(format!("{alg} on {} seed {seed}: infeasible tree: {e}", instance.name))
                })?;
                Ok(Some(RunRecord::new(instance, alg, seed, &outcome, timing)))
            }
            Err(RunError::Exact(e)) => {
                warn!("{alg} skipped {}: {e}", instance.name);
                Ok(None)
            }
            Err(e) => Err(e.into()),
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        records.extend(r?);
    }
    Ok(records)
}

pub fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let registry = load_registry(args.optima.as_deref())?;
    let files = instance_files(&args.dir)
        .map_err(|e| CliError::Failed(format!("{}: {e}", args.dir.display())))?;
    let instances = files
        .iter()
        .map(|p| load_instance(p, registry.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    for inst in instances.iter().filter(|i| i.known_optimum.is_none()) {
        warn!("no known optimum for {}; error_percent left empty", inst.name);
    }

    let config = args.solver.config();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        pool = pool.num_threads(jobs.max(1));
    }
    let pool = pool.build().map_err(|e| CliError::Failed(e.to_string()))?;
    let records =
        pool.install(|| bench_records(&instances, &args.alg, args.seeds, &config, args.output.timing))?;

    let out = open_output(args.output.out.as_deref())?;
    match args.aggregate {
        Some(how) => write_rows(out, &aggregate(&records, how), args.output.format)?,
        None => write_rows(out, &records, args.output.format)?,
    }
    let mut stderr = io::stderr().lock();
    for (alg, err) in mean_error_by_algorithm(&records) {
        match err {
            Some(e) => writeln!(stderr, "mean error {alg}: {e:.3}%")?,
            None => writeln!(stderr, "mean error {alg}: n/a (no known optima)")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!("0..11".parse::<SeedRange>().unwrap().seeds().count(), 11);
        assert_eq!("3..=5".parse::<SeedRange>().unwrap().seeds().collect::<Vec<_>>(), vec![3, 4, 5]);
        assert_eq!("7".parse::<SeedRange>().unwrap().seeds().collect::<Vec<_>>(), vec![7]);
        assert!("5..5".parse::<SeedRange>().is_err());
        assert!("a..3".parse::<SeedRange>().is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
