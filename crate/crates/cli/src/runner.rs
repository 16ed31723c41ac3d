use std::fmt;
use std::time::{Duration, Instant};

use clap::ValueEnum;
use physarum_steiner::baselines::{exact_dreyfus_wagner, sph, ExactError};
use physarum_steiner::graph::{Instance, SteinerSolution};
use physarum_steiner::hms3po::{run_hms3po_detailed, Hms3poError, Hms3poParams};
use physarum_steiner::ms3po::{run_ms3po, Ms3poError, Ms3poParams};
use physarum_steiner::seeded_rng;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Algorithm {
    /// MS3-PO with the evolutionary conductivity update.
    Ms3po,
    /// MS3-PO with the plain Physarum update (delta forced to 0).
    #[value(name = "ms3po-eq7")]
    Ms3poPlain,
    Hms3po,
    Sph,
    /// Dreyfus-Wagner, limited to small terminal sets.
    Exact,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ms3po => "ms3po",
            Algorithm::Ms3poPlain => "ms3po-eq7",
            Algorithm::Hms3po => "hms3po",
            Algorithm::Sph => "sph",
            Algorithm::Exact => "exact",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Solver settings shared by every run of a command; the seed varies per run.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// MS3-PO settings. `outer_iterations` is recomputed from the budget when
    /// `outer_iterations_explicit` is false.
    pub ms3po: Ms3poParams,
    pub outer_iterations_explicit: bool,
    pub imbalance: f64,
    /// Target partition count; `None` picks a quarter of the terminals.
    pub partitions: Option<usize>,
    /// Let MS3-PO stop once it reaches the known optimum.
    pub stop_at_optimum: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            ms3po: Ms3poParams::default(),
            outer_iterations_explicit: false,
            imbalance: 2.0,
            partitions: None,
            stop_at_optimum: true,
        }
    }
}

impl SolverConfig {
    fn ms3po_params(&self, instance: &Instance, seed: u64) -> Ms3poParams {
        let mut p = self.ms3po.clone();
        p.seed = seed;
        if !self.outer_iterations_explicit {
            let k = p.inner_iterations.max(1) as u64;
            p.outer_iterations = p.max_fitness_evaluations.div_ceil(k).max(1) as usize;
        }
        if self.stop_at_optimum && p.target_length.is_none() {
            p.target_length = instance.known_optimum;
        }
        p
    }

    pub fn partitions_for(&self, instance: &Instance) -> usize {
        let t = instance.terminals.len().max(1);
        self.partitions.unwrap_or_else(|| t.div_ceil(4)).clamp(1, t)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Ms3po(#[from] Ms3poError),
    #[error(transparent)]
    Hms3po(#[from] Hms3poError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub solution: SteinerSolution,
    pub realized_partitions: Option<usize>,
    pub elapsed: Duration,
}

pub fn run_algorithm(
    instance: &Instance,
    algorithm: Algorithm,
    seed: u64,
    config: &SolverConfig,
) -> Result<RunOutcome, RunError> {
    let start = Instant::now();
    let mut realized_partitions = None;
    let solution = match algorithm {
        Algorithm::Ms3po => run_ms3po(instance, &config.ms3po_params(instance, seed))?,
        Algorithm::Ms3poPlain => {
            let params = Ms3poParams {
                delta: 0.0,
                ..config.ms3po_params(instance, seed)
            };
            run_ms3po(instance, &params)?
        }
        Algorithm::Hms3po => {
            let inner = config.ms3po_params(instance, seed);
            let params = Hms3poParams::new(inner, config.imbalance, config.partitions_for(instance));
            let report = run_hms3po_detailed(instance, &params)?;
            realized_partitions = Some(report.realized_partitions);
            report.solution
        }
        Algorithm::Sph => sph(instance, &mut seeded_rng(seed)),
        Algorithm::Exact => exact_dreyfus_wagner(instance)?,
    };
    Ok(RunOutcome {
        solution,
        realized_partitions,
        elapsed: start.elapsed(),
    })
}
