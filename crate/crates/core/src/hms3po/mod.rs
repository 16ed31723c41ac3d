//! Hierarchical MS3-PO: partition around the terminals, solve each part with
//! MS3-PO, contract the partial trees and reconnect them with SPH.

mod contract;
mod partition;

use log::debug;
use rayon::prelude::*;
use thiserror::Error;

use crate::baselines::sph;
use crate::graph::{EdgeId, Instance, SteinerSolution, VertexId};
use crate::ms3po::{run_ms3po, Ms3poError, Ms3poParams};
use crate::seeded_rng;

pub use contract::{contract_solutions, ContractedGraph};
pub use partition::{grow_partitions, merge_partitions, PartitionSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Hms3poError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Inner(#[from] Ms3poError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hms3poParams {
    /// Settings for every Stage-2 MS3-PO run. The evaluation budget is split
    /// evenly across the subgraphs holding two or more terminals.
    pub inner: Ms3poParams,
    /// Imbalance factor `d >= 1`.
    pub imbalance: f64,
    /// Target partition count `n`, between 1 and the terminal count.
    pub target_partitions: usize,
}

impl Hms3poParams {
    pub fn new(inner: Ms3poParams, imbalance: f64, target_partitions: usize) -> Self {
        Self {
            inner,
            imbalance,
            target_partitions,
        }
    }

    pub fn validate(&self, instance: &Instance) -> Result<(), Hms3poError> {
        if !(self.imbalance.is_finite() && self.imbalance >= 1.0) {
            return Err(Hms3poError::InvalidParams(format!(
                "d must be at least 1, got {}",
                self.imbalance
            )));
        }
        let terminals = instance.terminals.len();
        if self.target_partitions == 0 || self.target_partitions > terminals {
            return Err(Hms3poError::InvalidParams(format!(
                "n must lie in 1..={terminals}, got {}",
                self.target_partitions
            )));
        }
        self.inner.validate()?;
        Ok(())
    }

    /// Largest allowed subset size, `d·|V|/n`.
    pub fn cap(&self, vertex_count: usize) -> f64 {
        self.imbalance * vertex_count as f64 / self.target_partitions as f64
    }
}

/// One Stage-2 subproblem: the subgraph induced by a partition subset.
#[derive(Clone, Debug)]
pub struct Subproblem {
    pub instance: Instance,
    /// Local vertex to original vertex.
    pub vertex_map: Vec<VertexId>,
    /// Local edge to original edge.
    pub edge_origin: Vec<EdgeId>,
}

/// Induced subgraph per subset, terminals restricted to the subset.
pub fn build_subgraphs(instance: &Instance, partitions: &PartitionSet) -> Result<Vec<Subproblem>, Hms3poError> {
    let mask = instance.terminal_mask();
    partitions
        .subsets
        .iter()
        .enumerate()
        .map(|(idx, subset)| {
            let (graph, edge_origin) = instance.graph.induced_subgraph(subset);
            let terminals = subset.iter().enumerate().filter(|(_, &v)| mask[v]).map(|(i, _)| i);
            let sub = Instance::new(graph, terminals)
                .map_err(|e| Hms3poError::Invariant(format!("subset {idx}: {e}")))?
                .with_name(format!("{}-part{idx}", instance.name));
            Ok(Subproblem {
                instance: sub,
                vertex_map: subset.clone(),
                edge_origin,
            })
        })
        .collect()
}

/// Result of a run together with the diagnostics the benchmark reports.
#[derive(Clone, Debug)]
pub struct Hms3poReport {
    pub solution: SteinerSolution,
    /// Subset count after merging (`N`).
    pub realized_partitions: usize,
    /// Length of the hierarchical tree before the comparison with plain SPH.
    pub hierarchical_length: f64,
    /// Plain SPH was at least as short as the hierarchical tree and was returned.
    pub sph_fallback: bool,
}

pub fn run_hms3po(instance: &Instance, params: &Hms3poParams) -> Result<SteinerSolution, Hms3poError> {
    run_hms3po_detailed(instance, params).map(|r| r.solution)
}

pub fn run_hms3po_detailed(instance: &Instance, params: &Hms3poParams) -> Result<Hms3poReport, Hms3poError> {
    params.validate(instance)?;
    let graph = &instance.graph;
    if instance.terminals.len() <= 1 {
        return Ok(Hms3poReport {
            solution: SteinerSolution::empty(),
            realized_partitions: instance.terminals.len(),
            hierarchical_length: 0.0,
            sph_fallback: false,
        });
    }

    let grown = grow_partitions(instance, params)?;
    let merged = merge_partitions(instance, grown, params)?;
    let subproblems = build_subgraphs(instance, &merged)?;
    debug!(
        "{}: {} partitions, sizes {:?}",
        instance.name,
        merged.len(),
        merged.subsets.iter().map(Vec::len).collect::<Vec<_>>()
    );

    let solvable = subproblems.iter().filter(|s| s.instance.terminals.len() >= 2).count() as u64;
    let budget = (params.inner.max_fitness_evaluations / solvable.max(1)).max(1);
    let solutions = subproblems
        .par_iter()
        .enumerate()
        .map(|(idx, sub)| {
            if sub.instance.terminals.len() < 2 {
                return Ok(SteinerSolution::empty());
            }
            let inner = Ms3poParams {
                seed: params.inner.seed ^ idx as u64,
                max_fitness_evaluations: budget,
                target_length: None,
                ..params.inner.clone()
            };
            run_ms3po(&sub.instance, &inner)
        })
        .collect::<Result<Vec<_>, Ms3poError>>()?;
    let evaluations: u64 = solutions.iter().map(|s| s.fitness_evaluations).sum();

    let contracted = contract_solutions(instance, &subproblems, &solutions)?;
    let bridge = sph(&contracted.instance, &mut seeded_rng(params.inner.seed));
    let mut edges = contracted.mst_edges.clone();
    edges.extend(contracted.expand(&bridge.edges));
    let hierarchical = SteinerSolution::new(graph, edges, evaluations);

    let plain = sph(instance, &mut seeded_rng(params.inner.seed));
    let sph_fallback = plain.total_length < hierarchical.total_length;
    let hierarchical_length = hierarchical.total_length;
    let solution = if sph_fallback {
        SteinerSolution {
            fitness_evaluations: evaluations,
            ..plain
        }
    } else {
        hierarchical
    };
    Ok(Hms3poReport {
        solution,
        realized_partitions: merged.len(),
        hierarchical_length,
        sph_fallback,
    })
}
