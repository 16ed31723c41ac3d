//! Network Poisson equation: vertex pressures from edge conductivities, and
//! the edge fluxes `Q_ij = (D_ij / c_ij)(p_i − p_j)` they induce.
//!
//! Each source injects `I0` and the sink drains `|sources| · I0`. The sink is
//! grounded (`p = 0`) and its row and column are removed, which leaves a
//! symmetric positive definite system on the sink's live component.

pub mod linalg;

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{EdgeSet, Graph, VertexId};
use linalg::{cholesky_solve, preconditioned_cg, relative_residual, CsrMatrix};

/// Largest component size solved with a dense factorisation under
/// [`LinearSolver::Auto`].
pub const DENSE_LIMIT: usize = 200;

/// Relative residual every accepted pressure solution must reach.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("invalid boundary: {0}")]
    InvalidBoundary(String),
    #[error("vertex {vertex} is not connected to the sink through live edges")]
    Disconnected { vertex: VertexId },
    #[error("live edge {edge} has non-positive conductivity {value}")]
    NonPositiveConductivity { edge: usize, value: f64 },
    #[error("linear solve stalled at relative residual {residual:e}")]
    NotConverged { residual: f64 },
}

/// Current sources, the sink, and the per-source current `I0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxBoundary {
    sources: Vec<VertexId>,
    sink: VertexId,
    base_current: f64,
}

impl FluxBoundary {
    pub fn new(sources: Vec<VertexId>, sink: VertexId, base_current: f64) -> Result<Self, FlowError> {
        if sources.is_empty() {
            return Err(FlowError::InvalidBoundary("no sources".into()));
        }
        if sources.contains(&sink) {
            return Err(FlowError::InvalidBoundary(format!("sink {sink} is also a source")));
        }
        if !(base_current.is_finite() && base_current > 0.0) {
            return Err(FlowError::InvalidBoundary(format!(
                "base current {base_current} must be positive"
            )));
        }
        Ok(Self {
            sources,
            sink,
            base_current,
        })
    }

    /// Every terminal except `sink` becomes a source.
    pub fn for_terminals(terminals: &[VertexId], sink: VertexId, base_current: f64) -> Result<Self, FlowError> {
        let sources = terminals.iter().copied().filter(|&t| t != sink).collect();
        Self::new(sources, sink, base_current)
    }

    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn base_current(&self) -> f64 {
        self.base_current
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LinearSolver {
    /// Dense Cholesky up to [`DENSE_LIMIT`] unknowns, CG above.
    #[default]
    Auto,
    Dense,
    ConjugateGradient,
}

/// Per-edge conductivities, per-vertex pressures and per-edge fluxes.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub conductivities: Vec<f64>,
    /// NaN outside the sink's live component.
    pub pressures: Vec<f64>,
    pub fluxes: Vec<f64>,
}

impl FlowState {
    pub fn solve(
        graph: &Graph,
        live: &EdgeSet,
        conductivities: Vec<f64>,
        boundary: &FluxBoundary,
    ) -> Result<Self, FlowError> {
        let pressures = solve_pressures(graph, live, &conductivities, boundary)?;
        let fluxes = compute_fluxes(graph, live, &conductivities, &pressures);
        Ok(Self {
            conductivities,
            pressures,
            fluxes,
        })
    }
}

/// Pressures solving the network Poisson equation with the sink grounded.
pub fn solve_pressures(
    graph: &Graph,
    live: &EdgeSet,
    conductivities: &[f64],
    boundary: &FluxBoundary,
) -> Result<Vec<f64>, FlowError> {
    solve_pressures_with(graph, live, conductivities, boundary, LinearSolver::Auto)
}

pub fn solve_pressures_with(
    graph: &Graph,
    live: &EdgeSet,
    conductivities: &[f64],
    boundary: &FluxBoundary,
    method: LinearSolver,
) -> Result<Vec<f64>, FlowError> {
    let n = graph.vertex_count();
    let sink = boundary.sink;
    for &v in boundary.sources.iter().chain([&sink]) {
        if v >= n {
            return Err(FlowError::InvalidBoundary(format!("vertex {v} out of range")));
        }
    }

    // Unknowns are the sink's live component minus the sink, numbered in BFS
    // order.
    let mut index = vec![usize::MAX; n];
    let mut in_component = vec![false; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([sink]);
    in_component[sink] = true;
    while let Some(v) = queue.pop_front() {
        if v != sink {
            index[v] = order.len();
            order.push(v);
        }
        for &(w, e) in graph.neighbors(v) {
            if live.contains(e) && !in_component[w] {
                in_component[w] = true;
                queue.push_back(w);
            }
        }
    }
    if let Some(&vertex) = boundary.sources.iter().find(|&&s| !in_component[s]) {
        return Err(FlowError::Disconnected { vertex });
    }

    let unknowns = order.len();
    let mut triplets = Vec::with_capacity(4 * unknowns + 4);
    for e in live.iter() {
        let edge = graph.edge(e);
        if !in_component[edge.u] {
            continue;
        }
        let d = conductivities[e.index()];
        if !(d > 0.0 && d.is_finite()) {
            return Err(FlowError::NonPositiveConductivity {
                edge: e.index(),
                value: d,
            });
        }
        let g = d / edge.length;
        let (iu, iv) = (index[edge.u], index[edge.v]);
        if iu != usize::MAX {
            triplets.push((iu, iu, g));
        }
        if iv != usize::MAX {
            triplets.push((iv, iv, g));
        }
        if iu != usize::MAX && iv != usize::MAX {
            triplets.push((iu, iv, -g));
            triplets.push((iv, iu, -g));
        }
    }
    let matrix = CsrMatrix::from_triplets(unknowns, &triplets);
    let mut rhs = vec![0.0; unknowns];
    for &s in &boundary.sources {
        rhs[index[s]] += boundary.base_current;
    }

    let use_dense = match method {
        LinearSolver::Dense => true,
        LinearSolver::ConjugateGradient => false,
        LinearSolver::Auto => unknowns < DENSE_LIMIT,
    };
    let solution = if use_dense {
        cholesky_solve(matrix.to_dense(), unknowns, &rhs).ok_or(FlowError::NotConverged {
            residual: f64::INFINITY,
        })?
    } else {
        let outcome = preconditioned_cg(&matrix, &rhs, RESIDUAL_TOLERANCE * 1e-2, 20 * unknowns + 100);
        outcome.x
    };
    let residual = relative_residual(&matrix, &solution, &rhs);
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(FlowError::NotConverged { residual });
    }

    let mut pressures = vec![f64::NAN; n];
    pressures[sink] = 0.0;
    for (i, &v) in order.iter().enumerate() {
        pressures[v] = solution[i];
    }
    Ok(pressures)
}

/// Signed flux on every live edge, relative to the stored `(u, v)`
/// orientation. Edges outside the solved component carry zero flux.
pub fn compute_fluxes(graph: &Graph, live: &EdgeSet, conductivities: &[f64], pressures: &[f64]) -> Vec<f64> {
    let mut fluxes = vec![0.0; graph.edge_count()];
    for e in live.iter() {
        let edge = graph.edge(e);
        let (pu, pv) = (pressures[edge.u], pressures[edge.v]);
        if pu.is_nan() || pv.is_nan() {
            continue;
        }
        fluxes[e.index()] = conductivities[e.index()] / edge.length * (pu - pv);
    }
    fluxes
}
