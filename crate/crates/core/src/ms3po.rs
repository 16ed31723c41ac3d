//! Multiple Sources Single Sink Physarum Optimization.
//!
//! Each inner iteration picks one terminal as the sink (all others become
//! sources), solves the network Poisson equation, updates conductivities from
//! the fluxes and cuts edges whose conductivity falls below `epsilon`. Edges
//! of the best network seen so far are reinforced by `1 + delta`, all others
//! damped by `1 - delta`. Outer iterations restart from the full graph; the
//! final answer is the minimum spanning tree of the best network.

use log::debug;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::flow::{compute_fluxes, solve_pressures_with, FlowError, FluxBoundary, LinearSolver};
use crate::graph::{
    minimum_spanning_tree, prune_disconnected_edges, terminals_connected, EdgeId, EdgeSet, Graph,
    Instance, SteinerSolution, VertexId,
};
use crate::seeded_rng;

/// Conductivity every edge starts an outer iteration with.
pub const INITIAL_CONDUCTIVITY: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Ms3poError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("sink selection needs at least two terminals, got {0}")]
    TooFewTerminals(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ms3poParams {
    /// Current injected at each source (`I0`).
    pub base_current: f64,
    /// Cut threshold on conductivity.
    pub epsilon: f64,
    pub alpha: f64,
    pub mu: f64,
    /// Reinforcement factor for best-network edges; `0` gives the plain
    /// Physarum update.
    pub delta: f64,
    /// Inner iterations per outer iteration (`K`).
    pub inner_iterations: usize,
    /// Outer iterations (`M`).
    pub outer_iterations: usize,
    pub seed: u64,
    pub max_fitness_evaluations: u64,
    /// Strip non-terminal leaves from the final tree.
    pub prune_leaves: bool,
    /// Stop as soon as the best network reaches this length.
    pub target_length: Option<f64>,
    pub linear_solver: LinearSolver,
}

impl Default for Ms3poParams {
    fn default() -> Self {
        Self {
            base_current: 1.0,
            epsilon: 1e-3,
            alpha: 0.15,
            mu: 1.0,
            delta: 0.2,
            inner_iterations: 1000,
            outer_iterations: 1000,
            seed: 0,
            max_fitness_evaluations: 1_000_000,
            prune_leaves: false,
            target_length: None,
            linear_solver: LinearSolver::Auto,
        }
    }
}

impl Ms3poParams {
    pub fn validate(&self) -> Result<(), Ms3poError> {
        let positive = [
            ("I0", self.base_current),
            ("epsilon", self.epsilon),
            ("alpha", self.alpha),
            ("mu", self.mu),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Ms3poError::InvalidParams(format!("{name} must be positive, got {value}")));
            }
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Ms3poError::InvalidParams(format!(
                "delta must lie in [0, 1), got {}",
                self.delta
            )));
        }
        if self.inner_iterations == 0 || self.outer_iterations == 0 {
            return Err(Ms3poError::InvalidParams("K and M must be positive".into()));
        }
        if self.max_fitness_evaluations == 0 {
            return Err(Ms3poError::InvalidParams("evaluation budget must be positive".into()));
        }
        Ok(())
    }

    fn target_reached(&self, length: f64) -> bool {
        self.target_length
            .is_some_and(|target| length <= target + 1e-9 * target.abs().max(1.0))
    }
}

/// Total live edge length incident to each terminal, in terminal order.
pub fn terminal_incident_lengths(graph: &Graph, live: &EdgeSet, terminals: &[VertexId]) -> Vec<f64> {
    terminals.iter().map(|&t| live.incident_length(graph, t)).collect()
}

/// Probability of each terminal (in the given order) becoming the sink.
///
/// Terminals are ranked by ascending incident length `l` (ties by ascending
/// vertex id) and the terminal at rank `i` receives weight `l(|T| - i + 1)`,
/// so the terminal with the smallest `l` gets the largest weight.
pub fn sink_probabilities(incident: &[f64], terminals: &[VertexId]) -> Vec<f64> {
    let k = terminals.len();
    let mut rank: Vec<usize> = (0..k).collect();
    rank.sort_by(|&a, &b| incident[a].total_cmp(&incident[b]).then(terminals[a].cmp(&terminals[b])));
    let total: f64 = incident.iter().sum();
    let mut probs = vec![0.0; k];
    if total <= 0.0 {
        probs.fill(1.0 / k as f64);
        return probs;
    }
    for (i, &slot) in rank.iter().enumerate() {
        probs[slot] = incident[rank[k - 1 - i]] / total;
    }
    probs
}

/// Draws the sink terminal for the current live graph.
pub fn select_sink<R: Rng + ?Sized>(
    instance: &Instance,
    live: &EdgeSet,
    rng: &mut R,
) -> Result<VertexId, Ms3poError> {
    let terminals = &instance.terminals;
    if terminals.len() < 2 {
        return Err(Ms3poError::TooFewTerminals(terminals.len()));
    }
    let incident = terminal_incident_lengths(&instance.graph, live, terminals);
    let probs = sink_probabilities(&incident, terminals);
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if draw < acc {
            return Ok(terminals[i]);
        }
    }
    // rounding left a sliver at the top; give it to the last nonzero entry
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(terminals.len() - 1);
    Ok(terminals[last])
}

/// Conductivity update for every live edge:
/// `(1 ± delta) · (D + alpha·|Q| − mu·D)`, `+` for best-network edges.
pub fn update_conductivities(
    conductivities: &[f64],
    fluxes: &[f64],
    live: &EdgeSet,
    best_network: &EdgeSet,
    params: &Ms3poParams,
) -> Vec<f64> {
    let mut next = conductivities.to_vec();
    for e in live.iter() {
        let i = e.index();
        let d = conductivities[i];
        let base = d + params.alpha * fluxes[i].abs() - params.mu * d;
        let factor = if best_network.contains(e) {
            1.0 + params.delta
        } else {
            1.0 - params.delta
        };
        next[i] = factor * base;
    }
    next
}

/// Live edges whose conductivity is at least `epsilon`.
pub fn cut_edges(live: &EdgeSet, conductivities: &[f64], epsilon: f64) -> EdgeSet {
    let mut out = live.clone();
    for e in live.iter() {
        if conductivities[e.index()] < epsilon {
            out.remove(e);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// Terminals still connected; best network unchanged.
    Continued,
    /// Terminals still connected and the live network is the new best.
    Improved,
    /// The cut separated the terminals; the outer iteration is over.
    Disconnected,
    /// The pressure solve failed; the outer iteration is over.
    SolveFailed,
}

/// Mutable state of one MS3-PO run.
#[derive(Clone, Debug)]
pub struct Ms3poRun<'a> {
    instance: &'a Instance,
    params: Ms3poParams,
    rng: ChaCha8Rng,
    live: EdgeSet,
    conductivities: Vec<f64>,
    best: EdgeSet,
    best_length: f64,
    evaluations: u64,
    failed_solves: u64,
}

impl<'a> Ms3poRun<'a> {
    pub fn new(instance: &'a Instance, params: Ms3poParams) -> Result<Self, Ms3poError> {
        params.validate()?;
        let m = instance.graph.edge_count();
        let rng = seeded_rng(params.seed);
        Ok(Self {
            instance,
            rng,
            live: EdgeSet::full(m),
            conductivities: vec![INITIAL_CONDUCTIVITY; m],
            best: EdgeSet::full(m),
            best_length: instance.graph.total_length(),
            evaluations: 0,
            failed_solves: 0,
            params,
        })
    }

    /// Restores the full graph and initial conductivities.
    pub fn reset(&mut self) {
        let m = self.instance.graph.edge_count();
        self.live = EdgeSet::full(m);
        self.conductivities.fill(INITIAL_CONDUCTIVITY);
    }

    /// One inner iteration; counts as one fitness evaluation when the
    /// pressure solve succeeds.
    pub fn step(&mut self) -> StepOutcome {
        let instance = self.instance;
        let graph = &instance.graph;
        let sink = select_sink(instance, &self.live, &mut self.rng).expect("at least two terminals");
        let boundary = FluxBoundary::for_terminals(&instance.terminals, sink, self.params.base_current)
            .expect("validated base current");
        let pressures = match solve_pressures_with(
            graph,
            &self.live,
            &self.conductivities,
            &boundary,
            self.params.linear_solver,
        ) {
            Ok(p) => p,
            Err(err) => {
                self.failed_solves += 1;
                log_failed_solve(&err, self.evaluations);
                return StepOutcome::SolveFailed;
            }
        };
        let fluxes = compute_fluxes(graph, &self.live, &self.conductivities, &pressures);
        self.conductivities =
            update_conductivities(&self.conductivities, &fluxes, &self.live, &self.best, &self.params);
        self.evaluations += 1;

        let cut = cut_edges(&self.live, &self.conductivities, self.params.epsilon);
        self.live = prune_disconnected_edges(graph, &cut, &instance.terminals);
        if !terminals_connected(graph, &self.live, &instance.terminals) {
            return StepOutcome::Disconnected;
        }
        let length = self.live.total_length(graph);
        if length < self.best_length {
            self.best_length = length;
            self.best = self.live.clone();
            StepOutcome::Improved
        } else {
            StepOutcome::Continued
        }
    }

    pub fn live_edges(&self) -> &EdgeSet {
        &self.live
    }

    pub fn conductivities(&self) -> &[f64] {
        &self.conductivities
    }

    pub fn best_network(&self) -> &EdgeSet {
        &self.best
    }

    pub fn best_length(&self) -> f64 {
        self.best_length
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn failed_solves(&self) -> u64 {
        self.failed_solves
    }

    pub fn params(&self) -> &Ms3poParams {
        &self.params
    }

    /// Minimum spanning tree over the vertices of the best network.
    pub fn finish(&self) -> SteinerSolution {
        let graph = &self.instance.graph;
        let mut vertices = self.best.vertices(graph);
        vertices.extend(self.instance.terminals.iter().copied());
        vertices.sort_unstable();
        vertices.dedup();
        let mut tree = minimum_spanning_tree(graph, &vertices).expect("best network spans the terminals");
        if self.params.prune_leaves {
            tree = prune_steiner_leaves(self.instance, tree);
        }
        SteinerSolution::new(graph, tree, self.evaluations)
    }
}

fn log_failed_solve(err: &FlowError, evaluations: u64) {
    debug!("pressure solve failed after {evaluations} evaluations: {err}");
}

/// Repeatedly removes degree-one vertices that are not terminals.
pub fn prune_steiner_leaves(instance: &Instance, tree: Vec<EdgeId>) -> Vec<EdgeId> {
    let graph = &instance.graph;
    let mut degree = vec![0usize; graph.vertex_count()];
    let mut alive = EdgeSet::from_edges(graph.edge_count(), tree.iter().copied());
    for &e in &tree {
        let edge = graph.edge(e);
        degree[edge.u] += 1;
        degree[edge.v] += 1;
    }
    let mut stack: Vec<VertexId> = (0..graph.vertex_count())
        .filter(|&v| degree[v] == 1 && !instance.is_terminal(v))
        .collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let Some(&(w, e)) = graph.neighbors(v).iter().find(|&&(_, e)| alive.contains(e)) else {
            continue;
        };
        alive.remove(e);
        degree[v] = 0;
        degree[w] -= 1;
        if degree[w] == 1 && !instance.is_terminal(w) {
            stack.push(w);
        }
    }
    alive.iter().collect()
}

/// Runs MS3-PO to completion (or until the budget or target is hit).
pub fn run_ms3po(instance: &Instance, params: &Ms3poParams) -> Result<SteinerSolution, Ms3poError> {
    params.validate()?;
    if instance.terminals.len() <= 1 {
        return Ok(SteinerSolution::empty());
    }
    let mut run = Ms3poRun::new(instance, params.clone())?;
    if params.target_reached(run.best_length()) {
        return Ok(run.finish());
    }
    let mut aborted = 0u64;
    'outer: for outer in 0..params.outer_iterations {
        run.reset();
        for _ in 0..params.inner_iterations {
            if run.evaluations() >= params.max_fitness_evaluations {
                break 'outer;
            }
            match run.step() {
                StepOutcome::Disconnected | StepOutcome::SolveFailed => {
                    aborted += 1;
                    debug!("outer iteration {outer} aborted");
                    continue 'outer;
                }
                StepOutcome::Improved if params.target_reached(run.best_length()) => break 'outer,
                _ => {}
            }
        }
    }
    debug!(
        "ms3po finished: best {} after {} evaluations, {aborted} aborted outer iterations",
        run.best_length(),
        run.evaluations()
    );
    Ok(run.finish())
}
