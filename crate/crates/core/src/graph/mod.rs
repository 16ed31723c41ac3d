//! Undirected weighted graphs, Steiner instances and the classic graph
//! algorithms the solvers are built from.
//!
//! Vertices are numbered `0..vertex_count`. The STP reader and writer shift
//! to and from SteinLib's 1-based ids at the file boundary.

mod components;
mod edge_set;
mod mst;
mod paths;
mod union_find;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use components::{
    component_labels, connected_components, prune_disconnected_edges, terminals_connected,
};
pub use edge_set::EdgeSet;
pub use mst::{minimum_spanning_tree, spanning_forest};
pub use paths::{shortest_paths, Dijkstra, ShortestPaths};
pub use union_find::DisjointSets;

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// An undirected edge, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

impl Edge {
    #[inline]
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("edge ({u}, {v}) has non-positive or non-finite length {length}")]
    InvalidLength { u: VertexId, v: VertexId, length: f64 },
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: VertexId, vertex_count: usize },
    #[error("source set is empty")]
    EmptySources,
    #[error("terminal set is empty")]
    NoTerminals,
    #[error("graph is disconnected; component {component:?} is isolated")]
    Disconnected { component: Vec<VertexId> },
}

/// Simple undirected graph with positive edge lengths.
///
/// Edges are kept sorted by `(u, v)`, so an [`EdgeId`] is the rank of the
/// edge in that order. Parallel edges are collapsed to the shortest one.
#[derive(Clone, Debug)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges
    }
}

impl Graph {
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        if vertex_count == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut shortest: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
        for (a, b, length) in edges {
            for vertex in [a, b] {
                if vertex >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        vertex,
                        vertex_count,
                    });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if !(length.is_finite() && length > 0.0) {
                return Err(GraphError::InvalidLength {
                    u: a,
                    v: b,
                    length,
                });
            }
            let key = (a.min(b), a.max(b));
            shortest
                .entry(key)
                .and_modify(|l| *l = l.min(length))
                .or_insert(length);
        }
        let edges: Vec<Edge> = shortest
            .into_iter()
            .map(|((u, v), length)| Edge { u, v, length })
            .collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, EdgeId(i)));
            adjacency[e.v].push((e.u, EdgeId(i)));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            vertex_count,
            edges,
            adjacency,
        })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    #[inline]
    pub fn length(&self, id: EdgeId) -> f64 {
        self.edges[id.0].length
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeId(i), e))
    }

    /// Neighbours of `v` with the connecting edge, ascending by neighbour id.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let list = self.adjacency.get(a)?;
        list.binary_search_by_key(&b, |&(w, _)| w)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self, &EdgeSet::full(self.edge_count())).len() == 1
    }

    /// Subgraph induced by `vertices`, relabelled `0..vertices.len()` in the
    /// given order. Returns the graph and, per new edge, the original edge.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> (Graph, Vec<EdgeId>) {
        let mut local = vec![usize::MAX; self.vertex_count];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut kept: Vec<(VertexId, VertexId, f64, EdgeId)> = self
            .edges()
            .filter(|(_, e)| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|(id, e)| {
                let (a, b) = (local[e.u], local[e.v]);
                (a.min(b), a.max(b), e.length, id)
            })
            .collect();
        kept.sort_by_key(|&(a, b, _, _)| (a, b));
        let origin = kept.iter().map(|k| k.3).collect();
        let graph = Graph::new(vertices.len().max(1), kept.iter().map(|k| (k.0, k.1, k.2)))
            .expect("induced subgraph of a valid graph is valid");
        (graph, origin)
    }
}

/// A Steiner tree problem: graph, terminals, and optionally the known optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: String,
    pub graph: Graph,
    /// Sorted, duplicate-free.
    pub terminals: Vec<VertexId>,
    pub known_optimum: Option<f64>,
}

impl Instance {
    pub fn new(graph: Graph, terminals: impl IntoIterator<Item = VertexId>) -> Result<Self, GraphError> {
        let mut terminals: Vec<VertexId> = terminals.into_iter().collect();
        terminals.sort_unstable();
        terminals.dedup();
        if terminals.is_empty() {
            return Err(GraphError::NoTerminals);
        }
        if let Some(&vertex) = terminals.iter().find(|&&t| t >= graph.vertex_count()) {
            return Err(GraphError::VertexOutOfRange {
                vertex,
                vertex_count: graph.vertex_count(),
            });
        }
        let components = connected_components(&graph, &EdgeSet::full(graph.edge_count()));
        if components.len() > 1 {
            return Err(GraphError::Disconnected {
                component: components[1].clone(),
            });
        }
        Ok(Self {
            name: String::new(),
            graph,
            terminals,
            known_optimum: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_optimum(mut self, optimum: Option<f64>) -> Self {
        self.known_optimum = optimum;
        self
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminals.binary_search(&v).is_ok()
    }

    pub fn terminal_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.graph.vertex_count()];
        for &t in &self.terminals {
            mask[t] = true;
        }
        mask
    }
}

/// A Steiner tree found by one of the solvers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteinerSolution {
    /// Sorted edge ids into the instance graph.
    pub edges: Vec<EdgeId>,
    pub total_length: f64,
    pub fitness_evaluations: u64,
}

impl SteinerSolution {
    pub fn new(graph: &Graph, edges: impl IntoIterator<Item = EdgeId>, fitness_evaluations: u64) -> Self {
        let mut edges: Vec<EdgeId> = edges.into_iter().collect();
        edges.sort_unstable();
        edges.dedup();
        let total_length = edges.iter().map(|&e| graph.length(e)).sum();
        Self {
            edges,
            total_length,
            fitness_evaluations,
        }
    }

    pub fn empty() -> Self {
        Self {
            edges: Vec::new(),
            total_length: 0.0,
            fitness_evaluations: 0,
        }
    }

    pub fn vertices(&self, graph: &Graph) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self
            .edges
            .iter()
            .flat_map(|&e| {
                let edge = graph.edge(e);
                [edge.u, edge.v]
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("edge {0:?} is listed twice")]
    DuplicateEdge(EdgeId),
    #[error("edge {0:?} does not exist in the graph")]
    UnknownEdge(EdgeId),
    #[error("terminal {0} is not spanned")]
    TerminalMissing(VertexId),
    #[error("edge set contains a cycle")]
    Cycle,
    #[error("edge set is not connected")]
    Disconnected,
    #[error("reported length {reported} differs from edge sum {actual}")]
    LengthMismatch { reported: f64, actual: f64 },
}

/// Checks that `solution` is a tree in `instance.graph` spanning every terminal.
pub fn verify_steiner_tree(instance: &Instance, solution: &SteinerSolution) -> Result<(), FeasibilityError> {
    let graph = &instance.graph;
    let mut seen = EdgeSet::empty(graph.edge_count());
    let mut sets = DisjointSets::new(graph.vertex_count());
    for &e in &solution.edges {
        if e.0 >= graph.edge_count() {
            return Err(FeasibilityError::UnknownEdge(e));
        }
        if seen.contains(e) {
            return Err(FeasibilityError::DuplicateEdge(e));
        }
        seen.insert(e);
        let edge = graph.edge(e);
        if !sets.union(edge.u, edge.v) {
            return Err(FeasibilityError::Cycle);
        }
    }
    let actual: f64 = solution.edges.iter().map(|&e| graph.length(e)).sum();
    if (actual - solution.total_length).abs() > 1e-9 * actual.max(1.0) {
        return Err(FeasibilityError::LengthMismatch {
            reported: solution.total_length,
            actual,
        });
    }
    if instance.terminals.len() == 1 {
        return if solution.edges.is_empty() {
            Ok(())
        } else {
            // a tree hanging off the lone terminal is still feasible
            let t = instance.terminals[0];
            let vs = solution.vertices(graph);
            if vs.binary_search(&t).is_err() {
                return Err(FeasibilityError::TerminalMissing(t));
            }
            if vs.iter().any(|&v| sets.find(v) != sets.find(t)) {
                return Err(FeasibilityError::Disconnected);
            }
            Ok(())
        };
    }
    let vs = solution.vertices(graph);
    for &t in &instance.terminals {
        if vs.binary_search(&t).is_err() {
            return Err(FeasibilityError::TerminalMissing(t));
        }
    }
    let root = sets.find(instance.terminals[0]);
    if vs.iter().any(|&v| sets.find(v) != root) {
        return Err(FeasibilityError::Disconnected);
    }
    Ok(())
}
