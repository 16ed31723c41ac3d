use std::collections::BTreeMap;

use crate::graph::{spanning_forest, DisjointSets, EdgeId, EdgeSet, Graph, Instance, SteinerSolution, VertexId};

use super::{Hms3poError, Subproblem};

/// Stage-3 graph: each connected sub-solution network collapsed to one
/// super-terminal, remaining vertices kept as they are.
#[derive(Clone, Debug)]
pub struct ContractedGraph {
    /// Contracted graph with the super-terminals as its terminals.
    pub instance: Instance,
    /// Contracted ids of the super-terminals, ascending.
    pub super_terminals: Vec<VertexId>,
    /// Original vertices behind each contracted vertex, ascending.
    pub members: Vec<Vec<VertexId>>,
    /// Original vertex to contracted vertex.
    pub vertex_of: Vec<VertexId>,
    /// Contracted edge to the original edge it stands for.
    pub edge_origin: Vec<EdgeId>,
    /// Union of the spanning trees of every network, in original edge ids.
    pub mst_edges: Vec<EdgeId>,
}

impl ContractedGraph {
    pub fn graph(&self) -> &Graph {
        &self.instance.graph
    }

    /// Maps contracted edges back to original edge ids.
    pub fn expand(&self, edges: &[EdgeId]) -> Vec<EdgeId> {
        edges.iter().map(|e| self.edge_origin[e.index()]).collect()
    }
}

/// Unions the sub-solutions in the original graph, replaces each connected
/// network by its MST and contracts that MST's vertex set to a single vertex.
///
/// Edges between two contracted groups keep the cheapest original edge
/// between them, ties going to the smaller original edge id.
pub fn contract_solutions(
    instance: &Instance,
    subproblems: &[Subproblem],
    solutions: &[SteinerSolution],
) -> Result<ContractedGraph, Hms3poError> {
    let graph = &instance.graph;
    let n = graph.vertex_count();
    let mut marked = instance.terminal_mask();
    let mut union = EdgeSet::empty(graph.edge_count());
    for (sub, sol) in subproblems.iter().zip(solutions) {
        for &e in &sol.edges {
            let original = sub.edge_origin[e.index()];
            let edge = graph.edge(original);
            marked[edge.u] = true;
            marked[edge.v] = true;
            union.insert(original);
        }
    }

    let mut sets = DisjointSets::new(n);
    for e in union.iter() {
        let edge = graph.edge(e);
        sets.union(edge.u, edge.v);
    }
    let mst_edges = spanning_forest(graph, union.iter());

    // Groups are numbered in order of their smallest original vertex, so an
    // instance without any absorbed vertices contracts to itself.
    let mut vertex_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<VertexId>> = Vec::new();
    let mut group_of_root: Vec<Option<VertexId>> = vec![None; n];
    let mut super_terminals = Vec::new();
    for v in 0..n {
        if marked[v] {
            let root = sets.find(v);
            let id = *group_of_root[root].get_or_insert_with(|| {
                members.push(Vec::new());
                super_terminals.push(members.len() - 1);
                members.len() - 1
            });
            vertex_of[v] = id;
            members[id].push(v);
        } else {
            vertex_of[v] = members.len();
            members.push(vec![v]);
        }
    }

    let mut cheapest: BTreeMap<(VertexId, VertexId), (f64, EdgeId)> = BTreeMap::new();
    for (id, edge) in graph.edges() {
        let (a, b) = (vertex_of[edge.u], vertex_of[edge.v]);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        cheapest
            .entry(key)
            .and_modify(|slot| {
                if edge.length < slot.0 {
                    *slot = (edge.length, id);
                }
            })
            .or_insert((edge.length, id));
    }
    let edge_origin: Vec<EdgeId> = cheapest.values().map(|&(_, e)| e).collect();
    let contracted = Graph::new(members.len(), cheapest.iter().map(|(&(a, b), &(len, _))| (a, b, len)))
        .map_err(|e| Hms3poError::Invariant(format!("contracted graph: {e}")))?;
    let contracted = Instance::new(contracted, super_terminals.iter().copied())
        .map_err(|e| Hms3poError::Invariant(format!("contracted instance: {e}")))?
        .with_name(format!("{}-contracted", instance.name));

    Ok(ContractedGraph {
        instance: contracted,
        super_terminals,
        members,
        vertex_of,
        edge_origin,
        mst_edges,
    })
}
