use super::{DisjointSets, EdgeSet, Graph, VertexId};

/// Component label per vertex under `live` edges. Labels are dense and
/// numbered in order of each component's smallest vertex.
pub fn component_labels(graph: &Graph, live: &EdgeSet) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut sets = DisjointSets::new(n);
    for e in live.iter() {
        let edge = graph.edge(e);
        sets.union(edge.u, edge.v);
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut next = 0;
    (0..n)
        .map(|v| {
            let root = sets.find(v);
            if label_of_root[root] == usize::MAX {
                label_of_root[root] = next;
                next += 1;
            }
            label_of_root[root]
        })
        .collect()
}

/// Maximal vertex sets connected through `live` edges. Each set is sorted and
/// sets are ordered by their smallest vertex.
pub fn connected_components(graph: &Graph, live: &EdgeSet) -> Vec<Vec<VertexId>> {
    let labels = component_labels(graph, live);
    let count = labels.iter().max().map_or(0, |&m| m + 1);
    let mut out = vec![Vec::new(); count];
    for (v, &l) in labels.iter().enumerate() {
        out[l].push(v);
    }
    out
}

/// Drops every live edge whose component holds no terminal.
pub fn prune_disconnected_edges(graph: &Graph, live: &EdgeSet, terminals: &[VertexId]) -> EdgeSet {
    let labels = component_labels(graph, live);
    let count = labels.iter().max().map_or(0, |&m| m + 1);
    let mut has_terminal = vec![false; count];
    for &t in terminals {
        has_terminal[labels[t]] = true;
    }
    let mut out = live.clone();
    for e in live.iter() {
        if !has_terminal[labels[graph.edge(e).u]] {
            out.remove(e);
        }
    }
    out
}

pub fn terminals_connected(graph: &Graph, live: &EdgeSet, terminals: &[VertexId]) -> bool {
    let Some(&first) = terminals.first() else {
        return true;
    };
    let labels = component_labels(graph, live);
    terminals.iter().all(|&t| labels[t] == labels[first])
}
