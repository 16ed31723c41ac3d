use super::{DisjointSets, EdgeId, EdgeSet, Graph, GraphError, VertexId};

/// Kruskal over the given edges. Ties are broken by `(length, u, v)`, which
/// with `u < v` storage is a total order on a simple graph.
pub fn spanning_forest(graph: &Graph, edges: impl IntoIterator<Item = EdgeId>) -> Vec<EdgeId> {
    let mut candidates: Vec<EdgeId> = edges.into_iter().collect();
    candidates.sort_by(|&a, &b| {
        let (ea, eb) = (graph.edge(a), graph.edge(b));
        ea.length
            .total_cmp(&eb.length)
            .then(ea.u.cmp(&eb.u))
            .then(ea.v.cmp(&eb.v))
    });
    let mut sets = DisjointSets::new(graph.vertex_count());
    candidates
        .into_iter()
        .filter(|&e| {
            let edge = graph.edge(e);
            sets.union(edge.u, edge.v)
        })
        .collect()
}

/// Minimum spanning tree of the subgraph induced by `vertex_subset`.
pub fn minimum_spanning_tree(graph: &Graph, vertex_subset: &[VertexId]) -> Result<Vec<EdgeId>, GraphError> {
    let n = graph.vertex_count();
    let mut inside = vec![false; n];
    for &v in vertex_subset {
        if v >= n {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                vertex_count: n,
            });
        }
        inside[v] = true;
    }
    let induced = graph
        .edges()
        .filter(|(_, e)| inside[e.u] && inside[e.v])
        .map(|(id, _)| id);
    let mut tree = spanning_forest(graph, induced);
    tree.sort_unstable();

    let mut distinct: Vec<VertexId> = vertex_subset.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() > 1 && tree.len() + 1 != distinct.len() {
        let live = EdgeSet::from_edges(graph.edge_count(), tree.iter().copied());
        let labels = super::component_labels(graph, &live);
        let anchor = labels[distinct[0]];
        let stray = distinct
            .iter()
            .copied()
            .find(|&v| labels[v] != anchor)
            .expect("forest with too few edges has a second component");
        let component = distinct
            .iter()
            .copied()
            .filter(|&v| labels[v] == labels[stray])
            .collect();
        return Err(GraphError::Disconnected { component });
    }
    Ok(tree)
}
