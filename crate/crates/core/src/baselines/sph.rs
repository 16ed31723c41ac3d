use rand::Rng;

use crate::graph::{Dijkstra, Instance, SteinerSolution, VertexId};

/// Shortest Path Heuristic from a uniformly random start terminal.
pub fn sph<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> SteinerSolution {
    if instance.terminals.len() <= 1 {
        return SteinerSolution::empty();
    }
    let start = instance.terminals[rng.gen_range(0..instance.terminals.len())];
    sph_from(instance, start)
}

/// Shortest Path Heuristic grown from `start`.
///
/// Repeatedly attaches the terminal nearest to the current tree (ties by
/// ascending vertex id) through its shortest path. No MST or leaf-pruning
/// pass is applied afterwards.
pub fn sph_from(instance: &Instance, start: VertexId) -> SteinerSolution {
    let graph = &instance.graph;
    if instance.terminals.len() <= 1 {
        return SteinerSolution::empty();
    }
    let mut in_tree = vec![false; graph.vertex_count()];
    let mut remaining = instance.terminal_mask();
    let mut left = instance.terminals.len();
    let mut tree_edges = Vec::new();
    let mut search = Dijkstra::new(graph);

    in_tree[start] = true;
    if remaining[start] {
        remaining[start] = false;
        left -= 1;
    }
    search.add_source(start);
    search.run();

    while left > 0 {
        let next = instance
            .terminals
            .iter()
            .copied()
            .filter(|&t| remaining[t])
            .min_by(|&a, &b| search.distance(a).total_cmp(&search.distance(b)).then(a.cmp(&b)))
            .expect("terminals remain");
        let paths = search.paths();
        let vertices = paths.path_vertices(next);
        let edges = paths.path_edges(next);
        tree_edges.extend(edges);
        for v in vertices {
            if in_tree[v] {
                continue;
            }
            in_tree[v] = true;
            if remaining[v] {
                remaining[v] = false;
                left -= 1;
            }
            search.add_source(v);
        }
        search.run();
    }
    SteinerSolution::new(graph, tree_edges, 0)
}
