#![allow(dead_code)]

use std::path::PathBuf;

use physarum_steiner::graph::{shortest_paths, EdgeSet, Graph, Instance, VertexId};
use physarum_steiner::ms3po::{Ms3poRun, StepOutcome};
use physarum_steiner::seeded_rng;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random connected graph: a random spanning tree plus `extra` chords, with
/// integer lengths in `1..=max_len`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, extra: usize, max_len: u32) -> Graph {
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        edges.push((order[i], parent, rng.gen_range(1..=max_len) as f64));
    }
    if n >= 2 {
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.push((a, b, rng.gen_range(1..=max_len) as f64));
            }
        }
    }
    Graph::new(n, edges).expect("generated graph is valid")
}

/// Random connected instance with `terminals` distinct terminals.
pub fn random_instance(seed: u64, n: usize, extra: usize, terminals: usize) -> Instance {
    let mut rng = seeded_rng(seed);
    let graph = random_graph(&mut rng, n, extra, 10);
    let mut vs: Vec<VertexId> = (0..n).collect();
    vs.shuffle(&mut rng);
    Instance::new(graph, vs.into_iter().take(terminals.clamp(1, n))).expect("connected")
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Minimum total length of an edge subset connecting all terminals, by
/// enumerating every subset. Only for graphs with a handful of edges.
pub fn brute_force_steiner(instance: &Instance) -> f64 {
    let graph = &instance.graph;
    let m = graph.edge_count();
    assert!(m <= 20, "too many edges to enumerate");
    if instance.terminals.len() <= 1 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << m) {
        let mut parent: Vec<usize> = (0..graph.vertex_count()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut length = 0.0;
        for (id, e) in graph.edges() {
            if mask >> id.index() & 1 == 1 {
                length += e.length;
                let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
                parent[a] = b;
            }
        }
        if length >= best {
            continue;
        }
        let root = find(&mut parent, instance.terminals[0]);
        if instance.terminals.iter().all(|&t| find(&mut parent, t) == root) {
            best = length;
        }
    }
    best
}

/// Pressures by dense Gaussian elimination (partial pivoting) on the
/// grounded Laplacian restricted to the sink's live component.
pub fn dense_pressure_oracle(
    graph: &Graph,
    live: &physarum_steiner::graph::EdgeSet,
    conductivities: &[f64],
    sources: &[VertexId],
    sink: VertexId,
    base_current: f64,
) -> Vec<f64> {
    let n = graph.vertex_count();
    let labels = physarum_steiner::graph::component_labels(graph, live);
    let unknowns: Vec<VertexId> = (0..n).filter(|&v| v != sink && labels[v] == labels[sink]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in unknowns.iter().enumerate() {
        index[v] = i;
    }
    let k = unknowns.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for e in live.iter() {
        let edge = graph.edge(e);
        if labels[edge.u] != labels[sink] {
            continue;
        }
        let w = conductivities[e.index()] / edge.length;
        for (x, y) in [(edge.u, edge.v), (edge.v, edge.u)] {
            if index[x] != usize::MAX {
                a[index[x]][index[x]] += w;
                if index[y] != usize::MAX {
                    a[index[x]][index[y]] -= w;
                }
            }
        }
    }
    for &s in sources {
        a[index[s]][k] += base_current;
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for row in 0..k {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=k {
                        a[row][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    let mut p = vec![f64::NAN; n];
    p[sink] = 0.0;
    for (i, &v) in unknowns.iter().enumerate() {
        p[v] = a[i][k] / a[i][i];
    }
    p
}

/// Net flux leaving each vertex through the live edges.
pub fn net_outflow(graph: &Graph, live: &physarum_steiner::graph::EdgeSet, fluxes: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; graph.vertex_count()];
    for e in live.iter() {
        let edge = graph.edge(e);
        out[edge.u] += fluxes[e.index()];
        out[edge.v] -= fluxes[e.index()];
    }
    out
}

/// Steps one outer iteration until the live graph is a tree whose leaves are
/// all terminals. Such a state is absorbing: every edge carries the same
/// flux, so nothing more is cut. `None` if the terminals split first or the
/// state is not reached within `max_steps`.
pub fn settle(run: &mut Ms3poRun, instance: &Instance, max_steps: usize) -> Option<EdgeSet> {
    for _ in 0..max_steps {
        if matches!(run.step(), StepOutcome::Disconnected | StepOutcome::SolveFailed) {
            return None;
        }
        let live = run.live_edges();
        let mut degree = vec![0usize; instance.graph.vertex_count()];
        for e in live.iter() {
            let edge = instance.graph.edge(e);
            degree[edge.u] += 1;
            degree[edge.v] += 1;
        }
        let touched = degree.iter().filter(|&&d| d > 0).count();
        let leaves_are_terminals = (0..degree.len()).all(|v| degree[v] != 1 || instance.is_terminal(v));
        // terminals are connected after every successful step, so a live set
        // with one edge fewer than its vertices is a tree
        if live.len() + 1 == touched && leaves_are_terminals {
            return Some(live.clone());
        }
    }
    None
}

/// Random graph with two terminals joined by a unique shortest path.
pub fn unique_path_instance(seed: u64) -> Option<(Instance, EdgeSet)> {
    let mut rng = seeded_rng(seed);
    let n = 4 + (seed % 9) as usize;
    let graph = random_graph(&mut rng, n, n, 20);
    let (s, t) = (0, n - 1);
    let sp = shortest_paths(&graph, &[s]).unwrap();
    // unique iff no vertex on any alternative reaches t at equal length
    let d_t = shortest_paths(&graph, &[t]).unwrap();
    let target = sp.distance[t];
    let on_some_shortest: Vec<usize> = (0..n)
        .filter(|&v| (sp.distance[v] + d_t.distance[v] - target).abs() < 1e-9)
        .collect();
    let path = sp.path_edges(t);
    if on_some_shortest.len() != path.len() + 1 {
        return None;
    }
    let edge_count = graph.edge_count();
    let tight = graph
        .edges()
        .filter(|(_, e)| {
            (sp.distance[e.u] + e.length + d_t.distance[e.v] - target).abs() < 1e-9
                || (sp.distance[e.v] + e.length + d_t.distance[e.u] - target).abs() < 1e-9
        })
        .count();
    if tight != path.len() {
        return None;
    }
    let inst = Instance::new(graph, [s, t]).unwrap();
    Some((inst, EdgeSet::from_edges(edge_count, path)))
}
