mod common;

use common::{dense_pressure_oracle, net_outflow, random_graph};
use physarum_steiner::flow::{compute_fluxes, solve_pressures, solve_pressures_with, FluxBoundary, LinearSolver};
use physarum_steiner::graph::{EdgeSet, Graph, VertexId};
use physarum_steiner::seeded_rng;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

struct Setup {
    graph: Graph,
    live: EdgeSet,
    conductivities: Vec<f64>,
    sources: Vec<VertexId>,
    sink: VertexId,
}

fn setup(seed: u64, n: usize, extra: usize, k: usize) -> Setup {
    let mut rng = seeded_rng(seed);
    let graph = random_graph(&mut rng, n, extra, 10);
    let conductivities: Vec<f64> = (0..graph.edge_count()).map(|_| rng.gen_range(0.01..5.0)).collect();
    let mut vs: Vec<VertexId> = (0..n).collect();
    vs.shuffle(&mut rng);
    let sink = vs[0];
    let sources = vs[1..k.min(n)].to_vec();
    let live = EdgeSet::full(graph.edge_count());
    Setup {
        graph,
        live,
        conductivities,
        sources,
        sink,
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn fifteen_vertex_graph_matches_elimination() {
    let s = setup(15, 15, 12, 4);
    let boundary = FluxBoundary::new(s.sources.clone(), s.sink, 1.0).unwrap();
    let p = solve_pressures(&s.graph, &s.live, &s.conductivities, &boundary).unwrap();
    let oracle = dense_pressure_oracle(&s.graph, &s.live, &s.conductivities, &s.sources, s.sink, 1.0);
    for v in 0..15 {
        assert!(close(p[v], oracle[v], 1e-10), "vertex {v}: {} vs {}", p[v], oracle[v]);
    }
}

#[test]
fn conjugate_gradient_handles_large_graphs() {
    let s = setup(7, 600, 900, 20);
    let boundary = FluxBoundary::new(s.sources.clone(), s.sink, 2.0).unwrap();
    let cg = solve_pressures(&s.graph, &s.live, &s.conductivities, &boundary).unwrap();
    let dense = solve_pressures_with(&s.graph, &s.live, &s.conductivities, &boundary, LinearSolver::Dense).unwrap();
    for v in 0..600 {
        assert!(close(cg[v], dense[v], 1e-8));
    }
    let q = compute_fluxes(&s.graph, &s.live, &s.conductivities, &cg);
    let net = net_outflow(&s.graph, &s.live, &q);
    assert!(close(-net[s.sink], 2.0 * s.sources.len() as f64, 1e-8));
}

#[test]
fn two_terminal_path_is_a_series_circuit() {
    // one source, one sink: current I0 runs through the chain in series
    let g = Graph::new(4, [(0, 1, 2.0), (1, 2, 3.0), (2, 3, 5.0)]).unwrap();
    let live = EdgeSet::full(3);
    let d = vec![1.0, 1.0, 1.0];
    let boundary = FluxBoundary::new(vec![0], 3, 0.5).unwrap();
    let p = solve_pressures(&g, &live, &d, &boundary).unwrap();
    assert!(close(p[0], 0.5 * 10.0, 1e-12));
    let q = compute_fluxes(&g, &live, &d, &p);
    assert!(q.iter().all(|&x| close(x, 0.5, 1e-12)));
}

#[test]
fn components_without_the_sink_are_ignored() {
    let g = Graph::new(5, [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (2, 3, 1.0)]).unwrap();
    let live = EdgeSet::from_edges(4, [g.find_edge(0, 1).unwrap(), g.find_edge(1, 2).unwrap(), g.find_edge(3, 4).unwrap()]);
    let d = vec![1.0; 4];
    let boundary = FluxBoundary::new(vec![0], 2, 1.0).unwrap();
    let p = solve_pressures(&g, &live, &d, &boundary).unwrap();
    assert!(p[3].is_nan() && p[4].is_nan());
    let q = compute_fluxes(&g, &live, &d, &p);
    assert_eq!(q[g.find_edge(3, 4).unwrap().index()], 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flux_is_conserved(seed in any::<u64>(), n in 2usize..50, extra in 0usize..60, k in 2usize..8, i0 in 0.1f64..10.0) {
        let s = setup(seed, n, extra, k);
        let boundary = FluxBoundary::new(s.sources.clone(), s.sink, i0).unwrap();
        let p = solve_pressures(&s.graph, &s.live, &s.conductivities, &boundary).unwrap();
        prop_assert_eq!(p[s.sink], 0.0);
        let q = compute_fluxes(&s.graph, &s.live, &s.conductivities, &p);
        let net = net_outflow(&s.graph, &s.live, &q);
        for v in 0..n {
            let expected = if v == s.sink {
                -(s.sources.len() as f64) * i0
            } else if s.sources.contains(&v) {
                i0
            } else {
                0.0
            };
            prop_assert!((net[v] - expected).abs() <= 1e-8 * i0 * s.sources.len() as f64, "vertex {} net {} expected {}", v, net[v], expected);
        }
    }

    #[test]
    fn pressures_match_elimination(seed in any::<u64>(), n in 2usize..40, extra in 0usize..50, k in 2usize..6) {
        let s = setup(seed, n, extra, k);
        let boundary = FluxBoundary::new(s.sources.clone(), s.sink, 1.0).unwrap();
        let p = solve_pressures(&s.graph, &s.live, &s.conductivities, &boundary).unwrap();
        let oracle = dense_pressure_oracle(&s.graph, &s.live, &s.conductivities, &s.sources, s.sink, 1.0);
        for v in 0..n {
            prop_assert!(close(p[v], oracle[v], 1e-8));
        }
    }

    #[test]
    fn scaling_conductivities_scales_pressures(seed in any::<u64>(), n in 2usize..40, extra in 0usize..50, lambda in 0.1f64..20.0) {
        let s = setup(seed, n, extra, 4);
        let boundary = FluxBoundary::new(s.sources.clone(), s.sink, 1.0).unwrap();
        let p = solve_pressures(&s.graph, &s.live, &s.conductivities, &boundary).unwrap();
        let scaled: Vec<f64> = s.conductivities.iter().map(|d| d * lambda).collect();
        let ps = solve_pressures(&s.graph, &s.live, &scaled, &boundary).unwrap();
        let q = compute_fluxes(&s.graph, &s.live, &s.conductivities, &p);
        let qs = compute_fluxes(&s.graph, &s.live, &scaled, &ps);
        for v in 0..n {
            prop_assert!(close(ps[v] * lambda, p[v], 1e-8));
        }
        for e in 0..q.len() {
            prop_assert!(close(qs[e], q[e], 1e-8));
        }
    }

    #[test]
    fn split_boundary_is_an_error(seed in any::<u64>(), n in 4usize..30) {
        let s = setup(seed, n, 10, 2);
        // remove every edge touching the sink so the sources cannot reach it
        let mut live = s.live.clone();
        for &(_, e) in s.graph.neighbors(s.sink) {
            live.remove(e);
        }
        let boundary = FluxBoundary::new(s.sources.clone(), s.sink, 1.0).unwrap();
        prop_assert!(solve_pressures(&s.graph, &live, &s.conductivities, &boundary).is_err());
    }
}
