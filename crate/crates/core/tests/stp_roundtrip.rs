mod common;

use common::{data_dir, random_instance};
use physarum_steiner::graph::Graph;
use physarum_steiner::graph::Instance;
use physarum_steiner::stp::{emit_stp, parse_stp, read_optima, read_stp, StpError};
use proptest::prelude::*;

fn bundled() -> Vec<std::path::PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(data_dir().join("steinb"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "stp"))
        .collect();
    files.sort();
    files
}

#[test]
fn bundled_files_round_trip() {
    let files = bundled();
    assert!(!files.is_empty());
    for path in files {
        let inst = read_stp(&path).unwrap();
        let text = emit_stp(&inst);
        let again = parse_stp(&text).unwrap().with_name(inst.name.clone());
        assert_eq!(again, inst, "{}", path.display());
        assert_eq!(emit_stp(&again), text);
    }
}

#[test]
fn bundled_sizes_match_steinlib() {
    let b01 = read_stp(&data_dir().join("steinb/b01.stp")).unwrap();
    assert_eq!(
        (b01.graph.vertex_count(), b01.graph.edge_count(), b01.terminals.len()),
        (50, 63, 9)
    );
    let b07 = read_stp(&data_dir().join("steinb/b07.stp")).unwrap();
    assert_eq!(
        (b07.graph.vertex_count(), b07.graph.edge_count(), b07.terminals.len()),
        (75, 94, 13)
    );
}

#[test]
fn registry_covers_bundled_instances() {
    let registry = read_optima(&data_dir().join("optima.csv")).unwrap();
    assert_eq!(registry.get("b01"), Some(82.0));
    assert_eq!(registry.get("B07"), Some(111.0));
    for path in bundled() {
        let inst = read_stp(&path).unwrap();
        assert!(registry.get(&inst.name).is_some(), "{}", inst.name);
    }
}

#[test]
fn fractional_lengths_survive() {
    let g = Graph::new(3, [(0, 1, 0.5), (1, 2, 1.25), (0, 2, 3.0)]).unwrap();
    let inst = Instance::new(g, [0, 2]).unwrap().with_name("frac");
    let text = emit_stp(&inst);
    assert!(text.contains("E 1 2 0.5\n"));
    assert!(text.contains("E 1 3 3\n"));
    assert_eq!(parse_stp(&text).unwrap(), inst);
}

#[test]
fn corrupted_fields_are_rejected() {
    let base = "SECTION Graph\nNodes 3\nEdges 2\nE 1 2 1\nE 2 3 1\nEND\nSECTION Terminals\nTerminals 2\nT 1\nT 3\nEND\nEOF\n";
    assert!(parse_stp(base).is_ok());
    let cases = [
        ("E 1 2 1", "E 1 4 1"),
        ("E 1 2 1", "E 0 2 1"),
        ("E 1 2 1", "E 1 1 1"),
        ("E 1 2 1", "E 1 2 0"),
        ("E 1 2 1", "E 1 2 -3"),
        ("E 1 2 1", "E 1 2 inf"),
        ("E 1 2 1", "E 1 2 NaN"),
        ("E 1 2 1", "E 1 2 x"),
        ("Edges 2", "Edges 3"),
        ("Nodes 3", "Nodes 2"),
        ("T 3", "T 4"),
        ("Terminals 2", "Terminals 1"),
    ];
    for (from, to) in cases {
        let text = base.replacen(from, to, 1);
        assert!(parse_stp(&text).is_err(), "accepted `{to}`");
    }
}

#[test]
fn disconnected_graph_names_component() {
    let text = "SECTION Graph\nNodes 4\nEdges 2\nE 1 2 1\nE 3 4 1\nEND\nSECTION Terminals\nTerminals 1\nT 1\nEND\nEOF\n";
    match parse_stp(text) {
        Err(StpError::Disconnected { component, .. }) => assert_eq!(component, vec![3, 4]),
        other => panic!("unexpected {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emit_then_parse_is_identity(seed in any::<u64>(), n in 1usize..40, extra in 0usize..60, k in 1usize..8) {
        let inst = random_instance(seed, n, extra, k).with_name(format!("r{seed}"));
        let text = emit_stp(&inst);
        let back = parse_stp(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(emit_stp(&back), text);
    }
}
