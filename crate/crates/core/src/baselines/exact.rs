use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::graph::{spanning_forest, EdgeId, Instance, SteinerSolution};

/// Largest terminal count the exact solver accepts (state space `3^|T|`).
pub const MAX_EXACT_TERMINALS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("{terminals} terminals exceed the exact solver limit of {limit}")]
    TooManyTerminals { terminals: usize, limit: usize },
}

#[derive(Clone, Copy)]
enum Back {
    Unset,
    Leaf,
    Edge { from: u32, edge: u32 },
    Split { subset: u32 },
}

#[derive(PartialEq)]
struct Label(f64, usize);

impl Eq for Label {}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Optimal Steiner tree by Dreyfus–Wagner dynamic programming.
///
/// `cost[S][v]` is the cheapest tree spanning terminal subset `S` plus `v`;
/// subsets combine at a shared vertex and then extend along shortest paths.
pub fn exact_dreyfus_wagner(instance: &Instance) -> Result<SteinerSolution, ExactError> {
    let k = instance.terminals.len();
    if k > MAX_EXACT_TERMINALS {
        return Err(ExactError::TooManyTerminals {
            terminals: k,
            limit: MAX_EXACT_TERMINALS,
        });
    }
    if k <= 1 {
        return Ok(SteinerSolution::empty());
    }
    let graph = &instance.graph;
    let n = graph.vertex_count();
    let (base, root) = instance.terminals.split_at(k - 1);
    let root = root[0];
    let subsets = 1usize << base.len();
    let full = subsets - 1;

    let mut cost = vec![f64::INFINITY; subsets * n];
    let mut back = vec![Back::Unset; subsets * n];

    for set in 1..subsets {
        let row = set * n;
        if set.is_power_of_two() {
            let t = base[set.trailing_zeros() as usize];
            cost[row + t] = 0.0;
            back[row + t] = Back::Leaf;
        } else {
            let low = set & set.wrapping_neg();
            let rest = set ^ low;
            // submasks of `set` that contain its lowest bit, excluding `set`
            let mut sub = rest;
            loop {
                let a = sub | low;
                if a != set {
                    let b = set ^ a;
                    for v in 0..n {
                        let c = cost[a * n + v] + cost[b * n + v];
                        if c < cost[row + v] {
                            cost[row + v] = c;
                            back[row + v] = Back::Split { subset: a as u32 };
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }

        let mut heap: BinaryHeap<Label> = (0..n)
            .filter(|&v| cost[row + v].is_finite())
            .map(|v| Label(cost[row + v], v))
            .collect();
        while let Some(Label(d, v)) = heap.pop() {
            if d > cost[row + v] {
                continue;
            }
            for &(w, e) in graph.neighbors(v) {
                let c = d + graph.length(e);
                if c < cost[row + w] {
                    cost[row + w] = c;
                    back[row + w] = Back::Edge {
                        from: v as u32,
                        edge: e.index() as u32,
                    };
                    heap.push(Label(c, w));
                }
            }
        }
    }

    let mut edges = Vec::new();
    let mut stack = vec![(full, root)];
    while let Some((set, v)) = stack.pop() {
        match back[set * n + v] {
            Back::Unset | Back::Leaf => {}
            Back::Edge { from, edge } => {
                edges.push(EdgeId(edge as usize));
                stack.push((set, from as usize));
            }
            Back::Split { subset } => {
                let a = subset as usize;
                stack.push((a, v));
                stack.push((set ^ a, v));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let tree = spanning_forest(graph, edges);
    Ok(SteinerSolution::new(graph, tree, 0))
}
