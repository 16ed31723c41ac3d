use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::{Dijkstra, Instance, VertexId};

use super::{Hms3poError, Hms3poParams};

/// Vertex subsets produced by the partitioner. Subsets may overlap.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionSet {
    /// Each subset is sorted ascending.
    pub subsets: Vec<Vec<VertexId>>,
    /// Maximum merged subset size, `d·|V|/n`.
    pub cap: f64,
}

impl PartitionSet {
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Candidate {
    dist: f64,
    vertex: VertexId,
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

struct Region<'g> {
    members: Vec<bool>,
    size: usize,
    search: Dijkstra<'g>,
    frontier: BinaryHeap<Candidate>,
}

impl Region<'_> {
    fn absorb(&mut self, v: VertexId) {
        if !self.members[v] {
            self.members[v] = true;
            self.size += 1;
            self.search.add_source(v);
        }
    }

    fn refresh(&mut self) {
        let mut changed = Vec::new();
        self.search.run_tracking(&mut changed);
        for v in changed {
            self.frontier.push(Candidate {
                dist: self.search.distance(v),
                vertex: v,
            });
        }
    }

    /// Closest vertex not yet in any subset, dropping stale heap entries.
    fn nearest_unassigned(&mut self, assigned: &[bool]) -> Option<Candidate> {
        while let Some(&top) = self.frontier.peek() {
            if assigned[top.vertex] || top.dist > self.search.distance(top.vertex) {
                self.frontier.pop();
            } else {
                return Some(top);
            }
        }
        None
    }
}

/// Region growing from one singleton subset per terminal.
///
/// Each step takes the globally closest (subset, unassigned vertex) pair,
/// ties broken by distance, vertex id, then subset index. The vertex joins
/// together with the interior of its shortest path to the subset when the
/// enlarged subset stays within `d·|V|/n`; otherwise growth stops.
pub fn grow_partitions(instance: &Instance, params: &Hms3poParams) -> Result<PartitionSet, Hms3poError> {
    params.validate(instance)?;
    let graph = &instance.graph;
    let n = graph.vertex_count();
    let cap = params.cap(n);
    let mut assigned = vec![false; n];
    let mut regions: Vec<Region> = instance
        .terminals
        .iter()
        .map(|&t| {
            assigned[t] = true;
            let mut region = Region {
                members: vec![false; n],
                size: 0,
                search: Dijkstra::new(graph),
                frontier: BinaryHeap::new(),
            };
            region.absorb(t);
            region.refresh();
            region
        })
        .collect();
    let mut unassigned = n - instance.terminals.len();

    while unassigned > 0 {
        let mut best: Option<(Candidate, usize)> = None;
        for (idx, region) in regions.iter_mut().enumerate() {
            if let Some(c) = region.nearest_unassigned(&assigned) {
                let better = match best {
                    None => true,
                    Some((b, _)) => c.dist < b.dist || (c.dist == b.dist && c.vertex < b.vertex),
                };
                if better {
                    best = Some((c, idx));
                }
            }
        }
        let Some((candidate, idx)) = best else {
            break;
        };
        let region = &mut regions[idx];
        let path = region.search.paths().path_vertices(candidate.vertex);
        let fresh: Vec<VertexId> = path.into_iter().filter(|&v| !region.members[v]).collect();
        if (region.size + fresh.len()) as f64 > cap {
            break;
        }
        for v in fresh {
            if !assigned[v] {
                assigned[v] = true;
                unassigned -= 1;
            }
            region.absorb(v);
        }
        region.refresh();
    }

    let subsets = regions
        .into_iter()
        .map(|r| {
            r.members
                .iter()
                .enumerate()
                .filter_map(|(v, &m)| m.then_some(v))
                .collect()
        })
        .collect();
    Ok(PartitionSet { subsets, cap })
}

/// Merges the smallest subset into its nearest neighbour (with the vertices
/// of the connecting shortest path) until at most `n` subsets remain or a
/// merge would exceed the cap.
pub fn merge_partitions(
    instance: &Instance,
    mut partitions: PartitionSet,
    params: &Hms3poParams,
) -> Result<PartitionSet, Hms3poError> {
    params.validate(instance)?;
    let graph = &instance.graph;
    let n = graph.vertex_count();
    while partitions.subsets.len() > params.target_partitions {
        let subsets = &partitions.subsets;
        let smallest = (0..subsets.len())
            .min_by_key(|&i| (subsets[i].len(), i))
            .expect("non-empty");
        let mut search = Dijkstra::new(graph);
        for &v in &subsets[smallest] {
            search.add_source(v);
        }
        search.run();

        let mut nearest: Option<(f64, usize, VertexId)> = None;
        for (idx, subset) in subsets.iter().enumerate() {
            if idx == smallest {
                continue;
            }
            let &closest = subset
                .iter()
                .min_by(|&&a, &&b| search.distance(a).total_cmp(&search.distance(b)).then(a.cmp(&b)))
                .expect("subsets are non-empty");
            let d = search.distance(closest);
            if nearest.is_none_or(|(bd, _, _)| d < bd) {
                nearest = Some((d, idx, closest));
            }
        }
        let (_, other, endpoint) = nearest.expect("more than one subset");

        let mut in_either = vec![false; n];
        for &v in subsets[smallest].iter().chain(&subsets[other]) {
            in_either[v] = true;
        }
        let interior: Vec<VertexId> = search
            .paths()
            .path_vertices(endpoint)
            .into_iter()
            .filter(|&v| !in_either[v])
            .collect();
        let combined = subsets[smallest].len() + subsets[other].len() + interior.len();
        if combined as f64 > partitions.cap {
            break;
        }
        let mut merged: Vec<VertexId> = subsets[smallest]
            .iter()
            .chain(&subsets[other])
            .chain(&interior)
            .copied()
            .collect();
        merged.sort_unstable();
        merged.dedup();
        let (keep, drop) = (smallest.min(other), smallest.max(other));
        partitions.subsets[keep] = merged;
        partitions.subsets.remove(drop);
    }
    Ok(partitions)
}
