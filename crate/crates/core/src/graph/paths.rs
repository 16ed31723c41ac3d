use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{EdgeId, Graph, GraphError, VertexId};

#[derive(Clone, Copy, Debug)]
struct Entry {
    dist: f64,
    vertex: VertexId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so that `BinaryHeap` pops the smallest (distance, vertex) first.
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Distances and a shortest-path forest from a set of sources.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPaths {
    /// `f64::INFINITY` for unreachable vertices.
    pub distance: Vec<f64>,
    /// Previous vertex and the edge used to reach it; `None` at sources and
    /// unreachable vertices.
    pub predecessor: Vec<Option<(VertexId, EdgeId)>>,
}

impl ShortestPaths {
    /// Edges of the recorded path from the nearest source to `v`, ordered
    /// from `v` back towards the source.
    pub fn path_edges(&self, mut v: VertexId) -> Vec<EdgeId> {
        let mut edges = Vec::new();
        while let Some((prev, e)) = self.predecessor[v] {
            edges.push(e);
            v = prev;
        }
        edges
    }

    /// Vertices of the recorded path, from `v` back to the source.
    pub fn path_vertices(&self, mut v: VertexId) -> Vec<VertexId> {
        let mut vs = vec![v];
        while let Some((prev, _)) = self.predecessor[v] {
            vs.push(prev);
            v = prev;
        }
        vs
    }
}

/// Multi-source Dijkstra that can take further sources after it has run.
///
/// Adding sources later only lowers distances, so re-running from the new
/// sources alone keeps every label exact.
#[derive(Clone, Debug)]
pub struct Dijkstra<'g> {
    graph: &'g Graph,
    paths: ShortestPaths,
    heap: BinaryHeap<Entry>,
}

impl<'g> Dijkstra<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let n = graph.vertex_count();
        Self {
            graph,
            paths: ShortestPaths {
                distance: vec![f64::INFINITY; n],
                predecessor: vec![None; n],
            },
            heap: BinaryHeap::new(),
        }
    }

    pub fn add_source(&mut self, v: VertexId) {
        if self.paths.distance[v] > 0.0 || self.paths.predecessor[v].is_some() {
            self.paths.distance[v] = 0.0;
            self.paths.predecessor[v] = None;
            self.heap.push(Entry { dist: 0.0, vertex: v });
        }
    }

    pub fn run(&mut self) {
        self.run_inner(None);
    }

    /// Like [`run`](Self::run), appending every vertex whose label improved.
    pub fn run_tracking(&mut self, changed: &mut Vec<VertexId>) {
        self.run_inner(Some(changed));
    }

    fn run_inner(&mut self, mut changed: Option<&mut Vec<VertexId>>) {
        let graph = self.graph;
        while let Some(Entry { dist, vertex }) = self.heap.pop() {
            if dist > self.paths.distance[vertex] {
                continue;
            }
            for &(w, e) in graph.neighbors(vertex) {
                let candidate = dist + graph.length(e);
                if candidate < self.paths.distance[w] {
                    self.paths.distance[w] = candidate;
                    self.paths.predecessor[w] = Some((vertex, e));
                    if let Some(list) = changed.as_deref_mut() {
                        list.push(w);
                    }
                    self.heap.push(Entry {
                        dist: candidate,
                        vertex: w,
                    });
                }
            }
        }
    }

    pub fn paths(&self) -> &ShortestPaths {
        &self.paths
    }

    pub fn distance(&self, v: VertexId) -> f64 {
        self.paths.distance[v]
    }

    pub fn into_paths(self) -> ShortestPaths {
        self.paths
    }
}

/// Shortest distances from the nearest of `sources` to every vertex.
pub fn shortest_paths(graph: &Graph, sources: &[VertexId]) -> Result<ShortestPaths, GraphError> {
    if sources.is_empty() {
        return Err(GraphError::EmptySources);
    }
    let mut dijkstra = Dijkstra::new(graph);
    for &s in sources {
        if s >= graph.vertex_count() {
            return Err(GraphError::VertexOutOfRange {
                vertex: s,
                vertex_count: graph.vertex_count(),
            });
        }
        dijkstra.add_source(s);
    }
    dijkstra.run();
    Ok(dijkstra.into_paths())
}
