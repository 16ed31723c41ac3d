use fixedbitset::FixedBitSet;

use super::{EdgeId, Graph, VertexId};

/// A subset of a graph's edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    bits: FixedBitSet,
}

impl EdgeSet {
    pub fn empty(edge_count: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(edge_count),
        }
    }

    pub fn full(edge_count: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(edge_count);
        bits.insert_range(..);
        Self { bits }
    }

    pub fn from_edges(edge_count: usize, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut set = Self::empty(edge_count);
        for e in edges {
            set.insert(e);
        }
        set
    }

    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        self.bits.contains(e.0)
    }

    #[inline]
    pub fn insert(&mut self, e: EdgeId) {
        self.bits.insert(e.0);
    }

    #[inline]
    pub fn remove(&mut self, e: EdgeId) {
        self.bits.set(e.0, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Size of the underlying edge universe.
    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.bits.ones().map(EdgeId)
    }

    pub fn total_length(&self, graph: &Graph) -> f64 {
        self.iter().map(|e| graph.length(e)).sum()
    }

    /// Vertices touched by at least one member edge, ascending.
    pub fn vertices(&self, graph: &Graph) -> Vec<VertexId> {
        let mut mask = vec![false; graph.vertex_count()];
        for e in self.iter() {
            let edge = graph.edge(e);
            mask[edge.u] = true;
            mask[edge.v] = true;
        }
        mask.iter()
            .enumerate()
            .filter_map(|(v, &m)| m.then_some(v))
            .collect()
    }

    /// Sum of member edge lengths incident to `v`.
    pub fn incident_length(&self, graph: &Graph, v: VertexId) -> f64 {
        graph
            .neighbors(v)
            .iter()
            .filter(|&&(_, e)| self.contains(e))
            .map(|&(_, e)| graph.length(e))
            .sum()
    }
}
