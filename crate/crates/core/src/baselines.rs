//! Laplacian averaging for two graphs on the same vertex set.

use std::collections::BTreeMap;

use crate::error::{HkcError, Result};
use crate::graph::{Edge, WeightedGraph};

/// Graph whose Laplacian is `(L1 + L2) / 2`, on the union of both edge sets
/// (an edge missing from one graph counts as weight zero there).
pub fn average_laplacian(g1: &WeightedGraph, g2: &WeightedGraph) -> Result<WeightedGraph> {
    if g1.n() != g2.n() {
        return Err(HkcError::DimensionMismatch(format!(
            "averaging graphs with {} and {} vertices",
            g1.n(),
            g2.n()
        )));
    }
    let mut merged: BTreeMap<Edge, f64> = BTreeMap::new();
    for g in [g1, g2] {
        for (e, &w) in g.edges().iter().zip(g.weights()) {
            *merged.entry(*e).or_insert(0.0) += 0.5 * w;
        }
    }
    let (edges, weights) = merged.into_iter().unzip();
    WeightedGraph::new(g1.n(), edges, weights)
}

/// Union of two edge sets in canonical order.
pub fn union_edges(a: &[Edge], b: &[Edge]) -> Vec<Edge> {
    let mut all: Vec<Edge> = a.iter().chain(b).copied().collect();
    all.sort();
    all.dedup();
    all
}
