use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;

use super::knn::{knn_gaussian_graph, Bandwidth, PointCloud};
use super::rng;
use crate::error::{HkcError, Result};
use crate::graph::{Edge, WeightedGraph};

const ANGLE_JITTER: f64 = 0.2;
const RADIAL_JITTER: f64 = 0.02;
/// Kernel times for the ring experiment.
pub const RING_TIMES: [f64; 3] = [1.0, 3.0, 10.0];

/// A closed ring and its cracked copy over the same sampled points.
#[derive(Debug, Clone)]
pub struct RingPair {
    pub g1: WeightedGraph,
    pub g2: WeightedGraph,
    pub correspondence: Vec<usize>,
    pub points: DMatrix<f64>,
    /// The crack sits between vertex `crack_after` and its successor.
    pub crack_after: usize,
    /// Edges of graph 1 that cross the crack (absent from graph 2 when cracked).
    pub crack_edges: Vec<Edge>,
    /// Suggested landmark vertices: the two ends of the crack and the far side.
    pub landmarks: Vec<usize>,
}

/// Whether the shorter arc of edge `(a, b)` on an `n`-cycle passes the gap
/// between `c` and `c + 1`.
fn crosses(e: &Edge, c: usize, n: usize) -> bool {
    let fwd = (e.j + n - e.i) % n;
    if fwd <= n / 2 {
        (c + n - e.i) % n < fwd
    } else {
        (c + n - e.j) % n < n - fwd
    }
}

/// Samples `n` jittered points on the unit circle and connects them by a
/// self-tuning Gaussian kNN graph. Graph 2 is either the same graph or, when
/// `crack` is set, the same graph minus every edge spanning a seeded gap.
pub fn gen_ring_pair(n: usize, k: usize, crack: bool, seed: u64) -> Result<RingPair> {
    if n < 10 || k == 0 {
        return Err(HkcError::InvalidParameter(format!(
            "ring needs n >= 10 and k >= 1 (got n = {n}, k = {k})"
        )));
    }
    let mut rng = rng(seed);
    let step = 2.0 * PI / n as f64;
    let mut points = DMatrix::zeros(n, 2);
    for i in 0..n {
        let theta = step * (i as f64 + rng.random_range(-ANGLE_JITTER..ANGLE_JITTER));
        let r = 1.0 + rng.random_range(-RADIAL_JITTER..RADIAL_JITTER);
        points[(i, 0)] = r * theta.cos();
        points[(i, 1)] = r * theta.sin();
    }
    let crack_after = rng.random_range(0..n);

    let pc = PointCloud::new(points.clone(), None)?;
    let g1 = knn_gaussian_graph(&pc, k, Bandwidth::SelfTuning)?;
    let crack_edges: Vec<Edge> = g1
        .edges()
        .iter()
        .filter(|e| crosses(e, crack_after, n))
        .copied()
        .collect();

    let g2 = if crack {
        let triplets: Vec<_> = g1
            .edges()
            .iter()
            .zip(g1.weights())
            .filter(|(e, _)| !crosses(e, crack_after, n))
            .map(|(e, &w)| (e.i, e.j, w))
            .collect();
        WeightedGraph::from_triplets(n, &triplets)?
    } else {
        g1.clone()
    };

    let landmarks = vec![
        crack_after,
        (crack_after + 1) % n,
        (crack_after + n / 2) % n,
    ];
    Ok(RingPair {
        g1,
        g2,
        correspondence: (0..n).collect(),
        points,
        crack_after,
        crack_edges,
        landmarks,
    })
}
