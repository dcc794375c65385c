use nalgebra::DMatrix;

use crate::error::{HkcError, Result};
use crate::graph::WeightedGraph;

/// Feature vectors or coordinates, one row per point, with optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: DMatrix<f64>,
    labels: Option<Vec<usize>>,
}

impl PointCloud {
    pub fn new(points: DMatrix<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        if points.ncols() == 0 || points.nrows() == 0 {
            return Err(HkcError::InvalidParameter(
                "point cloud needs at least one point and one dimension".into(),
            ));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(HkcError::InvalidParameter("non-finite coordinate".into()));
        }
        if let Some(l) = &labels {
            if l.len() != points.nrows() {
                return Err(HkcError::DimensionMismatch(format!(
                    "{} labels for {} points",
                    l.len(),
                    points.nrows()
                )));
            }
        }
        Ok(PointCloud { points, labels })
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    fn sq_dist(&self, a: usize, b: usize) -> f64 {
        (0..self.dim())
            .map(|c| {
                let d = self.points[(a, c)] - self.points[(b, c)];
                d * d
            })
            .sum()
    }
}

/// Gaussian bandwidth rule for [`knn_gaussian_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// `σ_i` is the distance from point `i` to its k-th nearest neighbor.
    SelfTuning,
    /// One `σ` for every point.
    Global(f64),
}

/// Symmetrized (union) kNN graph with weights `exp(-‖x_i - x_j‖² / (σ_i σ_j))`.
pub fn knn_gaussian_graph(pc: &PointCloud, k: usize, bandwidth: Bandwidth) -> Result<WeightedGraph> {
    let n = pc.len();
    if k == 0 || k >= n {
        return Err(HkcError::InvalidParameter(format!(
            "k = {k} must satisfy 1 <= k < n = {n}"
        )));
    }
    if let Bandwidth::Global(s) = bandwidth {
        if !(s.is_finite() && s > 0.0) {
            return Err(HkcError::InvalidParameter(format!("sigma must be positive, got {s}")));
        }
    }

    let mut neighbors = Vec::with_capacity(n);
    let mut sigma = vec![0.0; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        let mut cand: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (pc.sq_dist(i, j), j))
            .collect();
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        cand.truncate(k);
        if cand[0].0 == 0.0 {
            return Err(HkcError::DuplicatePoint { index: i });
        }
        sigma[i] = match bandwidth {
            Bandwidth::SelfTuning => cand[k - 1].0.sqrt(),
            Bandwidth::Global(s) => s,
        };
        neighbors.push(cand);
    }

    let mut triplets = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, cand) in neighbors.iter().enumerate() {
        for &(d2, j) in cand {
            let key = (i.min(j), i.max(j));
            if seen.insert(key) {
                triplets.push((key.0, key.1, (-d2 / (sigma[i] * sigma[j])).exp()));
            }
        }
    }
    WeightedGraph::from_triplets(n, &triplets)
}
