//! Weighted simple graphs and their unnormalized Laplacians.
//!
//! A graph owns a fixed, lexicographically ordered edge list and one
//! nonnegative weight per edge. The weight vector is the parametrization the
//! optimizer works on: index `l` of the weight vector always refers to the
//! `l`-th edge in canonical order. Zero-weight edges stay in the edge set.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{HkcError, Result};

/// Undirected edge between two distinct vertices, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
}

impl Edge {
    /// Builds an edge from an unordered pair. Self-loops are rejected.
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(HkcError::InvalidGraph(format!("self-loop at vertex {a}")));
        }
        Ok(Edge {
            i: a.min(b),
            j: a.max(b),
        })
    }
}

/// Weighted simple graph with a fixed edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Creates a graph from a canonical edge list (strictly increasing,
    /// `i < j < n`) and matching nonnegative weights.
    pub fn new(n: usize, edges: Vec<Edge>, weights: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(HkcError::InvalidGraph("vertex count must be positive".into()));
        }
        if edges.len() != weights.len() {
            return Err(HkcError::DimensionMismatch(format!(
                "{} edges but {} weights",
                edges.len(),
                weights.len()
            )));
        }
        for (l, e) in edges.iter().enumerate() {
            if e.i >= e.j {
                return Err(HkcError::InvalidGraph(format!(
                    "edge {l} = ({}, {}) must satisfy i < j",
                    e.i, e.j
                )));
            }
            if e.j >= n {
                return Err(HkcError::InvalidGraph(format!(
                    "edge {l} = ({}, {}) references a vertex >= n = {n}",
                    e.i, e.j
                )));
            }
            if l > 0 && edges[l - 1] >= *e {
                let prev = edges[l - 1];
                return Err(HkcError::InvalidGraph(if prev == *e {
                    format!("duplicate edge ({}, {})", e.i, e.j)
                } else {
                    format!(
                        "edges not in lexicographic order at index {l}: ({}, {}) after ({}, {})",
                        e.i, e.j, prev.i, prev.j
                    )
                }));
            }
        }
        check_weights(&weights)?;
        Ok(WeightedGraph { n, edges, weights })
    }

    /// Creates a graph from `(a, b, w)` triplets in any order and orientation.
    /// Duplicate pairs and self-loops are errors.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut items = triplets
            .iter()
            .map(|&(a, b, w)| Edge::new(a, b).map(|e| (e, w)))
            .collect::<Result<Vec<_>>>()?;
        items.sort_by_key(|x| x.0);
        let (edges, weights) = items.into_iter().unzip();
        Self::new(n, edges, weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Same topology, new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(HkcError::DimensionMismatch(format!(
                "{} edges but {} weights",
                self.edges.len(),
                weights.len()
            )));
        }
        check_weights(&weights)?;
        Ok(WeightedGraph {
            n: self.n,
            edges: self.edges.clone(),
            weights,
        })
    }

    /// Index of edge `(a, b)` in canonical order, if present.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let e = Edge::new(a, b).ok()?;
        self.edges.binary_search(&e).ok()
    }

    /// Relabels vertices: old vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(HkcError::DimensionMismatch(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                self.n
            )));
        }
        let triplets: Vec<_> = self
            .edges
            .iter()
            .zip(&self.weights)
            .map(|(e, &w)| (perm[e.i], perm[e.j], w))
            .collect();
        Self::from_triplets(self.n, &triplets)
    }

    /// Number of connected components, counting only edges with weight
    /// strictly above `threshold`. Pass a negative threshold to count the
    /// full edge set regardless of weight.
    pub fn connected_components(&self, threshold: f64) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = self.n;
        for (e, &w) in self.edges.iter().zip(&self.weights) {
            if w <= threshold {
                continue;
            }
            let (a, b) = (find(&mut parent, e.i), find(&mut parent, e.j));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        components
    }

    /// Dimension of the cycle space, `m - n + c`, over the full edge set.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.connected_components(-1.0) - self.n
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(HkcError::InvalidGraph(format!(
                "weight {index} is not finite"
            )));
        }
        if value < 0.0 {
            return Err(HkcError::NegativeWeight { index, value });
        }
    }
    Ok(())
}

/// Dense unnormalized Laplacian `L = D - W`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(DMatrix<f64>);

impl LaplacianMatrix {
    /// Wraps a matrix after checking that it is square and symmetric. Use
    /// [`validate_laplacian`] for the full structural check.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(HkcError::DimensionMismatch(format!(
                "Laplacian must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let asym = max_asymmetry(&m);
        if asym > 1e-10 * max_abs(&m).max(f64::MIN_POSITIVE) {
            return Err(HkcError::NotSymmetric { asymmetry: asym });
        }
        Ok(LaplacianMatrix(m))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

impl AsRef<DMatrix<f64>> for LaplacianMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for c in 0..n {
        for r in (c + 1)..n {
            worst = worst.max((m[(r, c)] - m[(c, r)]).abs());
        }
    }
    worst
}

/// Symmetric adjacency matrix `W` of the graph (zero diagonal).
pub fn weights_to_adjacency(g: &WeightedGraph) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(g.n, g.n);
    for (e, &u) in g.edges.iter().zip(&g.weights) {
        w[(e.i, e.j)] = u;
        w[(e.j, e.i)] = u;
    }
    w
}

/// Unnormalized Laplacian of the graph.
pub fn laplacian(g: &WeightedGraph) -> LaplacianMatrix {
    LaplacianMatrix(assemble(g.n, &g.edges, &g.weights))
}

/// The map `u -> L(u)` over a fixed edge set.
pub fn laplacian_from_weights(edges: &[Edge], n: usize, u: &[f64]) -> Result<LaplacianMatrix> {
    if edges.len() != u.len() {
        return Err(HkcError::DimensionMismatch(format!(
            "{} edges but {} weights",
            edges.len(),
            u.len()
        )));
    }
    if let Some(e) = edges.iter().find(|e| e.i == e.j || e.i.max(e.j) >= n) {
        return Err(HkcError::InvalidGraph(format!(
            "edge ({}, {}) invalid for n = {n}",
            e.i, e.j
        )));
    }
    check_weights(u)?;
    Ok(LaplacianMatrix(assemble(n, edges, u)))
}

// Off-diagonals are written symmetrically, so the result is exactly symmetric.
fn assemble(n: usize, edges: &[Edge], u: &[f64]) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for (e, &w) in edges.iter().zip(u) {
        l[(e.i, e.j)] -= w;
        l[(e.j, e.i)] -= w;
        l[(e.i, e.i)] += w;
        l[(e.j, e.j)] += w;
    }
    l
}

/// Outcome of one structural check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub pass: bool,
    pub max_violation: f64,
}

/// Per-property result of [`validate_laplacian`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    /// Symmetric with nonpositive off-diagonal entries.
    pub symmetric_nonpositive: PropertyCheck,
    /// Off-diagonal support confined to the edge set.
    pub sparsity: PropertyCheck,
    /// Every row sums to zero.
    pub zero_row_sum: PropertyCheck,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.symmetric_nonpositive.pass && self.sparsity.pass && self.zero_row_sum.pass
    }
}

/// Checks the three structural properties of a valid Laplacian on the given
/// edge set. Tolerances scale with `n * max|entry|`.
pub fn validate_laplacian(l: &DMatrix<f64>, edges: &[Edge]) -> Result<ValidityReport> {
    if !l.is_square() {
        return Err(HkcError::DimensionMismatch(format!(
            "matrix is {}x{}",
            l.nrows(),
            l.ncols()
        )));
    }
    let n = l.nrows();
    if let Some(e) = edges.iter().find(|e| e.i.max(e.j) >= n) {
        return Err(HkcError::DimensionMismatch(format!(
            "edge ({}, {}) out of range for a {n}x{n} matrix",
            e.i, e.j
        )));
    }
    let tol = 1e-10 * n as f64 * max_abs(l);

    let mut on_edge = vec![false; n * n];
    for e in edges {
        on_edge[e.i * n + e.j] = true;
        on_edge[e.j * n + e.i] = true;
    }

    let mut sym = 0.0_f64;
    let mut sparse = 0.0_f64;
    for r in 0..n {
        for c in 0..n {
            if r == c {
                continue;
            }
            let v = l[(r, c)];
            sym = sym.max((v - l[(c, r)]).abs()).max(v);
            if !on_edge[r * n + c] {
                sparse = sparse.max(v.abs());
            }
        }
    }
    let row = (0..n)
        .map(|r| l.row(r).sum().abs())
        .fold(0.0_f64, f64::max);

    let check = |v: f64| PropertyCheck {
        pass: v <= tol,
        max_violation: v,
    };
    Ok(ValidityReport {
        symmetric_nonpositive: check(sym),
        sparsity: check(sparse),
        zero_row_sum: check(row),
    })
}

/// Squared Frobenius norm.
pub fn frobenius_sq(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn path3() -> WeightedGraph {
        WeightedGraph::from_triplets(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn adjacency_examples() {
        let g = WeightedGraph::from_triplets(2, &[(0, 1, 3.0)]).unwrap();
        assert_eq!(weights_to_adjacency(&g), dmatrix![0.0, 3.0; 3.0, 0.0]);

        let empty = WeightedGraph::new(3, vec![], vec![]).unwrap();
        assert_eq!(weights_to_adjacency(&empty), DMatrix::zeros(3, 3));

        let g = WeightedGraph::from_triplets(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(
            weights_to_adjacency(&g),
            dmatrix![0.0, 1.0, 0.0; 1.0, 0.0, 2.0; 0.0, 2.0, 0.0]
        );
    }

    #[test]
    fn laplacian_examples() {
        let w = 2.5;
        let g = WeightedGraph::from_triplets(2, &[(0, 1, w)]).unwrap();
        assert_eq!(laplacian(&g).into_inner(), dmatrix![w, -w; -w, w]);

        assert_eq!(
            laplacian(&path3()).into_inner(),
            dmatrix![1.0, -1.0, 0.0; -1.0, 2.0, -1.0; 0.0, -1.0, 1.0]
        );

        let l = laplacian(&path3()).into_inner();
        let ones = nalgebra::DVector::from_element(3, 1.0);
        assert_eq!(l * ones, nalgebra::DVector::zeros(3));
    }

    #[test]
    fn zero_weight_gives_zero_laplacian() {
        let l = laplacian_from_weights(&[Edge::new(0, 1).unwrap()], 2, &[0.0]).unwrap();
        assert_eq!(l.into_inner(), DMatrix::zeros(2, 2));
    }

    #[test]
    fn negative_weight_rejected() {
        let err = laplacian_from_weights(&[Edge::new(0, 1).unwrap()], 2, &[-1.0]).unwrap_err();
        assert!(matches!(err, HkcError::NegativeWeight { index: 0, .. }));
        assert!(WeightedGraph::from_triplets(2, &[(0, 1, -0.5)]).is_err());
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(WeightedGraph::from_triplets(3, &[(1, 1, 1.0)]).is_err());
        assert!(WeightedGraph::from_triplets(3, &[(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(WeightedGraph::from_triplets(3, &[(0, 3, 1.0)]).is_err());
        let unsorted = vec![Edge::new(1, 2).unwrap(), Edge::new(0, 1).unwrap()];
        assert!(WeightedGraph::new(3, unsorted, vec![1.0, 1.0]).is_err());
        assert!(WeightedGraph::new(0, vec![], vec![]).is_err());
    }

    #[test]
    fn validation_examples() {
        let e01 = [Edge::new(0, 1).unwrap()];
        let ok = validate_laplacian(&dmatrix![1.0, -1.0; -1.0, 1.0], &e01).unwrap();
        assert!(ok.is_valid());

        let bad = validate_laplacian(&dmatrix![1.0, 1.0; 1.0, 1.0], &e01).unwrap();
        assert!(!bad.symmetric_nonpositive.pass);
        assert!(!bad.zero_row_sum.pass);
        assert_eq!(bad.zero_row_sum.max_violation, 2.0);

        let l3 = dmatrix![1.0, -1.0, 0.0; -1.0, 2.0, -1.0; 0.0, -1.0, 1.0];
        let r = validate_laplacian(&l3, &e01).unwrap();
        assert!(r.symmetric_nonpositive.pass);
        assert!(!r.sparsity.pass);
        assert_eq!(r.sparsity.max_violation, 1.0);
        assert!(r.zero_row_sum.pass);

        let far = [Edge::new(0, 5).unwrap()];
        assert!(validate_laplacian(&l3, &far).is_err());
    }

    #[test]
    fn components_and_cycle_rank() {
        let tri = WeightedGraph::from_triplets(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 0.0)]).unwrap();
        assert_eq!(tri.connected_components(-1.0), 1);
        assert_eq!(tri.cycle_rank(), 1);
        assert_eq!(tri.connected_components(0.0), 1);
        let g = tri.with_weights(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(g.connected_components(0.0), 2);
    }
}
