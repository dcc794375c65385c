use nalgebra::DMatrix;

use crate::error::{HkcError, Result};
use crate::graph::{laplacian, WeightedGraph};
use crate::optimizer::CouplingData;
use crate::spectral::{eigendecompose, heat_kernel};

/// Heat bumps `e^{-sL} δ_v` at the given vertices, one column each. With
/// `smoothing_t = 0` the columns are indicators.
pub fn landmark_functions(g: &WeightedGraph, vertices: &[usize], smoothing_t: f64) -> Result<DMatrix<f64>> {
    if let Some(&v) = vertices.iter().find(|&&v| v >= g.n()) {
        return Err(HkcError::OutOfRange { index: v, size: g.n() });
    }
    if !smoothing_t.is_finite() || smoothing_t < 0.0 {
        return Err(HkcError::InvalidTime(smoothing_t));
    }
    let mut f = DMatrix::zeros(g.n(), vertices.len());
    if smoothing_t == 0.0 {
        for (c, &v) in vertices.iter().enumerate() {
            f[(v, c)] = 1.0;
        }
        return Ok(f);
    }
    let h = heat_kernel(&eigendecompose(&laplacian(g))?, smoothing_t)?;
    for (c, &v) in vertices.iter().enumerate() {
        f.set_column(c, &h.matrix().column(v));
    }
    Ok(f)
}

/// Corresponding functions from landmark pairs `(v1, v2)`: column `j` of `F`
/// is a heat bump at `v1_j` on graph 1, column `j` of `G` the bump at `v2_j`
/// on graph 2.
pub fn landmark_coupling_functions(
    g1: &WeightedGraph,
    g2: &WeightedGraph,
    pairs: &[(usize, usize)],
    smoothing_t: f64,
    times: Vec<f64>,
) -> Result<CouplingData> {
    let (a, b): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
    let f = landmark_functions(g1, &a, smoothing_t)?;
    let g = landmark_functions(g2, &b, smoothing_t)?;
    CouplingData::new(f, g, times)
}

/// One indicator column per class, scaled to unit mass when `normalize`.
/// Both label vectors must use the same class ids; the classes are the
/// sorted union of ids present.
pub fn class_indicator_functions(
    labels1: &[usize],
    labels2: &[usize],
    normalize: bool,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut classes: Vec<usize> = labels1.iter().chain(labels2).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let build = |labels: &[usize]| {
        let mut m = DMatrix::zeros(labels.len(), classes.len());
        for (c, cls) in classes.iter().enumerate() {
            let count = labels.iter().filter(|&&l| l == *cls).count();
            let value = if normalize && count > 0 { 1.0 / count as f64 } else { 1.0 };
            for (v, l) in labels.iter().enumerate() {
                if l == cls {
                    m[(v, c)] = value;
                }
            }
        }
        m
    };
    (build(labels1), build(labels2))
}
