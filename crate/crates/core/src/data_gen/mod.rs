//! Synthetic experiment graphs and corresponding-function construction.
//!
//! Every generator is deterministic for a given seed (ChaCha8 stream).

mod circles;
mod functions;
mod knn;
mod multimodal;
mod ring;

pub use circles::{gen_circles, CirclesPair, CIRCLES_TIMES, DEFAULT_N_PER_RING};
pub use functions::{class_indicator_functions, landmark_coupling_functions, landmark_functions};
pub use knn::{knn_gaussian_graph, Bandwidth, PointCloud};
pub use multimodal::{gen_multimodal, MultimodalConfig, MultimodalDataset};
pub use ring::{gen_ring_pair, RingPair, RING_TIMES};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Permutation matrix (n2 x n1) with `T[corr[v], v] = 1`.
pub fn correspondence_matrix(corr: &[usize], n2: usize) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(n2, corr.len());
    for (v, &w) in corr.iter().enumerate() {
        t[(w, v)] = 1.0;
    }
    t
}
