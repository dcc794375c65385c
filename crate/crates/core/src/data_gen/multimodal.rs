use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use super::knn::PointCloud;
use super::rng;
use crate::error::{HkcError, Result};

/// Settings for [`gen_multimodal`].
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodalConfig {
    pub n: usize,
    pub classes: usize,
    pub dim: usize,
    /// Distance between class centers along their own axes.
    pub separation: f64,
    /// Center offset of the ambiguous class from its partner.
    pub ambiguity: f64,
    /// Per-coordinate standard deviation of the within-class noise.
    pub noise: f64,
}

impl Default for MultimodalConfig {
    fn default() -> Self {
        MultimodalConfig {
            n: 120,
            classes: 4,
            dim: 8,
            separation: 4.0,
            ambiguity: 1.0,
            noise: 1.0,
        }
    }
}

/// Two feature modalities over the same labeled items.
#[derive(Debug, Clone)]
pub struct MultimodalDataset {
    pub modality1: PointCloud,
    pub modality2: PointCloud,
    pub labels: Vec<usize>,
    /// Class pair that overlaps in modality 1 and 2 respectively.
    pub ambiguous_pairs: [(usize, usize); 2],
}

/// Gaussian class clusters in two modalities. Item `i` has class
/// `i % classes`. Class `c` is centered at `separation * e_c`, except that in
/// modality 1 class 1 sits at `ambiguity` from class 0, and in modality 2 class
/// 3 sits at `ambiguity` from class 2. Each modality thus confuses one pair
/// that the other separates.
pub fn gen_multimodal(cfg: &MultimodalConfig, seed: u64) -> Result<MultimodalDataset> {
    if cfg.classes < 4 || cfg.dim < cfg.classes + 1 || cfg.n < 2 * cfg.classes {
        return Err(HkcError::InvalidParameter(format!(
            "need classes >= 4, dim > classes and n >= 2 * classes (got {cfg:?})"
        )));
    }
    let mut rng = rng(seed);
    let labels: Vec<usize> = (0..cfg.n).map(|i| i % cfg.classes).collect();
    let spare_axis = cfg.classes;

    let center = |modality: usize, class: usize| -> Vec<f64> {
        let mut c = vec![0.0; cfg.dim];
        let (anchor, moved) = if modality == 0 { (0, 1) } else { (2, 3) };
        if class == moved {
            c[anchor] = cfg.separation;
            c[spare_axis] = cfg.ambiguity;
        } else {
            c[class] = cfg.separation;
        }
        c
    };

    let mut clouds = Vec::with_capacity(2);
    for modality in 0..2 {
        let mut pts = DMatrix::zeros(cfg.n, cfg.dim);
        for (i, &cls) in labels.iter().enumerate() {
            let c = center(modality, cls);
            for d in 0..cfg.dim {
                let z: f64 = StandardNormal.sample(&mut rng);
                pts[(i, d)] = c[d] + cfg.noise * z;
            }
        }
        clouds.push(PointCloud::new(pts, Some(labels.clone()))?);
    }
    let modality2 = clouds.pop().expect("two modalities");
    let modality1 = clouds.pop().expect("two modalities");
    Ok(MultimodalDataset {
        modality1,
        modality2,
        labels,
        ambiguous_pairs: [(0, 1), (2, 3)],
    })
}
