//! Heat kernel coupling (HKC) on weighted graphs.
//!
//! Two graphs of possibly different size are modified, over their fixed edge
//! sets, as little as possible so that their heat kernels agree when projected
//! onto a handful of corresponding functions. The crate also ships the
//! spectral primitives this needs (heat kernels, diffusion distances, the
//! matrix exponential and its Fréchet derivative), the Laplacian-averaging
//! baseline, synthetic generators and a leave-one-out retrieval harness.
//!
//! All matrices are dense `nalgebra::DMatrix<f64>`; the target scale is a few
//! hundred vertices.

pub mod baselines;
pub mod data_gen;
pub mod error;
pub mod graph;
pub mod io;
pub mod optimizer;
pub mod retrieval;
pub mod spectral;

pub use error::{HkcError, Result};
pub use graph::{Edge, LaplacianMatrix, ValidityReport, WeightedGraph};
pub use optimizer::{
    CouplingData, GradientRoute, HkcProblem, HkcSolution, SolverConfig, Termination,
};
pub use spectral::{HeatKernelMatrix, SpectralDecomposition};

pub use nalgebra::{DMatrix, DVector};
