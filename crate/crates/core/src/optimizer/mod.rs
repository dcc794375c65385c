//! Heat kernel coupling: problem definition, objective, gradient and solver.

pub mod coupling;
pub mod objective;
pub mod solver;

use crate::error::{HkcError, Result};
use crate::graph::{laplacian, LaplacianMatrix, WeightedGraph};

pub use coupling::{
    check_times, coupling_residuals, strong_coupling_residual, CouplingData, CouplingResiduals,
    DEFAULT_TIMES,
};
pub use objective::{hkc_cost, hkc_gradient, hkc_gradient_with, CostBreakdown, GradientRoute};
pub use solver::{solve_from, solve_hkc, HkcSolution, SolverConfig, Termination};

/// Coupling weight used when none is given.
pub const DEFAULT_ALPHA: f64 = 1e6;

/// Two graphs, their corresponding functions and the coupling weight.
#[derive(Debug, Clone)]
pub struct HkcProblem {
    pub(crate) g1: WeightedGraph,
    pub(crate) g2: WeightedGraph,
    pub(crate) coupling: CouplingData,
    pub(crate) alpha: f64,
    pub(crate) l1: LaplacianMatrix,
    pub(crate) l2: LaplacianMatrix,
}

impl HkcProblem {
    pub fn new(
        g1: WeightedGraph,
        g2: WeightedGraph,
        coupling: CouplingData,
        alpha: f64,
    ) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(HkcError::InvalidParameter(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        coupling::check_coupling_dims(g1.n(), g2.n(), &coupling)?;
        let l1 = laplacian(&g1);
        let l2 = laplacian(&g2);
        Ok(HkcProblem {
            g1,
            g2,
            coupling,
            alpha,
            l1,
            l2,
        })
    }

    pub fn g1(&self) -> &WeightedGraph {
        &self.g1
    }

    pub fn g2(&self) -> &WeightedGraph {
        &self.g2
    }

    pub fn coupling(&self) -> &CouplingData {
        &self.coupling
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Laplacians of the original graphs.
    pub fn original_laplacians(&self) -> (&LaplacianMatrix, &LaplacianMatrix) {
        (&self.l1, &self.l2)
    }

    /// The mirrored problem with graph 1 and graph 2 exchanged.
    pub fn swapped(&self) -> Self {
        HkcProblem {
            g1: self.g2.clone(),
            g2: self.g1.clone(),
            coupling: self.coupling.swapped(),
            alpha: self.alpha,
            l1: self.l2.clone(),
            l2: self.l1.clone(),
        }
    }
}
