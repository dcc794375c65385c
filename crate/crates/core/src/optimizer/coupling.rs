//! Corresponding functions and coupling residual diagnostics.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{HkcError, Result};
use crate::graph::{frobenius_sq, LaplacianMatrix};
use crate::spectral::{eigendecompose, heat_kernel, SpectralDecomposition};

/// Time samples used when none are given.
pub const DEFAULT_TIMES: [f64; 3] = [0.5, 1.0, 2.0];

/// Corresponding function matrices `F` (n1 x q), `G` (n2 x q) and the time
/// samples at which the projected heat kernels are compared.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingData {
    f: DMatrix<f64>,
    g: DMatrix<f64>,
    times: Vec<f64>,
}

impl CouplingData {
    pub fn new(f: DMatrix<f64>, g: DMatrix<f64>, times: Vec<f64>) -> Result<Self> {
        if f.ncols() != g.ncols() {
            return Err(HkcError::InvalidCoupling(format!(
                "F has {} columns, G has {}",
                f.ncols(),
                g.ncols()
            )));
        }
        if f.ncols() == 0 {
            return Err(HkcError::InvalidCoupling(
                "at least one corresponding function is required".into(),
            ));
        }
        if f.iter().chain(g.iter()).any(|v| !v.is_finite()) {
            return Err(HkcError::InvalidCoupling("non-finite function values".into()));
        }
        let all_constant = f.column_iter().all(|c| {
            let first = c[0];
            c.iter().all(|&v| v == first)
        });
        if all_constant {
            return Err(HkcError::InvalidCoupling(
                "every column of F is constant; the coupling term carries no information".into(),
            ));
        }
        check_times(&times)?;
        Ok(CouplingData { f, g, times })
    }

    pub fn f(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of corresponding function pairs.
    pub fn q(&self) -> usize {
        self.f.ncols()
    }

    /// Same functions, different time samples.
    pub fn with_times(&self, times: Vec<f64>) -> Result<Self> {
        check_times(&times)?;
        Ok(CouplingData {
            f: self.f.clone(),
            g: self.g.clone(),
            times,
        })
    }

    /// Swaps the roles of the two graphs.
    pub fn swapped(&self) -> Self {
        CouplingData {
            f: self.g.clone(),
            g: self.f.clone(),
            times: self.times.clone(),
        }
    }
}

/// Rejects empty, non-positive, non-finite or non-increasing time samples.
pub fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(HkcError::InvalidCoupling("no time samples".into()));
    }
    for (k, &t) in times.iter().enumerate() {
        if !t.is_finite() || t <= 0.0 {
            return Err(HkcError::InvalidTime(t));
        }
        if k > 0 && times[k - 1] >= t {
            return Err(HkcError::InvalidCoupling(format!(
                "time samples must be strictly increasing ({} then {t})",
                times[k - 1]
            )));
        }
    }
    Ok(())
}

/// Per-time residual matrices `Fᵀ e^{-tL1} F - Gᵀ e^{-tL2} G` and the sum of
/// their squared Frobenius norms.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingResiduals {
    #[serde(skip)]
    pub residuals: Vec<DMatrix<f64>>,
    pub per_time: Vec<f64>,
    pub total: f64,
}

pub(crate) fn residuals_from_decompositions(
    dec1: &SpectralDecomposition,
    dec2: &SpectralDecomposition,
    c: &CouplingData,
) -> Result<CouplingResiduals> {
    let mut residuals = Vec::with_capacity(c.times.len());
    let mut per_time = Vec::with_capacity(c.times.len());
    for &t in &c.times {
        let h1 = heat_kernel(dec1, t)?;
        let h2 = heat_kernel(dec2, t)?;
        let r = c.f.transpose() * h1.matrix() * &c.f - c.g.transpose() * h2.matrix() * &c.g;
        let r = (&r + r.transpose()) * 0.5;
        per_time.push(frobenius_sq(&r));
        residuals.push(r);
    }
    let total = per_time.iter().sum();
    Ok(CouplingResiduals {
        residuals,
        per_time,
        total,
    })
}

pub(crate) fn check_coupling_dims(n1: usize, n2: usize, c: &CouplingData) -> Result<()> {
    if c.f.nrows() != n1 || c.g.nrows() != n2 {
        return Err(HkcError::DimensionMismatch(format!(
            "F is {}x{} for {n1} vertices, G is {}x{} for {n2} vertices",
            c.f.nrows(),
            c.f.ncols(),
            c.g.nrows(),
            c.g.ncols()
        )));
    }
    Ok(())
}

/// Weak-coupling residuals of two Laplacians.
pub fn coupling_residuals(
    l1: &LaplacianMatrix,
    l2: &LaplacianMatrix,
    c: &CouplingData,
) -> Result<CouplingResiduals> {
    check_coupling_dims(l1.n(), l2.n(), c)?;
    residuals_from_decompositions(&eigendecompose(l1)?, &eigendecompose(l2)?, c)
}

/// `‖T e^{-tL1} f - e^{-tL2} T f‖₂` for a known correspondence `T` (n2 x n1).
pub fn strong_coupling_residual(
    t_map: &DMatrix<f64>,
    l1: &LaplacianMatrix,
    l2: &LaplacianMatrix,
    f: &DVector<f64>,
    t: f64,
) -> Result<f64> {
    let (n1, n2) = (l1.n(), l2.n());
    if t_map.shape() != (n2, n1) || f.len() != n1 {
        return Err(HkcError::DimensionMismatch(format!(
            "T is {}x{}, f has length {}, graphs have {n1} and {n2} vertices",
            t_map.nrows(),
            t_map.ncols(),
            f.len()
        )));
    }
    let h1 = heat_kernel(&eigendecompose(l1)?, t)?;
    let h2 = heat_kernel(&eigendecompose(l2)?, t)?;
    let lhs = t_map * (h1.matrix() * f);
    let rhs = h2.matrix() * (t_map * f);
    Ok((lhs - rhs).norm())
}
