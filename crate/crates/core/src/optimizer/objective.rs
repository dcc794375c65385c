//! The HKC objective over edge weights and its analytic gradient.
//!
//! cost(u1, u2) = Σ_k ‖L(u_k) - L_k‖²_F + α Σ_m ‖Fᵀ e^{-t_m L(u1)} F - Gᵀ e^{-t_m L(u2)} G‖²_F
//!
//! The coupling gradient for edge `(i, j)` of graph `k` at time `t_m` is
//! `2 tr(X R Xᵀ Ĥ)`, where `X` is `F` or `G`, `R` the signed residual and `Ĥ`
//! the Fréchet derivative of the heat kernel along the edge direction
//! `E_ij = (e_i - e_j)(e_i - e_j)ᵀ`. Two routes compute it:
//!
//! * [`GradientRoute::BlockExponential`] forms `Ĥ` for every edge from the
//!   upper-right block of a `2n x 2n` exponential. Cost `O(m p (2n)³)`.
//! * [`GradientRoute::Spectral`] moves the derivative onto `M = X R Xᵀ`
//!   instead: `tr(M Ĥ) = ⟨K, E_ij⟩` with `K = Φ (Γ ∘ ΦᵀMΦ) Φᵀ`, so one
//!   `O(n³)` product per time sample serves all edges.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coupling::residuals_from_decompositions;
use super::HkcProblem;
use crate::error::Result;
use crate::graph::{frobenius_sq, laplacian_from_weights, Edge, LaplacianMatrix};
use crate::spectral::{
    eigendecompose, frechet_block, heat_divided_differences, sandwich_hadamard,
    SpectralDecomposition,
};

/// How the coupling-term gradient is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GradientRoute {
    /// Per-edge block-matrix exponential.
    BlockExponential,
    /// Eigenbasis adjoint with divided differences.
    #[default]
    Spectral,
}

/// Cost split into its two summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub distance: f64,
    pub coupling: f64,
    pub total: f64,
}

/// Everything computed at one point `(u1, u2)`, shared by cost and gradient.
pub(crate) struct Evaluation {
    pub laplacians: [LaplacianMatrix; 2],
    pub decs: [SpectralDecomposition; 2],
    pub residuals: Vec<DMatrix<f64>>,
    pub cost: CostBreakdown,
}

pub(crate) fn evaluate(prob: &HkcProblem, u1: &[f64], u2: &[f64]) -> Result<Evaluation> {
    let lt1 = laplacian_from_weights(prob.g1.edges(), prob.g1.n(), u1)?;
    let lt2 = laplacian_from_weights(prob.g2.edges(), prob.g2.n(), u2)?;
    let distance = frobenius_sq(&(lt1.as_matrix() - prob.l1.as_matrix()))
        + frobenius_sq(&(lt2.as_matrix() - prob.l2.as_matrix()));
    let dec1 = eigendecompose(&lt1)?;
    let dec2 = eigendecompose(&lt2)?;
    let res = residuals_from_decompositions(&dec1, &dec2, &prob.coupling)?;
    let cost = CostBreakdown {
        distance,
        coupling: res.total,
        total: distance + prob.alpha * res.total,
    };
    Ok(Evaluation {
        laplacians: [lt1, lt2],
        decs: [dec1, dec2],
        residuals: res.residuals,
        cost,
    })
}

/// Objective value and its two terms at `(u1, u2)`.
pub fn hkc_cost(prob: &HkcProblem, u1: &[f64], u2: &[f64]) -> Result<CostBreakdown> {
    Ok(evaluate(prob, u1, u2)?.cost)
}

/// Gradient with respect to `u1` and `u2` via the block-exponential route.
pub fn hkc_gradient(prob: &HkcProblem, u1: &[f64], u2: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    hkc_gradient_with(prob, u1, u2, GradientRoute::BlockExponential)
}

/// Gradient with an explicit choice of coupling-term route.
pub fn hkc_gradient_with(
    prob: &HkcProblem,
    u1: &[f64],
    u2: &[f64],
    route: GradientRoute,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let ev = evaluate(prob, u1, u2)?;
    gradient_at(prob, &ev, route)
}

pub(crate) fn gradient_at(
    prob: &HkcProblem,
    ev: &Evaluation,
    route: GradientRoute,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut grads = [
        distance_gradient(prob.g1.edges(), &ev.laplacians[0], &prob.l1),
        distance_gradient(prob.g2.edges(), &ev.laplacians[1], &prob.l2),
    ];
    let funcs = [prob.coupling.f(), prob.coupling.g()];
    let edges = [prob.g1.edges(), prob.g2.edges()];
    let times = prob.coupling.times();

    for k in 0..2 {
        let sign = if k == 0 { 1.0 } else { -1.0 };
        // M_m = X R_m Xᵀ, scaled by 2α and the graph's sign
        let ms: Vec<DMatrix<f64>> = ev
            .residuals
            .iter()
            .map(|r| funcs[k] * r * funcs[k].transpose() * (2.0 * prob.alpha * sign))
            .collect();
        let coupling = match route {
            GradientRoute::BlockExponential => {
                block_route(edges[k], &ev.laplacians[k], &ms, times)?
            }
            GradientRoute::Spectral => spectral_route(edges[k], &ev.decs[k], &ms, times),
        };
        for (g, c) in grads[k].iter_mut().zip(coupling) {
            *g += c;
        }
    }
    let [g1, g2] = grads;
    Ok((g1, g2))
}

/// `2 (Δ_ii + Δ_jj - 2 Δ_ij)` with `Δ = L(u) - L`: the edge-wise form of
/// `2 (O + Oᵀ - 2Δ)_ij`, where `O` repeats `diag(Δ)` in every column.
fn distance_gradient(edges: &[Edge], current: &LaplacianMatrix, original: &LaplacianMatrix) -> Vec<f64> {
    let delta = current.as_matrix() - original.as_matrix();
    edges
        .iter()
        .map(|e| 2.0 * (delta[(e.i, e.i)] + delta[(e.j, e.j)] - 2.0 * delta[(e.i, e.j)]))
        .collect()
}

pub(crate) fn edge_direction(n: usize, e: &Edge) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    d[(e.i, e.i)] = 1.0;
    d[(e.j, e.j)] = 1.0;
    d[(e.i, e.j)] = -1.0;
    d[(e.j, e.i)] = -1.0;
    d
}

fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    // tr(A B) = Σ_ab A_ab B_ba
    a.component_mul(&b.transpose()).sum()
}

fn block_route(
    edges: &[Edge],
    l: &LaplacianMatrix,
    ms: &[DMatrix<f64>],
    times: &[f64],
) -> Result<Vec<f64>> {
    let n = l.n();
    edges
        .par_iter()
        .map(|e| {
            let dir = edge_direction(n, e);
            let mut acc = 0.0;
            for (m, &t) in ms.iter().zip(times) {
                let h_hat = frechet_block(l.as_matrix(), &dir, t)?;
                acc += trace_product(m, &h_hat);
            }
            Ok(acc)
        })
        .collect()
}

fn spectral_route(
    edges: &[Edge],
    dec: &SpectralDecomposition,
    ms: &[DMatrix<f64>],
    times: &[f64],
) -> Vec<f64> {
    let n = dec.n();
    let mut k_sum = DMatrix::zeros(n, n);
    for (m, &t) in ms.iter().zip(times) {
        let gamma = heat_divided_differences(dec, t);
        k_sum += sandwich_hadamard(dec, m, &gamma);
    }
    edges
        .iter()
        .map(|e| k_sum[(e.i, e.i)] + k_sum[(e.j, e.j)] - k_sum[(e.i, e.j)] - k_sum[(e.j, e.i)])
        .collect()
}
