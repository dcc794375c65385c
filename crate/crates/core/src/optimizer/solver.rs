//! Projected gradient descent on the box `u >= 0`.
//!
//! Each iteration takes a Barzilai–Borwein trial step along the negative
//! gradient, projects onto the nonnegative orthant and backtracks by halving
//! until the Armijo condition `f(x⁺) <= f(x) + c ∇f(x)ᵀ(x⁺ - x)` holds. Only
//! accepted iterates enter the cost trajectory, so it never increases.

use log::debug;
use serde::{Deserialize, Serialize};

use super::objective::{evaluate, gradient_at, Evaluation, GradientRoute};
use super::HkcProblem;
use crate::error::{HkcError, Result};

const MIN_STEP: f64 = 1e-20;
const MAX_STEP: f64 = 1e20;

/// Solver settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Stop when the relative cost decrease stays below this for
    /// `patience` consecutive iterations.
    pub tol: f64,
    /// Stop when the projected-gradient max-norm falls below
    /// `gtol * max(1, initial projected-gradient max-norm)`.
    pub gtol: f64,
    pub max_iter: usize,
    pub patience: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo_c: f64,
    pub max_backtracks: usize,
    pub route: GradientRoute,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            gtol: 1e-6,
            max_iter: 2000,
            patience: 3,
            armijo_c: 1e-4,
            max_backtracks: 60,
            route: GradientRoute::Spectral,
        }
    }
}

/// Why the solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    CostStalled,
    GradientSmall,
    MaxIterations,
    LineSearchFailed,
    NumericalBlowup,
}

impl Termination {
    pub fn converged(self) -> bool {
        matches!(self, Termination::CostStalled | Termination::GradientSmall)
    }
}

/// Optimized weights with diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HkcSolution {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    /// Total cost of the initial point followed by every accepted iterate.
    pub cost_trajectory: Vec<f64>,
    pub initial_distance_term: f64,
    pub initial_coupling_term: f64,
    pub final_distance_term: f64,
    pub final_coupling_term: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
}

fn projected_gradient_norm(x: &[f64], g: &[f64]) -> f64 {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| (xi - (xi - gi).max(0.0)).abs())
        .fold(0.0, f64::max)
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Minimizes the HKC objective from the original weights.
pub fn solve_hkc(prob: &HkcProblem, cfg: &SolverConfig) -> Result<HkcSolution> {
    let u1 = prob.g1.weights().to_vec();
    let u2 = prob.g2.weights().to_vec();
    solve_from(prob, cfg, u1, u2)
}

/// Minimizes the HKC objective from a given feasible starting point.
pub fn solve_from(
    prob: &HkcProblem,
    cfg: &SolverConfig,
    u1: Vec<f64>,
    u2: Vec<f64>,
) -> Result<HkcSolution> {
    if cfg.max_backtracks == 0 || !(cfg.armijo_c > 0.0 && cfg.armijo_c < 1.0) {
        return Err(HkcError::InvalidParameter(
            "armijo_c must lie in (0, 1) and max_backtracks must be positive".into(),
        ));
    }
    let m1 = u1.len();
    let split = |x: &[f64]| (x[..m1].to_vec(), x[m1..].to_vec());
    let grad_of = |ev: &Evaluation| -> Result<Vec<f64>> {
        let (mut g1, g2) = gradient_at(prob, ev, cfg.route)?;
        g1.extend(g2);
        Ok(g1)
    };

    let mut x: Vec<f64> = u1.into_iter().chain(u2).collect();
    let (a, b) = split(&x);
    let mut ev = evaluate(prob, &a, &b)?;
    let initial = ev.cost;
    let mut trajectory = vec![ev.cost.total];

    let finish = |x: &[f64],
                  ev: &Evaluation,
                  trajectory: Vec<f64>,
                  iterations: usize,
                  termination: Termination| {
        let (u1, u2) = split(x);
        HkcSolution {
            u1,
            u2,
            cost_trajectory: trajectory,
            initial_distance_term: initial.distance,
            initial_coupling_term: initial.coupling,
            final_distance_term: ev.cost.distance,
            final_coupling_term: ev.cost.coupling,
            iterations,
            converged: termination.converged(),
            termination,
        }
    };

    let blowup = |x: &[f64], ev: &Evaluation, trajectory: Vec<f64>, iteration: usize| {
        HkcError::NumericalBlowup {
            iteration,
            partial: Box::new(finish(x, ev, trajectory, iteration, Termination::NumericalBlowup)),
        }
    };

    let mut g = grad_of(&ev)?;
    if !ev.cost.total.is_finite() || !all_finite(&g) {
        return Err(blowup(&x, &ev, trajectory, 0));
    }
    let pg0 = projected_gradient_norm(&x, &g);
    let gtol_abs = cfg.gtol * pg0.max(1.0);

    let x_scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let mut step = if pg0 > 0.0 { x_scale / pg0 } else { 1.0 };
    let mut stalled = 0;

    for iter in 0..cfg.max_iter {
        let pg = projected_gradient_norm(&x, &g);
        if pg <= gtol_abs {
            return Ok(finish(&x, &ev, trajectory, iter, Termination::GradientSmall));
        }

        let f0 = ev.cost.total;
        let mut s = step.clamp(MIN_STEP, MAX_STEP);
        let mut accepted = None;
        for _ in 0..cfg.max_backtracks {
            let cand: Vec<f64> = x
                .iter()
                .zip(&g)
                .map(|(&xi, &gi)| (xi - s * gi).max(0.0))
                .collect();
            let decrease: f64 = cand
                .iter()
                .zip(&x)
                .zip(&g)
                .map(|((&c, &xi), &gi)| gi * (c - xi))
                .sum();
            if decrease >= 0.0 {
                // projection killed every descent component at this step
                s *= 0.5;
                continue;
            }
            let (a, b) = split(&cand);
            let cand_ev = evaluate(prob, &a, &b)?;
            let fc = cand_ev.cost.total;
            if !fc.is_finite() {
                s *= 0.5;
                continue;
            }
            if fc <= f0 + cfg.armijo_c * decrease {
                accepted = Some((cand, cand_ev));
                break;
            }
            s *= 0.5;
        }

        let Some((x_new, ev_new)) = accepted else {
            return Ok(finish(&x, &ev, trajectory, iter, Termination::LineSearchFailed));
        };
        let g_new = grad_of(&ev_new)?;
        if !all_finite(&g_new) {
            trajectory.push(ev_new.cost.total);
            return Err(blowup(&x_new, &ev_new, trajectory, iter + 1));
        }

        // Barzilai–Borwein step for the next trial
        let (mut ss, mut sy) = (0.0, 0.0);
        for i in 0..x.len() {
            let di = x_new[i] - x[i];
            ss += di * di;
            sy += di * (g_new[i] - g[i]);
        }
        step = if sy > 0.0 { ss / sy } else { s * 2.0 };

        let f1 = ev_new.cost.total;
        let rel = (f0 - f1) / f0.abs().max(f64::MIN_POSITIVE);
        x = x_new;
        ev = ev_new;
        g = g_new;
        trajectory.push(f1);
        debug!("iter {iter}: cost {f1:.6e} step {s:.3e} rel {rel:.3e}");

        if rel < cfg.tol {
            stalled += 1;
            if stalled >= cfg.patience.max(1) {
                return Ok(finish(&x, &ev, trajectory, iter + 1, Termination::CostStalled));
            }
        } else {
            stalled = 0;
        }
    }
    Ok(finish(&x, &ev, trajectory, cfg.max_iter, Termination::MaxIterations))
}
