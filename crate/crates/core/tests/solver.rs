mod common;

use common::*;
use hkc::graph::{laplacian, laplacian_from_weights, validate_laplacian};
use hkc::optimizer::{
    hkc_cost, solve_from, solve_hkc, strong_coupling_residual, CouplingData, HkcProblem, SolverConfig, Termination,
};
use hkc::{DMatrix, DVector, HkcError};
use rand::Rng;

fn quick() -> SolverConfig {
    SolverConfig {
        max_iter: 300,
        ..Default::default()
    }
}

#[test]
fn solutions_keep_their_invariants() {
    let mut r = rng(17);
    for k in 0..8 {
        let alpha = [1.0, 1e3, 1e6][k % 3];
        let prob = random_problem(&mut r, alpha);
        let sol = solve_hkc(&prob, &quick()).unwrap();

        assert!(sol.u1.iter().chain(&sol.u2).all(|&w| w >= 0.0 && w.is_finite()));
        assert_eq!(sol.u1.len(), prob.g1().num_edges());
        assert_eq!(sol.u2.len(), prob.g2().num_edges());
        assert_eq!(sol.cost_trajectory.len(), sol.iterations + 1);
        assert!(sol.cost_trajectory.windows(2).all(|w| w[1] <= w[0]), "problem {k} trajectory rises");
        assert_eq!(sol.converged, sol.termination.converged());

        let c = hkc_cost(&prob, &sol.u1, &sol.u2).unwrap();
        assert!((c.total - sol.cost_trajectory.last().unwrap()).abs() <= 1e-12 * c.total.max(1.0));
        assert!((c.distance - sol.final_distance_term).abs() <= 1e-12 * c.total.max(1.0));
        assert!((c.coupling - sol.final_coupling_term).abs() <= 1e-12 * c.total.max(1.0));
        assert_eq!(sol.initial_distance_term, 0.0);

        for (g, u) in [(prob.g1(), &sol.u1), (prob.g2(), &sol.u2)] {
            let l = laplacian_from_weights(g.edges(), g.n(), u).unwrap();
            assert!(validate_laplacian(l.as_matrix(), g.edges()).unwrap().is_valid());
        }
    }
}

#[test]
fn identical_graphs_need_no_iterations() {
    let mut r = rng(3);
    let g = random_graph(&mut r, 7, 12);
    let f = random_matrix(&mut r, 7, 2);
    let c = CouplingData::new(f.clone(), f, vec![0.5, 1.0]).unwrap();
    let prob = HkcProblem::new(g.clone(), g.clone(), c, 1e6).unwrap();
    let sol = solve_hkc(&prob, &SolverConfig::default()).unwrap();
    assert_eq!(sol.iterations, 0);
    assert_eq!(sol.termination, Termination::GradientSmall);
    assert_eq!(sol.u1, g.weights());
    assert_eq!(sol.u2, g.weights());
    assert_eq!(sol.cost_trajectory, vec![0.0]);
}

#[test]
fn swapping_the_graphs_swaps_the_solution() {
    let mut r = rng(8);
    let short = SolverConfig {
        max_iter: 5,
        ..Default::default()
    };
    for _ in 0..4 {
        let prob = random_problem(&mut r, 1e3);
        let swapped = prob.swapped();
        let (u1, u2) = (prob.g1().weights().to_vec(), prob.g2().weights().to_vec());
        let (g1, g2) = hkc::optimizer::hkc_gradient(&prob, &u1, &u2).unwrap();
        let (h2, h1) = hkc::optimizer::hkc_gradient(&swapped, &u2, &u1).unwrap();
        for (a, b) in g1.iter().chain(&g2).zip(h1.iter().chain(&h2)) {
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }

        let a = solve_hkc(&prob, &short).unwrap();
        let b = solve_hkc(&swapped, &short).unwrap();
        let scale = a.u1.iter().chain(&a.u2).fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.u1.iter().zip(&b.u2).chain(a.u2.iter().zip(&b.u1)) {
            assert!((x - y).abs() <= 1e-8 * scale, "{x} vs {y}");
        }
    }
}

#[test]
fn full_basis_coupling_shrinks_strong_residual() {
    let mut r = rng(21);
    let n = 6;
    let g1 = random_graph(&mut r, n, 9);
    let w2: Vec<f64> = g1.weights().iter().map(|_| r.random_range(0.5..1.5)).collect();
    let g2 = g1.with_weights(w2).unwrap();
    let id = DMatrix::identity(n, n);
    let c = CouplingData::new(id.clone(), id.clone(), vec![0.5, 1.0, 2.0]).unwrap();
    let prob = HkcProblem::new(g1.clone(), g2.clone(), c, 1e4).unwrap();
    let sol = solve_hkc(&prob, &SolverConfig::default()).unwrap();
    let l1 = laplacian_from_weights(g1.edges(), n, &sol.u1).unwrap();
    let l2 = laplacian_from_weights(g2.edges(), n, &sol.u2).unwrap();
    for v in 0..n {
        let f = DVector::from_fn(n, |i, _| if i == v { 1.0 } else { 0.0 });
        let before = strong_coupling_residual(&id, &laplacian(&g1), &laplacian(&g2), &f, 1.0).unwrap();
        let after = strong_coupling_residual(&id, &l1, &l2, &f, 1.0).unwrap();
        assert!(after < 0.1 * before, "vertex {v}: {before:e} -> {after:e}");
    }
}

#[test]
fn zero_start_is_feasible_and_moves() {
    let mut r = rng(4);
    let prob = random_problem(&mut r, 1.0);
    let z1 = vec![0.0; prob.g1().num_edges()];
    let z2 = vec![0.0; prob.g2().num_edges()];
    let sol = solve_from(&prob, &quick(), z1, z2).unwrap();
    assert!(sol.cost_trajectory.last().unwrap() < &sol.cost_trajectory[0]);
    assert!(sol.u1.iter().chain(&sol.u2).all(|&w| w >= 0.0));
}

#[test]
fn bad_settings_are_rejected() {
    let mut r = rng(1);
    let prob = random_problem(&mut r, 1.0);
    let cfg = SolverConfig {
        armijo_c: 1.5,
        ..Default::default()
    };
    assert!(matches!(solve_hkc(&prob, &cfg), Err(HkcError::InvalidParameter(_))));
    let g = prob.g1().clone();
    let c = prob.coupling().clone();
    assert!(HkcProblem::new(g.clone(), prob.g2().clone(), c.clone(), 0.0).is_err());
    let bigger = random_graph(&mut r, g.n() + 1, g.n() + 2);
    assert!(matches!(
        HkcProblem::new(bigger, prob.g2().clone(), c, 1.0),
        Err(HkcError::DimensionMismatch(_))
    ));
}

#[test]
fn max_iterations_is_reported() {
    let mut r = rng(12);
    let prob = random_problem(&mut r, 1e6);
    let cfg = SolverConfig {
        max_iter: 3,
        tol: 0.0,
        gtol: 0.0,
        ..Default::default()
    };
    let sol = solve_hkc(&prob, &cfg).unwrap();
    assert_eq!(sol.termination, Termination::MaxIterations);
    assert!(!sol.converged);
    assert_eq!(sol.iterations, 3);
}
