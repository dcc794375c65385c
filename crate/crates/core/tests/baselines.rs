mod common;

use common::*;
use hkc::baselines::{average_laplacian, union_edges};
use hkc::graph::{frobenius_sq, laplacian, laplacian_from_weights, validate_laplacian, WeightedGraph};
use hkc::DMatrix;
use rand::Rng;

fn averaging_objective(l: &DMatrix<f64>, l1: &DMatrix<f64>, l2: &DMatrix<f64>) -> f64 {
    frobenius_sq(&(l - l1)) + frobenius_sq(&(l - l2))
}

#[test]
fn average_beats_random_valid_laplacians() {
    let mut r = rng(5);
    for pair in 0..20 {
        let n = r.random_range(4..=10);
        let max = n * (n - 1) / 2;
        let (m1, m2) = (r.random_range(n - 1..=max), r.random_range(n - 1..=max));
        let g1 = random_graph(&mut r, n, m1);
        let g2 = random_graph(&mut r, n, m2);
        let (l1, l2) = (laplacian(&g1).into_inner(), laplacian(&g2).into_inner());
        let avg = average_laplacian(&g1, &g2).unwrap();
        let la = laplacian(&avg).into_inner();
        assert!(validate_laplacian(&la, avg.edges()).unwrap().is_valid());
        let best = averaging_objective(&la, &l1, &l2);
        // closed form of the minimum: ‖L1 - L2‖² / 2
        assert!((best - 0.5 * frobenius_sq(&(&l1 - &l2))).abs() <= 1e-12 * (1.0 + best));

        let union = union_edges(g1.edges(), g2.edges());
        for trial in 0..200 {
            // half fully random on the union support, half near the average
            let u: Vec<f64> = if trial % 2 == 0 {
                (0..union.len()).map(|_| r.random_range(0.0..2.0)).collect()
            } else {
                union
                    .iter()
                    .map(|e| {
                        let k = avg.edge_index(e.i, e.j).unwrap();
                        (avg.weights()[k] + r.random_range(-0.05..0.05)).max(0.0)
                    })
                    .collect()
            };
            let l = laplacian_from_weights(&union, n, &u).unwrap().into_inner();
            assert!(
                averaging_objective(&l, &l1, &l2) >= best,
                "pair {pair} trial {trial} beats the average"
            );
        }
    }
}

#[test]
fn missing_edges_count_as_zero() {
    let g1 = WeightedGraph::from_triplets(3, &[(0, 1, 2.0)]).unwrap();
    let g2 = WeightedGraph::from_triplets(3, &[(1, 2, 4.0)]).unwrap();
    let avg = average_laplacian(&g1, &g2).unwrap();
    assert_eq!(avg.num_edges(), 2);
    assert_eq!(avg.weights(), &[1.0, 2.0]);
}

#[test]
fn mismatched_sizes_are_rejected() {
    let g1 = WeightedGraph::from_triplets(3, &[(0, 1, 1.0)]).unwrap();
    let g2 = WeightedGraph::from_triplets(4, &[(0, 1, 1.0)]).unwrap();
    assert!(average_laplacian(&g1, &g2).is_err());
}
