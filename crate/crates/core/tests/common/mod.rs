//! Test-only helpers: random problems and independent finite-difference oracles.
#![allow(dead_code)]

use hkc::graph::WeightedGraph;
use hkc::optimizer::{hkc_cost, CouplingData, HkcProblem};
use hkc::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected random graph: a random spanning path plus extra random edges,
/// weights uniform in [0.5, 1.5].
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> WeightedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    let mut all: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|p| !pairs.contains(p))
        .collect();
    all.shuffle(rng);
    let extra = m.saturating_sub(pairs.len()).min(all.len());
    pairs.extend_from_slice(&all[..extra]);
    let triplets: Vec<_> = pairs
        .into_iter()
        .map(|(i, j)| (i, j, rng.random_range(0.5..1.5)))
        .collect();
    WeightedGraph::from_triplets(n, &triplets).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = random_matrix(rng, n, n);
    (&a + a.transpose()) * 0.5
}

pub fn random_times(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..p).map(|_| rng.random_range(0.1..2.0)).collect();
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

pub fn random_problem(rng: &mut ChaCha8Rng, alpha: f64) -> HkcProblem {
    let n1 = rng.random_range(5..=10);
    let n2 = rng.random_range(5..=10);
    let max1 = (n1 * (n1 - 1) / 2).min(20);
    let max2 = (n2 * (n2 - 1) / 2).min(20);
    let m1 = rng.random_range(n1 - 1..=max1);
    let m2 = rng.random_range(n2 - 1..=max2);
    let g1 = random_graph(rng, n1, m1);
    let g2 = random_graph(rng, n2, m2);
    let q = rng.random_range(1..=3);
    let p = rng.random_range(1..=3);
    let f = random_matrix(rng, n1, q);
    let g = random_matrix(rng, n2, q);
    let times = random_times(rng, p);
    HkcProblem::new(g1, g2, CouplingData::new(f, g, times).unwrap(), alpha).unwrap()
}

/// Central finite differences of the total cost, step `h`.
pub fn fd_gradient(prob: &HkcProblem, u1: &[f64], u2: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let cost = |a: &[f64], b: &[f64]| hkc_cost(prob, a, b).unwrap().total;
    let mut g1 = Vec::with_capacity(u1.len());
    for l in 0..u1.len() {
        let (mut p, mut m) = (u1.to_vec(), u1.to_vec());
        p[l] += h;
        m[l] -= h;
        g1.push((cost(&p, u2) - cost(&m, u2)) / (2.0 * h));
    }
    let mut g2 = Vec::with_capacity(u2.len());
    for l in 0..u2.len() {
        let (mut p, mut m) = (u2.to_vec(), u2.to_vec());
        p[l] += h;
        m[l] -= h;
        g2.push((cost(u1, &p) - cost(u1, &m)) / (2.0 * h));
    }
    (g1, g2)
}

/// Worst per-component mismatch: relative where either value is at least
/// `floor` in magnitude, absolute (divided by `floor`) below it. A result
/// `<= rel_tol` means every component passes.
pub fn worst_mismatch(analytic: &[f64], numeric: &[f64], rel_tol: f64, floor: f64) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &b)| {
            let scale = a.abs().max(b.abs());
            if scale < floor {
                (a - b).abs() / floor * rel_tol
            } else {
                (a - b).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Central-difference derivative of `e^{-t(L + hE)}` in `h`.
pub fn fd_heat_derivative(l: &DMatrix<f64>, e: &DMatrix<f64>, t: f64, h: f64) -> DMatrix<f64> {
    let plus = hkc::spectral::matrix_exponential(&((l + e * h) * -t)).unwrap();
    let minus = hkc::spectral::matrix_exponential(&((l - e * h) * -t)).unwrap();
    (plus - minus) / (2.0 * h)
}
