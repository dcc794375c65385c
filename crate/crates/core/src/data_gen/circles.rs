use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use super::rng;
use crate::error::{HkcError, Result};
use crate::graph::{Edge, WeightedGraph};

pub const DEFAULT_N_PER_RING: usize = 32;
/// Kernel times for the circles experiment; heat must travel a quarter ring
/// between landmarks.
pub const CIRCLES_TIMES: [f64; 4] = [5.0, 10.0, 20.0, 40.0];

const OUTER_RADIUS: f64 = 1.0;
const INNER_RADIUS: f64 = 0.55;
const INNER_OFFSET: f64 = 0.25;
const ANGLE_JITTER: f64 = 0.15;
const SIGMA_SCALE: f64 = 2.0;
const BRIDGE_RATIO: f64 = 0.3;

/// Two graphs on the same pair of eccentric rings, differing only in where
/// the ring-to-ring bridge edges sit.
#[derive(Debug, Clone)]
pub struct CirclesPair {
    pub g1: WeightedGraph,
    pub g2: WeightedGraph,
    /// Ground truth: vertex `v` of graph 1 is vertex `correspondence[v]` of graph 2.
    pub correspondence: Vec<usize>,
    /// 2-D coordinates, one row per vertex.
    pub points: DMatrix<f64>,
    pub bridges1: Vec<Edge>,
    pub bridges2: Vec<Edge>,
    /// Suggested landmark vertices (the same vertex ids in both graphs).
    pub landmarks: Vec<usize>,
}

/// Vertices `0..n` form the outer ring and `n..2n` the inner ring, shifted off
/// center. Each ring is a cycle with Gaussian weights of the chord lengths
/// (bandwidth twice the mean chord, so weights sit near 0.8). Each graph gets
/// `bridge_edges` weak bridges (0.3 of the mean ring weight) from distinct
/// inner vertices to their nearest outer vertex. Bridge sites of the two
/// graphs never coincide and keep two steps clear of the landmarks.
pub fn gen_circles(n_per_ring: usize, bridge_edges: usize, seed: u64) -> Result<CirclesPair> {
    if n_per_ring < 8 {
        return Err(HkcError::InvalidParameter(format!(
            "n_per_ring = {n_per_ring} must be at least 8"
        )));
    }
    if 2 * bridge_edges > n_per_ring / 2 {
        return Err(HkcError::InvalidParameter(format!(
            "{bridge_edges} bridges per graph do not fit on a ring of {n_per_ring}"
        )));
    }
    let n = n_per_ring;
    let mut rng = rng(seed);
    let step = 2.0 * PI / n as f64;

    let mut points = DMatrix::zeros(2 * n, 2);
    for ring in 0..2 {
        let (radius, cx) = if ring == 0 {
            (OUTER_RADIUS, 0.0)
        } else {
            (INNER_RADIUS, INNER_OFFSET)
        };
        for i in 0..n {
            let theta = step * (i as f64 + rng.random_range(-ANGLE_JITTER..ANGLE_JITTER));
            points[(ring * n + i, 0)] = cx + radius * theta.cos();
            points[(ring * n + i, 1)] = radius * theta.sin();
        }
    }
    let dist = |a: usize, b: usize| {
        ((points[(a, 0)] - points[(b, 0)]).powi(2) + (points[(a, 1)] - points[(b, 1)]).powi(2)).sqrt()
    };

    let mut cycle = Vec::with_capacity(2 * n);
    for ring in 0..2 {
        let base = ring * n;
        let chords: Vec<f64> = (0..n).map(|i| dist(base + i, base + (i + 1) % n)).collect();
        let sigma = SIGMA_SCALE * chords.iter().sum::<f64>() / n as f64;
        for (i, c) in chords.iter().enumerate() {
            cycle.push((base + i, base + (i + 1) % n, (-(c / sigma).powi(2)).exp()));
        }
    }
    let bridge_weight = BRIDGE_RATIO * cycle.iter().map(|t| t.2).sum::<f64>() / cycle.len() as f64;

    // two landmarks per ring, evenly spaced
    let landmarks = vec![0, n / 2, n + n / 4, n + 3 * n / 4];
    let ring_gap = |a: usize, b: usize| {
        let d = (a as isize - b as isize).rem_euclid(n as isize) as usize;
        d.min(n - d)
    };
    let nearest_outer = |inner: usize| {
        (0..n)
            .min_by(|&a, &b| dist(inner, a).total_cmp(&dist(inner, b)))
            .expect("ring is non-empty")
    };
    let clear_of_landmarks = |site: usize, gap: usize| {
        let outer = nearest_outer(n + site);
        landmarks.iter().all(|&l| {
            if l < n {
                ring_gap(l, outer) >= gap
            } else {
                ring_gap(l - n, site) >= gap
            }
        })
    };

    // bridge sites: inner vertices at least two apart along the ring and as
    // far from the landmarks as the ring size allows
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let place = |gap: usize| {
        let mut sites: Vec<usize> = Vec::with_capacity(2 * bridge_edges);
        for &c in order.iter().filter(|&&c| clear_of_landmarks(c, gap)) {
            if sites.len() == 2 * bridge_edges {
                break;
            }
            if sites.iter().all(|&s| ring_gap(s, c) >= 2) {
                sites.push(c);
            }
        }
        (sites.len() == 2 * bridge_edges).then_some(sites)
    };
    let sites = [2, 1, 0]
        .into_iter()
        .find_map(place)
        .ok_or_else(|| HkcError::InvalidParameter("could not place bridges".into()))?;

    let bridge_for = |site: usize| Edge::new(nearest_outer(n + site), n + site);
    let bridges1 = sites[..bridge_edges]
        .iter()
        .map(|&s| bridge_for(s))
        .collect::<Result<Vec<_>>>()?;
    let bridges2 = sites[bridge_edges..]
        .iter()
        .map(|&s| bridge_for(s))
        .collect::<Result<Vec<_>>>()?;

    let build = |bridges: &[Edge]| {
        let mut t = cycle.clone();
        t.extend(bridges.iter().map(|e| (e.i, e.j, bridge_weight)));
        WeightedGraph::from_triplets(2 * n, &t)
    };
    let g1 = build(&bridges1)?;
    let g2 = build(&bridges2)?;

    Ok(CirclesPair {
        g1,
        g2,
        correspondence: (0..2 * n).collect(),
        points,
        bridges1,
        bridges2,
        landmarks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_bridges_two_components() {
        let c = gen_circles(16, 0, 3).unwrap();
        assert_eq!(c.g1.connected_components(-1.0), 2);
        assert_eq!(c.g2.connected_components(-1.0), 2);
    }

    #[test]
    fn default_size_and_bridges() {
        let c = gen_circles(DEFAULT_N_PER_RING, 2, 7).unwrap();
        assert_eq!(c.g1.n(), 64);
        assert_eq!(c.g1.num_edges(), 66);
        assert_eq!(c.g1.connected_components(-1.0), 1);
        assert_eq!(c.bridges1.len(), 2);
        for b in c.bridges1.iter() {
            assert!(!c.bridges2.contains(b));
            assert!(c.g1.edge_index(b.i, b.j).is_some());
            assert!(c.g2.edge_index(b.i, b.j).is_none());
        }
    }

    #[test]
    fn deterministic() {
        let a = gen_circles(20, 2, 11).unwrap();
        let b = gen_circles(20, 2, 11).unwrap();
        assert_eq!(a.g1, b.g1);
        assert_eq!(a.g2, b.g2);
        assert_eq!(a.points, b.points);
    }

    #[test]
    fn smallest_ring_still_gets_bridges() {
        for b in 0..=2 {
            let c = gen_circles(8, b, 1).unwrap();
            assert_eq!(c.bridges1.len(), b);
            assert_eq!(c.g2.num_edges(), 16 + b);
        }
    }

    #[test]
    fn rejects_small_rings() {
        assert!(gen_circles(7, 0, 0).is_err());
    }
}
