mod common;

use common::*;
use hkc::retrieval::{average_precision, evaluate, precision_at, rank_by_distance};
use hkc::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn euclidean(points: &[(f64, f64)]) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |a, b| {
        let (p, q) = (points[a], points[b]);
        ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
    })
}

#[test]
fn hand_worked_eight_items() {
    // query 0; items 1..7 sit at increasing distance, relevant = 1, 3, 4, 7
    let labels = ['a', 'a', 'b', 'a', 'a', 'b', 'b', 'a'];
    let d = DMatrix::from_fn(8, 8, |r, c| (r as f64 - c as f64).abs());
    let ranking = rank_by_distance(&d, 0).unwrap();
    assert_eq!(ranking, vec![1, 2, 3, 4, 5, 6, 7]);
    let ap = average_precision(&ranking, &labels, &'a').unwrap();
    let want = (1.0 + 2.0 / 3.0 + 3.0 / 4.0 + 4.0 / 7.0) / 4.0;
    assert!((ap - want).abs() < 1e-15);
    assert_eq!(precision_at(&ranking, &labels, &'a', 1), 1.0);
    assert_eq!(precision_at(&ranking, &labels, &'a', 5), 3.0 / 5.0);
    assert_eq!(precision_at(&ranking, &labels, &'a', 7), 4.0 / 7.0);
    assert_eq!(precision_at(&ranking, &labels, &'a', 50), 4.0 / 7.0);

    let m = evaluate(&d, &labels).unwrap();
    assert!((m.per_query_ap[0].unwrap() - want).abs() < 1e-15);
    assert_eq!(m.pr_curve.len(), 7);
    let (recall, _) = *m.pr_curve.last().unwrap();
    assert!((recall - 1.0).abs() < 1e-15);
}

#[test]
fn perfect_ranking_scores_one() {
    let labels = [0, 1, 0, 1, 0, 1];
    let d = DMatrix::from_fn(6, 6, |r, c| {
        if r == c {
            0.0
        } else if labels[r] == labels[c] {
            1.0 + 0.01 * (r + c) as f64
        } else {
            10.0
        }
    });
    let m = evaluate(&d, &labels).unwrap();
    assert_eq!(m.map, 1.0);
    assert_eq!(m.precision_at[&1], 1.0);
    assert_eq!(m.skipped_queries, 0);
}

#[test]
fn separated_clusters_are_retrieved_perfectly() {
    let mut r = rng(3);
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for (cls, center) in [(0usize, (0.0, 0.0)), (1, (50.0, 0.0)), (2, (0.0, 50.0))] {
        for _ in 0..15 {
            pts.push((center.0 + r.random_range(-1.0..1.0), center.1 + r.random_range(-1.0..1.0)));
            labels.push(cls);
        }
    }
    let m = evaluate(&euclidean(&pts), &labels).unwrap();
    assert_eq!(m.map, 1.0);
    assert_eq!(m.precision_at[&10], 1.0);
}

#[test]
fn random_labels_score_near_the_prior() {
    let mut r = rng(11);
    let n = 100;
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (r.random_range(0.0..1.0), r.random_range(0.0..1.0))).collect();
    let d = euclidean(&pts);
    let mut labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let mut total = 0.0;
    for _ in 0..20 {
        labels.shuffle(&mut r);
        total += evaluate(&d, &labels).unwrap().map;
    }
    let prior = 49.0 / 99.0;
    let mean = total / 20.0;
    assert!((mean - prior).abs() <= 0.05, "mean mAP {mean} vs prior {prior}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn metrics_depend_only_on_orderings(seed in any::<u64>(), n in 4usize..20, classes in 2usize..4, c in 0.01f64..100.0) {
        let mut r = rng(seed);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (r.random_range(0.0..1.0), r.random_range(0.0..1.0))).collect();
        let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
        let d = euclidean(&pts);
        let base = evaluate(&d, &labels).unwrap();
        let scaled = evaluate(&(&d * c), &labels).unwrap();
        let warped = evaluate(&d.map(|v| (3.0 * v).exp() + v.powi(3)), &labels).unwrap();
        prop_assert_eq!(&base.per_query_ap, &scaled.per_query_ap);
        prop_assert_eq!(&base.per_query_ap, &warped.per_query_ap);
        prop_assert_eq!(&base.precision_at, &warped.precision_at);
        prop_assert!(base.map >= 0.0 && base.map <= 1.0);
        for w in base.pr_curve.windows(2) {
            prop_assert!(w[1].0 >= w[0].0 - 1e-15);
        }
    }
}
