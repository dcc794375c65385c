//! Leave-one-out retrieval over a distance matrix.
//!
//! Every vertex in turn is a query; the remaining vertices are ranked by
//! ascending distance (ties by index) and an item is relevant when it shares
//! the query's label. Average precision is normalized by the number of
//! relevant items, so mAP lies in [0, 1].

use std::collections::BTreeMap;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{HkcError, Result};

/// Ranks reported in `precision_at`.
pub const PRECISION_RANKS: [usize; 3] = [1, 5, 10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalMetrics {
    /// Average precision per query; `None` for queries without a same-class partner.
    pub per_query_ap: Vec<Option<f64>>,
    pub map: f64,
    /// `(mean recall@r, mean precision@r)` for r = 1..n-1.
    pub pr_curve: Vec<(f64, f64)>,
    pub precision_at: BTreeMap<usize, f64>,
    pub skipped_queries: usize,
}

/// All vertices except `query`, by ascending `D[query, ·]`, ties by index.
pub fn rank_by_distance(d: &DMatrix<f64>, query: usize) -> Result<Vec<usize>> {
    let n = d.nrows();
    if query >= n {
        return Err(HkcError::OutOfRange { index: query, size: n });
    }
    let mut others: Vec<usize> = (0..n).filter(|&v| v != query).collect();
    others.sort_by(|&a, &b| d[(query, a)].total_cmp(&d[(query, b)]).then(a.cmp(&b)));
    Ok(others)
}

fn relevance<L: PartialEq>(ranking: &[usize], labels: &[L], query_label: &L) -> Vec<bool> {
    ranking.iter().map(|&v| labels[v] == *query_label).collect()
}

/// `(1/|relevant|) Σ_r P(r) rel(r)` over the full ranking, or `None` when
/// nothing in the ranking is relevant.
pub fn average_precision<L: PartialEq>(ranking: &[usize], labels: &[L], query_label: &L) -> Option<f64> {
    ap_from_relevance(&relevance(ranking, labels, query_label))
}

fn ap_from_relevance(rel: &[bool]) -> Option<f64> {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (r, &is_rel) in rel.iter().enumerate() {
        if is_rel {
            hits += 1;
            sum += hits as f64 / (r + 1) as f64;
        }
    }
    (hits > 0).then(|| sum / hits as f64)
}

/// Fraction of relevant items among the first `r` of the ranking.
pub fn precision_at<L: PartialEq>(ranking: &[usize], labels: &[L], query_label: &L, r: usize) -> f64 {
    let r = r.min(ranking.len());
    if r == 0 {
        return 0.0;
    }
    let hits = ranking[..r].iter().filter(|&&v| labels[v] == *query_label).count();
    hits as f64 / r as f64
}

/// Leave-one-out evaluation of a distance matrix against class labels.
pub fn evaluate<L: PartialEq>(d: &DMatrix<f64>, labels: &[L]) -> Result<RetrievalMetrics> {
    let n = d.nrows();
    if !d.is_square() || labels.len() != n {
        return Err(HkcError::DimensionMismatch(format!(
            "distance matrix {}x{} with {} labels",
            d.nrows(),
            d.ncols(),
            labels.len()
        )));
    }
    if n < 2 || labels.iter().all(|l| *l == labels[0]) {
        return Err(HkcError::SingleClass);
    }

    let len = n - 1;
    let mut per_query_ap = Vec::with_capacity(n);
    let mut recall_sum = vec![0.0; len];
    let mut precision_sum = vec![0.0; len];
    let mut evaluated = 0usize;
    for q in 0..n {
        let ranking = rank_by_distance(d, q)?;
        let rel = relevance(&ranking, labels, &labels[q]);
        let ap = ap_from_relevance(&rel);
        per_query_ap.push(ap);
        if ap.is_none() {
            continue;
        }
        evaluated += 1;
        let total_rel = rel.iter().filter(|&&x| x).count() as f64;
        let mut hits = 0usize;
        for (r, &is_rel) in rel.iter().enumerate() {
            hits += is_rel as usize;
            precision_sum[r] += hits as f64 / (r + 1) as f64;
            recall_sum[r] += hits as f64 / total_rel;
        }
    }
    let skipped_queries = n - evaluated;
    if skipped_queries > 0 {
        warn!("{skipped_queries} queries have no same-class partner and were skipped");
    }

    let denom = evaluated as f64;
    let map = per_query_ap.iter().flatten().sum::<f64>() / denom;
    let pr_curve = recall_sum
        .iter()
        .zip(&precision_sum)
        .map(|(r, p)| (r / denom, p / denom))
        .collect();
    let precision_at = PRECISION_RANKS
        .iter()
        .map(|&r| (r, precision_sum[r.min(len) - 1] / denom))
        .collect();
    Ok(RetrievalMetrics {
        per_query_ap,
        map,
        pr_curve,
        precision_at,
        skipped_queries,
    })
}
