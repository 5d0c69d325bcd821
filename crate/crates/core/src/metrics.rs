//! Pair-counting agreement between partitions and F1 of attribute rankings.

use serde::Serialize;

use crate::cluster::ClusterAssignment;
use crate::{Error, Result};

/// Counts over the `n(n-1)/2` unordered item pairs. "Positive" means the
/// estimated partition puts the pair together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct PairConfusion {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl PairConfusion {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Pair confusion of `est` against `truth`, in `O(n + G_t G_e)` via the
/// contingency table.
pub fn pair_confusion(truth: &ClusterAssignment, est: &ClusterAssignment) -> Result<PairConfusion> {
    let n = truth.n();
    if est.n() != n {
        return Err(Error::Dimension { expected: n, found: est.n() });
    }
    let (gt, ge) = (truth.g(), est.g());
    let mut table = vec![0u64; gt * ge];
    for (&a, &b) in truth.labels().iter().zip(est.labels()) {
        table[(a - 1) * ge + (b - 1)] += 1;
    }
    let pairs = |x: u64| x * x.saturating_sub(1) / 2;
    let both: u64 = table.iter().map(|&x| pairs(x)).sum();
    let same_truth: u64 = truth.sizes().iter().map(|&x| pairs(x as u64)).sum();
    let same_est: u64 = est.sizes().iter().map(|&x| pairs(x as u64)).sum();
    let total = pairs(n as u64);
    Ok(PairConfusion {
        tp: both,
        fp: same_est - both,
        fn_: same_truth - both,
        tn: total + both - same_truth - same_est,
    })
}

fn identical(pc: &PairConfusion) -> bool {
    pc.fp == 0 && pc.fn_ == 0
}

/// `2 (TP TN - FP FN) / ((TP + FP)(TN + FP) + (TP + FN)(TN + FN))`.
///
/// With a zero denominator the result is 1 for identical partitions and 0
/// otherwise.
pub fn ari(pc: &PairConfusion) -> f64 {
    let (tp, tn, fp, fn_) = (pc.tp as f64, pc.tn as f64, pc.fp as f64, pc.fn_ as f64);
    let den = (tp + fp) * (tn + fp) + (tp + fn_) * (tn + fn_);
    if den == 0.0 {
        log::warn!("adjusted Rand index undefined (zero denominator), using the identity convention");
        return if identical(pc) { 1.0 } else { 0.0 };
    }
    2.0 * (tp * tn - fp * fn_) / den
}

pub fn rand_index(pc: &PairConfusion) -> f64 {
    if pc.total() == 0 {
        return 1.0;
    }
    (pc.tp + pc.tn) as f64 / pc.total() as f64
}

/// `TP / (TP + FP + FN)`; 1 when no pair is together in either partition.
pub fn jaccard(pc: &PairConfusion) -> f64 {
    let den = pc.tp + pc.fp + pc.fn_;
    if den == 0 {
        return 1.0;
    }
    pc.tp as f64 / den as f64
}

/// Indices of the `q` largest weights, ties to the lower index.
pub fn top_q(weights: &[f64], q: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    idx.truncate(q);
    idx.sort_unstable();
    idx
}

/// F1 of the top-`q` attributes by weight against the contributing set.
pub fn weighting_f1(true_contributing: &[usize], weights: &[f64], q: usize) -> Result<f64> {
    let p = weights.len();
    if q > p {
        return Err(Error::invalid(format!("q = {q} exceeds the number of attributes {p}")));
    }
    if let Some(&bad) = true_contributing.iter().find(|&&j| j >= p) {
        return Err(Error::invalid(format!("contributing attribute {bad} out of range")));
    }
    let mut truth = vec![false; p];
    true_contributing.iter().for_each(|&j| truth[j] = true);
    let n_true = truth.iter().filter(|&&t| t).count();
    let selected = top_q(weights, q);
    let hits = selected.iter().filter(|&&j| truth[j]).count() as f64;
    if hits == 0.0 {
        return Ok(0.0);
    }
    let precision = hits / q as f64;
    let recall = hits / n_true as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}
