//! Sparse attribute weighting.
//!
//! A single non-negative weight per attribute is fitted by maximising
//! `sum_m w_m sum_ij d_ijm U_ij` subject to `||U||_F <= 1`, `||w||_2 <= 1`,
//! `||w||_1 <= lambda`. For fixed `w` the optimal `U` is the weighted
//! distance matrix scaled to unit Frobenius norm; for fixed `U` the optimal
//! `w` is a normalised soft-thresholding of the per-attribute scores `a_m`.
//! Alternating the two updates never decreases the objective.

use serde::Serialize;

use super::{DistanceMatrix, PerAttributeDistance};
use crate::{Error, Result};

const MAX_ITER: usize = 15;
const TOL: f64 = 1e-4;
const BISECTION_STEPS: usize = 30;
const NORM_SLACK: f64 = 1e-9;

/// Attribute weights `w`, one per attribute.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeWeights(Vec<f64>);

impl AttributeWeights {
    /// Checks `w >= 0`, `||w||_2 <= 1` and, when given, `||w||_1 <= lambda`.
    pub fn new(w: Vec<f64>, lambda: Option<f64>) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("attribute weights must be finite and non-negative"));
        }
        let l2 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if l2 > 1.0 + NORM_SLACK {
            return Err(Error::invalid(format!("||w||_2 = {l2} exceeds 1")));
        }
        if let Some(lambda) = lambda {
            let l1: f64 = w.iter().sum();
            if l1 > lambda + NORM_SLACK {
                return Err(Error::invalid(format!("||w||_1 = {l1} exceeds lambda = {lambda}")));
            }
        }
        Ok(Self(w))
    }

    /// `w_m = 1/sqrt(p)`.
    pub fn uniform(p: usize) -> Self {
        Self(vec![1.0 / (p as f64).sqrt(); p])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of attributes with a strictly positive weight.
    pub fn support(&self) -> usize {
        self.0.iter().filter(|&&v| v > 0.0).count()
    }
}

/// `d_ij = sum_m w_m d_ijm`.
pub fn sparse_weighted_distance(d: &PerAttributeDistance, w: &AttributeWeights) -> Result<DistanceMatrix> {
    if w.len() != d.p() {
        return Err(Error::Dimension { expected: d.p(), found: w.len() });
    }
    let condensed = weighted_condensed(d, w.as_slice());
    let mut it = condensed.into_iter();
    DistanceMatrix::from_fn(d.n(), |_, _| it.next().unwrap_or(0.0))
}

fn weighted_condensed(d: &PerAttributeDistance, w: &[f64]) -> Vec<f64> {
    d.pairs().map(|(_, _, dm)| dm.iter().zip(w).map(|(a, b)| a * b).sum()).collect()
}

/// Result of [`fit_sparse_weights`].
#[derive(Debug, Clone)]
pub struct SparseFit {
    pub weights: AttributeWeights,
    pub iterations: usize,
    pub converged: bool,
    /// `||D_w||_F` after each weight update; non-decreasing.
    pub objective: Vec<f64>,
}

/// Fits sparse attribute weights for penalty `lambda > 1`.
pub fn fit_sparse_weights(
    d: &PerAttributeDistance,
    lambda: f64,
    init: Option<&AttributeWeights>,
) -> Result<SparseFit> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("sparse weighting needs lambda > 1, got {lambda}")));
    }
    let p = d.p();
    let mut w = match init {
        Some(w0) if w0.len() != p => return Err(Error::Dimension { expected: p, found: w0.len() }),
        Some(w0) => w0.as_slice().to_vec(),
        None => AttributeWeights::uniform(p).0,
    };

    let mut objective = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let a = attribute_scores(d, &w);
        let w_new = soft_threshold_update(&a, lambda);
        let change: f64 = w_new.iter().zip(&w).map(|(x, y)| (x - y).abs()).sum();
        let scale: f64 = w.iter().sum();
        w = w_new;

        let value = frobenius(&weighted_condensed(d, &w));
        if let Some(&prev) = objective.last() {
            debug_assert!(
                value >= prev * (1.0 - 1e-8),
                "sparse weighting objective decreased: {prev} -> {value}"
            );
        }
        objective.push(value);

        if scale > 0.0 && change / scale < TOL {
            converged = true;
            break;
        }
    }
    Ok(SparseFit {
        weights: AttributeWeights::new(w, Some(lambda))?,
        iterations,
        converged,
        objective,
    })
}

/// Frobenius norm of the full symmetric matrix given its upper triangle.
fn frobenius(condensed: &[f64]) -> f64 {
    (2.0 * condensed.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// `a_m = sum_ij d_ijm U_ij` with `U` the unit-norm weighted distance matrix.
fn attribute_scores(d: &PerAttributeDistance, w: &[f64]) -> Vec<f64> {
    let dw = weighted_condensed(d, w);
    let norm = frobenius(&dw);
    let npairs = dw.len().max(1) as f64;
    let mut a = vec![0.0; d.p()];
    for ((_, _, dm), u) in d.pairs().zip(&dw) {
        // A zero weighted distance carries no direction; fall back to uniform U.
        let u = if norm > 0.0 { u / norm } else { 1.0 / (2.0 * npairs).sqrt() };
        for (am, dv) in a.iter_mut().zip(dm) {
            *am += 2.0 * u * dv;
        }
    }
    a
}

fn soft(a: &[f64], delta: f64) -> Vec<f64> {
    a.iter().map(|&v| (v - delta).max(0.0)).collect()
}

fn l2_normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
        Some(v)
    } else {
        None
    }
}

/// `w = S(a, delta) / ||S(a, delta)||_2` with `delta = 0` when that is already
/// inside the `l1` ball, else the bisection upper bound on the threshold.
pub(crate) fn soft_threshold_update(a: &[f64], lambda: f64) -> Vec<f64> {
    let l1 = |v: &[f64]| v.iter().sum::<f64>();
    let argmax_one_hot = || {
        let mut best = 0;
        for (m, &v) in a.iter().enumerate() {
            if v > a[best] {
                best = m;
            }
        }
        let mut w = vec![0.0; a.len()];
        if let Some(x) = w.get_mut(best) {
            *x = 1.0;
        }
        w
    };
    let Some(w0) = l2_normalize(soft(a, 0.0)) else {
        return argmax_one_hot();
    };
    if l1(&w0) <= lambda {
        return w0;
    }
    let (mut lo, mut hi) = (0.0, a.iter().cloned().fold(0.0, f64::max));
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        match l2_normalize(soft(a, mid)) {
            Some(w) if l1(&w) > lambda => lo = mid,
            _ => hi = mid,
        }
    }
    l2_normalize(soft(a, hi)).unwrap_or_else(argmax_one_hot)
}
