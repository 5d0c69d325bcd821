//! Item- and attribute-specific weights (Clustering Objects on Subsets of
//! Attributes).
//!
//! Each item `i` carries a weight row `W_i.` on the probability simplex. For
//! fixed neighbourhoods the entropy-penalised objective
//! `sum_m W_im s_im + lambda sum_m W_im log W_im` is minimised exactly by
//! `W_im = softmax_m(-s_im / lambda)`, where `s_im` is the mean distance
//! along attribute `m` to the `floor(sqrt(n))` nearest neighbours of `i`
//! under the current weights. The fit alternates neighbourhood search and the
//! closed-form row update.

use ndarray::Array2;

use super::{DistanceMatrix, PerAttributeDistance};
use crate::{Error, Result};

const MAX_ITER: usize = 20;
const TOL: f64 = 1e-4;

/// `n x p` non-negative weights whose rows sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemAttributeWeights {
    values: Array2<f64>,
}

impl ItemAttributeWeights {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        for (i, row) in values.rows().into_iter().enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::invalid(format!("invalid weight in row {i}")));
            }
            let s = row.sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!("weights of row {i} sum to {s}")));
            }
        }
        Ok(Self { values })
    }

    pub fn uniform(n: usize, p: usize) -> Self {
        Self { values: Array2::from_elem((n, p), 1.0 / p as f64) }
    }

    pub fn view(&self) -> ndarray::ArrayView2<'_, f64> {
        self.values.view()
    }

    /// Per-attribute median over items.
    pub fn column_medians(&self) -> Vec<f64> {
        self.values.columns().into_iter().map(|c| median(c.to_vec())).collect()
    }
}

pub(crate) fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Neighbourhood size `floor(sqrt(n))`, at least one.
pub fn knn_size(n: usize) -> usize {
    ((n as f64).sqrt().floor() as usize).max(1)
}

/// Result of [`fit_cosa_weights`].
#[derive(Debug, Clone)]
pub struct CosaFit {
    pub weights: ItemAttributeWeights,
    pub iterations: usize,
    pub converged: bool,
}

/// `d_ij = sum_m max(W_im, W_jm) d_ijm`.
pub fn cosa_distance(d: &PerAttributeDistance, w: &ItemAttributeWeights) -> Result<DistanceMatrix> {
    let (n, p) = w.values.dim();
    if n != d.n() {
        return Err(Error::Dimension { expected: d.n(), found: n });
    }
    if p != d.p() {
        return Err(Error::Dimension { expected: d.p(), found: p });
    }
    let wv = &w.values;
    DistanceMatrix::from_fn(n, |i, j| {
        let (wi, wj) = (wv.row(i), wv.row(j));
        d.pair(i, j)
            .iter()
            .zip(wi.iter().zip(wj.iter()))
            .map(|(dm, (a, b))| a.max(*b) * dm)
            .sum()
    })
}

/// Fits COSA weights for penalty `lambda > 0`.
pub fn fit_cosa_weights(d: &PerAttributeDistance, lambda: f64) -> Result<CosaFit> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("COSA weighting needs lambda > 0, got {lambda}")));
    }
    let (n, p) = (d.n(), d.p());
    if n < 3 {
        return Err(Error::invalid(format!("COSA weighting needs at least 3 items, got {n}")));
    }
    let k = knn_size(n).min(n - 1);
    let mut w = Array2::from_elem((n, p), 1.0 / p as f64);
    let mut next = Array2::zeros((n, p));
    let mut candidates: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    let mut s = vec![0.0; p];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITER {
        iterations += 1;
        for i in 0..n {
            let wi = w.row(i);
            candidates.clear();
            candidates.extend((0..n).filter(|&j| j != i).map(|j| {
                let dist: f64 = d.pair(i, j).iter().zip(wi.iter()).map(|(a, b)| a * b).sum();
                (dist, j)
            }));
            let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < candidates.len() {
                candidates.select_nth_unstable_by(k - 1, by_distance);
            }
            s.iter_mut().for_each(|v| *v = 0.0);
            for &(_, j) in &candidates[..k] {
                for (sm, dm) in s.iter_mut().zip(d.pair(i, j)) {
                    *sm += dm;
                }
            }
            s.iter_mut().for_each(|v| *v /= k as f64);
            softmax_row(&s, lambda, next.row_mut(i).as_slice_mut().expect("standard layout"));
        }
        let change = w.iter().zip(next.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut w, &mut next);
        if change < TOL {
            converged = true;
            break;
        }
    }
    Ok(CosaFit { weights: ItemAttributeWeights { values: w }, iterations, converged })
}

/// `out_m = exp(-s_m / lambda) / sum_m' exp(-s_m' / lambda)`, floored at the
/// smallest positive normal so every weight stays strictly positive.
pub(crate) fn softmax_row(s: &[f64], lambda: f64, out: &mut [f64]) {
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut total = 0.0;
    for (o, &v) in out.iter_mut().zip(s) {
        *o = (-(v - smin) / lambda).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o = (*o / total).max(f64::MIN_POSITIVE);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{DataMatrix, Kernel};
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pad(n: usize, p: usize, seed: u64) -> PerAttributeDistance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| rng.random::<f64>() * 3.0);
        PerAttributeDistance::from_data(&DataMatrix::from_values(x).unwrap(), Kernel::SquaredDifference)
    }

    #[test]
    fn knn_size_floor_sqrt() {
        assert_eq!(knn_size(1), 1);
        assert_eq!(knn_size(3), 1);
        assert_eq!(knn_size(9), 3);
        assert_eq!(knn_size(75), 8);
        assert_eq!(knn_size(150), 12);
    }

    #[test]
    fn hand_evaluated_distance() {
        let data = DataMatrix::from_values(array![[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let d = PerAttributeDistance::from_data(&data, Kernel::SquaredDifference);
        let w = ItemAttributeWeights::new(array![[0.9, 0.1], [0.2, 0.8]]).unwrap();
        let dc = cosa_distance(&d, &w).unwrap();
        assert!((dc.get(0, 1) - 1.7).abs() < 1e-15);
    }

    #[test]
    fn identical_rows_reduce_to_weighted_sum() {
        let d = random_pad(6, 3, 4);
        let row = [0.2, 0.5, 0.3];
        let w = ItemAttributeWeights::new(Array2::from_shape_fn((6, 3), |(_, m)| row[m])).unwrap();
        let dc = cosa_distance(&d, &w).unwrap();
        for (i, j, dm) in d.pairs() {
            let expect: f64 = dm.iter().zip(&row).map(|(a, b)| a * b).sum();
            assert!((dc.get(i, j) - expect).abs() < 1e-12);
        }
        let u = cosa_distance(&d, &ItemAttributeWeights::uniform(6, 3)).unwrap();
        for (i, j, dm) in d.pairs() {
            assert!((u.get(i, j) - dm.iter().sum::<f64>() / 3.0).abs() < 1e-12);
        }
        assert!(cosa_distance(&d, &ItemAttributeWeights::uniform(5, 3)).is_err());
        assert!(cosa_distance(&d, &ItemAttributeWeights::uniform(6, 2)).is_err());
    }

    #[test]
    fn large_lambda_tends_to_uniform() {
        let d = random_pad(12, 4, 5);
        let fit = fit_cosa_weights(&d, 1e8).unwrap();
        assert!(fit.weights.view().iter().all(|&v| (v - 0.25).abs() < 1e-6));
    }

    #[test]
    fn zero_distance_attribute_dominates_at_small_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = Array2::from_shape_fn((10, 3), |(_, m)| if m == 1 { 2.0 } else { rng.random::<f64>() * 5.0 });
        let d = PerAttributeDistance::from_data(&DataMatrix::from_values(x).unwrap(), Kernel::SquaredDifference);
        let fit = fit_cosa_weights(&d, 0.05).unwrap();
        for row in fit.weights.view().rows() {
            assert!(row[1] > row[0] && row[1] > row[2]);
        }
    }

    #[test]
    fn rows_sum_to_one_and_stay_positive() {
        for seed in 0..10 {
            let d = random_pad(15, 5, seed);
            for &lambda in &[0.01, 0.3, 2.0] {
                let fit = fit_cosa_weights(&d, lambda).unwrap();
                for row in fit.weights.view().rows() {
                    assert!((row.sum() - 1.0).abs() < 1e-12);
                    assert!(row.iter().all(|&v| v > 0.0));
                }
            }
        }
    }

    #[test]
    fn constant_scores_give_uniform_row() {
        let mut out = [0.0; 4];
        softmax_row(&[2.0; 4], 0.1, &mut out);
        assert!(out.iter().all(|&v| v == 0.25));
    }

    #[test]
    fn errors() {
        let d = random_pad(5, 2, 0);
        assert!(fit_cosa_weights(&d, 0.0).is_err());
        let tiny = random_pad(2, 2, 0);
        assert!(fit_cosa_weights(&tiny, 1.0).is_err());
    }

    /// Independent oracle for n = 9, p = 2: rebuild neighbourhoods by full
    /// sorting and compute each row's softmax directly, iterating with the
    /// same schedule from the uniform start.
    #[test]
    fn matches_direct_softmax_oracle() {
        let data = DataMatrix::from_values(array![
            [0.0, 0.0],
            [0.1, 2.0],
            [0.2, 4.1],
            [0.1, 6.0],
            [3.0, 0.5],
            [3.1, 2.5],
            [2.9, 4.4],
            [3.2, 6.2],
            [1.5, 3.0]
        ])
        .unwrap();
        let lambda = 0.7;
        let d = PerAttributeDistance::from_data(&data, Kernel::SquaredDifference);
        let x = data.values();
        let n = 9;
        let k = 3;
        let dist1 = |i: usize, j: usize, m: usize| (x[(i, m)] - x[(j, m)]).powi(2);
        let mut w = vec![[0.5f64, 0.5]; n];
        for _ in 0..MAX_ITER {
            let mut next = w.clone();
            for i in 0..n {
                let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                order.sort_by(|&a, &b| {
                    let da = w[i][0] * dist1(i, a, 0) + w[i][1] * dist1(i, a, 1);
                    let db = w[i][0] * dist1(i, b, 0) + w[i][1] * dist1(i, b, 1);
                    da.partial_cmp(&db).unwrap().then(a.cmp(&b))
                });
                let s: Vec<f64> = (0..2).map(|m| order[..k].iter().map(|&j| dist1(i, j, m)).sum::<f64>() / k as f64).collect();
                let e: Vec<f64> = s.iter().map(|v| (-v / lambda).exp()).collect();
                let z = e[0] + e[1];
                next[i] = [e[0] / z, e[1] / z];
            }
            let change = w.iter().zip(&next).flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()]).fold(0.0, f64::max);
            w = next;
            if change < TOL {
                break;
            }
        }
        let fit = fit_cosa_weights(&d, lambda).unwrap();
        for i in 0..n {
            for m in 0..2 {
                assert!((fit.weights.view()[(i, m)] - w[i][m]).abs() < 1e-12, "row {i}");
            }
        }
    }
}
