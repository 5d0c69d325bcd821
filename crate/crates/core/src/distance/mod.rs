//! Pairwise distances between items.
//!
//! Besides plain Euclidean/Manhattan distances this module provides the two
//! attribute-weighted constructions used by the consensus pipeline: a single
//! weight vector shared by all items ([`sparse`]) and item-specific weights
//! ([`cosa`]). Both operate on a [`PerAttributeDistance`], the `n x n x p`
//! tensor of one-dimensional distances `d_ijm`.

pub mod cosa;
pub mod sparse;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use cosa::{cosa_distance, fit_cosa_weights, knn_size, CosaFit, ItemAttributeWeights};
pub use sparse::{fit_sparse_weights, sparse_weighted_distance, AttributeWeights, SparseFit};

/// An `n x p` matrix of measurements: items in rows, attributes in columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
    item_ids: Vec<String>,
    attribute_ids: Vec<String>,
}

impl DataMatrix {
    pub fn new(values: Array2<f64>, item_ids: Vec<String>, attribute_ids: Vec<String>) -> Result<Self> {
        let (n, p) = values.dim();
        if n < 2 {
            return Err(Error::invalid(format!("need at least 2 items, got {n}")));
        }
        if p < 1 {
            return Err(Error::invalid("need at least 1 attribute"));
        }
        if item_ids.len() != n {
            return Err(Error::Dimension { expected: n, found: item_ids.len() });
        }
        if attribute_ids.len() != p {
            return Err(Error::Dimension { expected: p, found: attribute_ids.len() });
        }
        if let Some(((i, j), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value {v} at item {}, attribute {}",
                item_ids[i], attribute_ids[j]
            )));
        }
        Ok(Self { values, item_ids, attribute_ids })
    }

    /// Wraps a bare matrix, naming items `item1..` and attributes `var1..`.
    pub fn from_values(values: Array2<f64>) -> Result<Self> {
        let (n, p) = values.dim();
        let items = (1..=n).map(|i| format!("item{i}")).collect();
        let attrs = (1..=p).map(|j| format!("var{j}")).collect();
        Self::new(values, items, attrs)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn attribute_ids(&self) -> &[String] {
        &self.attribute_ids
    }

    /// Z-scores every attribute (sample standard deviation). Constant
    /// attributes are centred only.
    pub fn standardize(&mut self) {
        let n = self.n() as f64;
        for mut col in self.values.columns_mut() {
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let sd = var.sqrt();
            let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
            col.mapv_inplace(|v| (v - mean) * scale);
        }
    }
}

/// Aggregate metric for unweighted distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Euclidean,
    Manhattan,
}

/// One-dimensional distance along a single attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// `(x_im - x_jm)^2`; summing over attributes gives squared Euclidean.
    #[default]
    SquaredDifference,
    /// `|x_im - x_jm|`; summing over attributes gives Manhattan.
    AbsoluteDifference,
}

impl Kernel {
    #[inline]
    pub fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            Kernel::SquaredDifference => (a - b) * (a - b),
            Kernel::AbsoluteDifference => (a - b).abs(),
        }
    }

    /// The unweighted aggregate metric matching this kernel.
    pub fn metric(self) -> Metric {
        match self {
            Kernel::SquaredDifference => Metric::Euclidean,
            Kernel::AbsoluteDifference => Metric::Manhattan,
        }
    }
}

/// Symmetric, non-negative `n x n` matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Array2<f64>,
}

impl DistanceMatrix {
    /// Validates and wraps a square matrix. Symmetry is checked exactly.
    pub fn from_array(values: Array2<f64>) -> Result<Self> {
        let (n, m) = values.dim();
        if n != m {
            return Err(Error::Dimension { expected: n, found: m });
        }
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(Error::invalid(format!("non-zero diagonal at {i}")));
            }
            for j in (i + 1)..n {
                let v = values[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!("invalid distance {v} at ({i}, {j})")));
                }
                if v != values[(j, i)] {
                    return Err(Error::invalid(format!("asymmetric distance at ({i}, {j})")));
                }
            }
        }
        Ok(Self { values })
    }

    /// Builds the matrix from a function evaluated on `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
        Self::from_array(values)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn into_array(self) -> Array2<f64> {
        self.values
    }
}

/// Unweighted pairwise distance between the rows of `data`.
pub fn pairwise_distance(data: &DataMatrix, metric: Metric) -> Result<DistanceMatrix> {
    pairwise_rows(data.values(), metric)
}

pub(crate) fn pairwise_rows(rows: ArrayView2<'_, f64>, metric: Metric) -> Result<DistanceMatrix> {
    if rows.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite value in data"));
    }
    DistanceMatrix::from_fn(rows.nrows(), |i, j| {
        let (a, b) = (rows.row(i), rows.row(j));
        match metric {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    })
}

/// The tensor `d_ijm` stored in condensed pair order: for every pair
/// `i < j` a contiguous slice of `p` attribute distances.
#[derive(Debug, Clone)]
pub struct PerAttributeDistance {
    n: usize,
    p: usize,
    kernel: Kernel,
    values: Vec<f64>,
}

impl PerAttributeDistance {
    pub fn from_data(data: &DataMatrix, kernel: Kernel) -> Self {
        Self::from_rows(data.values(), kernel)
    }

    /// Computes `d_ijm` for the rows of a (sub)matrix.
    pub fn from_rows(rows: ArrayView2<'_, f64>, kernel: Kernel) -> Self {
        let (n, p) = rows.dim();
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2 * p);
        for i in 0..n {
            let a = rows.row(i);
            for j in (i + 1)..n {
                let b = rows.row(j);
                values.extend(a.iter().zip(b).map(|(&x, &y)| kernel.eval(x, y)));
            }
        }
        Self { n, p, kernel, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    #[inline]
    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Attribute distances for the pair `(i, j)`, `i != j`.
    #[inline]
    pub fn pair(&self, i: usize, j: usize) -> &[f64] {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let k = self.pair_index(a, b) * self.p;
        &self.values[k..k + self.p]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, m: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.pair(i, j)[m]
        }
    }

    /// Iterates `(i, j, d_ij.)` over `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &[f64])> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
            .zip(self.values.chunks_exact(self.p.max(1)))
            .map(|((i, j), d)| (i, j, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn euclidean_three_four_five() {
        let data = DataMatrix::from_values(array![[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let d = pairwise_distance(&data, Metric::Euclidean).unwrap();
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn identical_rows_are_at_zero() {
        let data = DataMatrix::from_values(array![[1.5, -2.0], [1.5, -2.0], [0.0, 0.0]]).unwrap();
        let d = pairwise_distance(&data, Metric::Euclidean).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn manhattan() {
        let data = DataMatrix::from_values(array![[0.0, 0.0], [1.0, 2.0]]).unwrap();
        let d = pairwise_distance(&data, Metric::Manhattan).unwrap();
        assert_eq!(d.get(0, 1), 3.0);
    }

    #[test]
    fn rejects_non_finite_and_tiny_inputs() {
        assert!(DataMatrix::from_values(array![[0.0, f64::NAN], [1.0, 2.0]]).is_err());
        assert!(DataMatrix::from_values(array![[0.0, 1.0]]).is_err());
        assert!(pairwise_rows(array![[0.0], [f64::INFINITY]].view(), Metric::Euclidean).is_err());
    }

    #[test]
    fn distance_matrix_validation() {
        assert!(DistanceMatrix::from_array(array![[0.0, 1.0], [2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_array(array![[1.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_array(array![[0.0, -1.0], [-1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_array(array![[0.0, 1.0], [1.0, 0.0]]).is_ok());
    }

    #[test]
    fn per_attribute_layout() {
        let data = DataMatrix::from_values(array![[0.0, 1.0], [2.0, 1.0], [0.0, 4.0]]).unwrap();
        let d = PerAttributeDistance::from_data(&data, Kernel::SquaredDifference);
        assert_eq!(d.pair(0, 1), &[4.0, 0.0]);
        assert_eq!(d.pair(2, 0), &[0.0, 9.0]);
        assert_eq!(d.get(1, 2, 0), 4.0);
        assert_eq!(d.get(1, 1, 0), 0.0);
        let collected: Vec<_> = d.pairs().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(collected, vec![(0, 1), (0, 2), (1, 2)]);
        let abs = PerAttributeDistance::from_data(&data, Kernel::AbsoluteDifference);
        assert_eq!(abs.pair(1, 2), &[2.0, 3.0]);
    }

    #[test]
    fn standardize_gives_unit_variance() {
        let mut data = DataMatrix::from_values(array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0], [6.0, 5.0]]).unwrap();
        data.standardize();
        let col = data.values().column(0).to_owned();
        let mean = col.sum() / 4.0;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
        assert!(data.values().column(1).iter().all(|&v| v == 0.0));
    }
}
