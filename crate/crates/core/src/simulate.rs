//! Gaussian mixture generator with per-attribute control of the variance
//! explained by the clustering.
//!
//! Means are drawn per cluster and then centred and scaled so that each mean
//! column has sample variance exactly `E_j`. The noise covariance is a
//! correlation matrix rescaled so that attribute `j` has residual variance
//! `1 - E_j`, giving every column an expected total variance of 1.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignment;
use crate::distance::DataMatrix;
use crate::seed::stream_rng;
use crate::{Error, Result};

const STREAM_MEANS: u64 = 1;
const STREAM_COVARIANCE: u64 = 2;
const STREAM_NOISE: u64 = 3;
const MAX_REDRAWS: usize = 100;
const EIGEN_FLOOR: f64 = 1e-10;

/// Parameters of the correlated-blocks scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockGraph {
    /// Smallest block size drawn (the last block may be shorter).
    pub min_block: usize,
    pub max_block: usize,
    /// Magnitude of the off-diagonal precision entries on graph edges.
    pub v: f64,
    /// Added to the absolute row sum on the precision diagonal.
    pub delta: f64,
    /// Probability of each non-tree edge within a block.
    pub extra_edge_prob: f64,
}

impl Default for BlockGraph {
    fn default() -> Self {
        Self { min_block: 5, max_block: 10, v: 0.5, delta: 0.1, extra_edge_prob: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Correlation {
    #[default]
    Independent,
    BlockGraph(BlockGraph),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    /// Items are laid out cluster by cluster in this order.
    pub cluster_sizes: Vec<usize>,
    /// Explained variance per attribute; its length is `p`.
    pub explained_variance: Vec<f64>,
    #[serde(default)]
    pub correlation: Correlation,
    #[serde(default)]
    pub seed: u64,
}

impl SimulationSpec {
    /// `p` attributes of which the first `q` have explained variance `e`.
    pub fn homogeneous(cluster_sizes: Vec<usize>, p: usize, q: usize, e: f64, seed: u64) -> Self {
        let explained_variance = (0..p).map(|j| if j < q { e } else { 0.0 }).collect();
        Self { cluster_sizes, explained_variance, correlation: Correlation::Independent, seed }
    }

    pub fn n(&self) -> usize {
        self.cluster_sizes.iter().sum()
    }

    pub fn p(&self) -> usize {
        self.explained_variance.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.cluster_sizes.is_empty() || self.cluster_sizes.contains(&0) {
            return Err(Error::invalid("cluster sizes must be positive"));
        }
        if self.n() < 2 {
            return Err(Error::invalid("simulation needs at least 2 items"));
        }
        if self.explained_variance.is_empty() {
            return Err(Error::invalid("simulation needs at least 1 attribute"));
        }
        if let Some(e) = self.explained_variance.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::invalid(format!("explained variance {e} outside [0, 1]")));
        }
        if let Correlation::BlockGraph(b) = self.correlation {
            if b.min_block == 0 || b.min_block > b.max_block {
                return Err(Error::invalid("block sizes need 1 <= min_block <= max_block"));
            }
            if !(b.v.is_finite() && b.v >= 0.0 && b.delta.is_finite() && b.delta > 0.0) {
                return Err(Error::invalid("block graph needs v >= 0 and delta > 0"));
            }
            if !(0.0..=1.0).contains(&b.extra_edge_prob) {
                return Err(Error::invalid("extra_edge_prob outside [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn truth(&self) -> Result<ClusterAssignment> {
        let labels = self
            .cluster_sizes
            .iter()
            .enumerate()
            .flat_map(|(g, &s)| std::iter::repeat_n(g + 1, s))
            .collect();
        ClusterAssignment::new(labels)
    }
}

#[derive(Debug, Clone)]
pub struct SimulatedDataset {
    pub data: DataMatrix,
    pub truth: ClusterAssignment,
    pub means: Array2<f64>,
    pub sigma: Array2<f64>,
    /// Attributes with `E_j > 0`, ascending.
    pub contributing: Vec<usize>,
}

/// Cluster means with column sample variance (denominator `n - 1`) equal
/// to `E_j`. Columns with `E_j = 0` are zero.
pub fn simulate_means(truth: &ClusterAssignment, e: &[f64], seed: u64) -> Result<Array2<f64>> {
    let (n, g) = (truth.n(), truth.g());
    if g < 2 && e.iter().any(|&x| x > 0.0) {
        return Err(Error::invalid("explained variance > 0 needs at least 2 clusters"));
    }
    let mut rng = stream_rng(seed, STREAM_MEANS);
    let mut m = Array2::zeros((n, e.len()));
    let mut eta = vec![0.0; g];
    for (j, &ej) in e.iter().enumerate() {
        let mut tries = 0;
        let (mean, sd) = loop {
            eta.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
            if ej == 0.0 {
                break (0.0, 0.0);
            }
            let col = truth.labels().iter().map(|&l| eta[l - 1]);
            let mean = col.clone().sum::<f64>() / n as f64;
            let ss: f64 = col.map(|x| (x - mean) * (x - mean)).sum();
            let sd = (ss / (n - 1) as f64).sqrt();
            if sd > 0.0 {
                break (mean, sd);
            }
            tries += 1;
            if tries >= MAX_REDRAWS {
                return Err(Error::Numerical(format!("mean column {j} stayed constant after {MAX_REDRAWS} draws")));
            }
        };
        if ej == 0.0 {
            continue;
        }
        let scale = ej.sqrt() / sd;
        for (i, &l) in truth.labels().iter().enumerate() {
            m[(i, j)] = (eta[l - 1] - mean) * scale;
        }
    }
    Ok(m)
}

/// `Sigma_ij = sqrt((1 - E_i)(1 - E_j)) * R_ij` for the scenario's
/// correlation matrix `R`, with the diagonal set to exactly `1 - E_j`.
pub fn simulate_covariance(e: &[f64], scenario: &Correlation, seed: u64) -> Result<Array2<f64>> {
    let p = e.len();
    let r = match scenario {
        Correlation::Independent => Array2::eye(p),
        Correlation::BlockGraph(b) => block_graph_correlation(p, b, seed)?,
    };
    let mut sigma = Array2::from_shape_fn((p, p), |(i, j)| ((1.0 - e[i]) * (1.0 - e[j])).sqrt() * r[(i, j)]);
    for j in 0..p {
        sigma[(j, j)] = 1.0 - e[j];
    }
    Ok(sigma)
}

/// Contiguous blocks of attributes, each linked by a random recursive tree
/// plus random extra edges, turned into a diagonally dominant precision
/// matrix and inverted. Attributes in different blocks are uncorrelated.
pub fn block_graph_correlation(p: usize, b: &BlockGraph, seed: u64) -> Result<Array2<f64>> {
    let mut rng = stream_rng(seed, STREAM_COVARIANCE);
    let mut r = Array2::zeros((p, p));
    let mut start = 0;
    while start < p {
        let size = rng.random_range(b.min_block..=b.max_block).min(p - start);
        let mut adj = vec![vec![false; size]; size];
        for k in 1..size {
            let parent = rng.random_range(0..k);
            adj[k][parent] = true;
            adj[parent][k] = true;
        }
        for i in 0..size {
            for j in (i + 1)..size {
                if !adj[i][j] && rng.random_bool(b.extra_edge_prob) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
            }
        }
        let mut omega = DMatrix::<f64>::zeros(size, size);
        for i in 0..size {
            let mut abs_sum = 0.0;
            for j in 0..size {
                if adj[i][j] {
                    omega[(i, j)] = -b.v;
                    abs_sum += b.v;
                }
            }
            omega[(i, i)] = abs_sum + b.delta;
        }
        let cov = omega
            .cholesky()
            .ok_or_else(|| Error::Numerical("block precision matrix is not positive definite".into()))?
            .inverse();
        for i in 0..size {
            r[(start + i, start + i)] = 1.0;
            for j in (i + 1)..size {
                let c = 0.5 * (cov[(i, j)] + cov[(j, i)]) / (cov[(i, i)] * cov[(j, j)]).sqrt();
                r[(start + i, start + j)] = c;
                r[(start + j, start + i)] = c;
            }
        }
        start += size;
    }
    Ok(r)
}

/// Lower factor `L` with `L L^T = sigma`, clipping eigenvalues when the
/// Cholesky factorisation fails.
fn noise_factor(sigma: &Array2<f64>) -> DMatrix<f64> {
    let p = sigma.nrows();
    let s = DMatrix::from_fn(p, p, |i, j| sigma[(i, j)]);
    if let Some(ch) = s.clone().cholesky() {
        return ch.l();
    }
    log::warn!("covariance is not numerically positive definite, clipping eigenvalues at {EIGEN_FLOOR:e}");
    let eig = SymmetricEigen::new(s);
    let root = eig.eigenvalues.map(|l| l.max(EIGEN_FLOOR).sqrt());
    eig.eigenvectors * DMatrix::from_diagonal(&root)
}

pub fn simulate_dataset(spec: &SimulationSpec) -> Result<SimulatedDataset> {
    spec.validate()?;
    let truth = spec.truth()?;
    let e = &spec.explained_variance;
    let (n, p) = (spec.n(), spec.p());
    let means = simulate_means(&truth, e, spec.seed)?;
    let sigma = simulate_covariance(e, &spec.correlation, spec.seed)?;
    let l = noise_factor(&sigma);
    let mut rng = stream_rng(spec.seed, STREAM_NOISE);
    let mut values = means.clone();
    let mut z = vec![0.0; p];
    for i in 0..n {
        z.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
        for a in 0..p {
            let mut eps = 0.0;
            for b in 0..p {
                eps += l[(a, b)] * z[b];
            }
            values[(i, a)] += eps;
        }
    }
    let item_ids = (1..=n).map(|i| format!("item{i}")).collect();
    let attribute_ids = (1..=p).map(|j| format!("var{j}")).collect();
    let data = DataMatrix::new(values, item_ids, attribute_ids)?;
    let contributing = (0..p).filter(|&j| e[j] > 0.0).collect();
    Ok(SimulatedDataset { data, truth, means, sigma, contributing })
}
