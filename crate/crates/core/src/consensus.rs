//! Subsampling, co-membership accounting and consensus matrices.
//!
//! `H_ij` counts the subsamples containing both `i` and `j`; `C_ij(lambda, G)`
//! counts those in which they were also clustered together. The consensus
//! matrix is the ratio `Gamma_ij = C_ij / H_ij`. The same subsamples are used
//! for every `(lambda, G)`, so `H` is computed once.

use ndarray::Array2;
use rand::seq::index;
use rayon::prelude::*;

use crate::cluster::{cut, hierarchical, ClusterAssignment, Linkage};
use crate::distance::DistanceMatrix;
use crate::seed::stream_rng;
use crate::{Error, Result};

/// `K` item subsets drawn without replacement, plus the co-sampling counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleSet {
    n: usize,
    tau: f64,
    master_seed: u64,
    subsamples: Vec<Vec<usize>>,
    h: Array2<u32>,
}

impl SubsampleSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.subsamples.len()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Sorted item indices of subsample `k`.
    pub fn subsample(&self, k: usize) -> &[usize] {
        &self.subsamples[k]
    }

    pub fn subsamples(&self) -> &[Vec<usize>] {
        &self.subsamples
    }

    /// Co-sampling counts `H`.
    pub fn h(&self) -> &Array2<u32> {
        &self.h
    }

    /// Builds a set from explicit subsamples (indices must be distinct and
    /// below `n`).
    pub fn from_subsamples(n: usize, subsamples: Vec<Vec<usize>>) -> Result<Self> {
        let mut h = Array2::zeros((n, n));
        let mut sorted = Vec::with_capacity(subsamples.len());
        for mut s in subsamples {
            s.sort_unstable();
            s.dedup();
            if s.last().is_some_and(|&i| i >= n) {
                return Err(Error::invalid("subsample index out of range"));
            }
            for (a, &i) in s.iter().enumerate() {
                for &j in &s[a..] {
                    h[(i, j)] += 1;
                    if i != j {
                        h[(j, i)] += 1;
                    }
                }
            }
            sorted.push(s);
        }
        let tau = sorted.first().map_or(0.0, |s| s.len() as f64 / n as f64);
        Ok(Self { n, tau, master_seed: 0, subsamples: sorted, h })
    }
}

/// Subsample size `floor(tau * n)`.
pub fn subsample_size(n: usize, tau: f64) -> usize {
    (tau * n as f64 + 1e-9).floor() as usize
}

/// Draws `k` uniform subsets of size `floor(tau * n)`. Subsample `i` uses
/// its own generator seeded from `(master_seed, i)`.
pub fn draw_subsamples(n: usize, k: usize, tau: f64, master_seed: u64) -> Result<SubsampleSet> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::invalid(format!("tau must lie in (0, 1], got {tau}")));
    }
    if k == 0 {
        return Err(Error::invalid("need at least one subsample"));
    }
    let m = subsample_size(n, tau);
    if m < 2 {
        return Err(Error::invalid(format!(
            "subsample size floor({tau} * {n}) = {m} is below 2"
        )));
    }
    let subsamples = (0..k)
        .map(|i| {
            let mut rng = stream_rng(master_seed, i as u64);
            index::sample(&mut rng, n, m).into_vec()
        })
        .collect();
    let mut set = SubsampleSet::from_subsamples(n, subsamples)?;
    set.tau = tau;
    set.master_seed = master_seed;
    Ok(set)
}

/// Co-membership counts `C` for one `(lambda, G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComembershipCounts {
    pub c: Array2<u32>,
    pub lambda: f64,
    pub g: usize,
}

/// Runs `f` on every subsample in parallel and returns the outputs in
/// subsample order. The first failing subsample (by index) aborts the run.
pub fn cluster_subsamples<T, F>(set: &SubsampleSet, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &[usize]) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = set
        .subsamples
        .par_iter()
        .enumerate()
        .map(|(k, items)| f(k, items))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|e| Error::Subsample { index, source: Box::new(e) }))
        .collect()
}

/// Sums co-membership over subsamples. `clusterings[k]` labels the items of
/// subsample `k` in their sorted order.
pub fn count_comembership(
    set: &SubsampleSet,
    clusterings: &[&ClusterAssignment],
    lambda: f64,
    g: usize,
) -> Result<ComembershipCounts> {
    if clusterings.len() != set.k() {
        return Err(Error::Dimension { expected: set.k(), found: clusterings.len() });
    }
    let n = set.n;
    let mut c = Array2::<u32>::zeros((n, n));
    for (items, z) in set.subsamples.iter().zip(clusterings) {
        if z.n() != items.len() {
            return Err(Error::Dimension { expected: items.len(), found: z.n() });
        }
        let labels = z.labels();
        for a in 0..items.len() {
            for b in (a + 1)..items.len() {
                if labels[a] == labels[b] {
                    c[(items[a], items[b])] += 1;
                }
            }
        }
    }
    for i in 0..n {
        c[(i, i)] = set.h[(i, i)];
        for j in (i + 1)..n {
            c[(j, i)] = c[(i, j)];
        }
    }
    Ok(ComembershipCounts { c, lambda, g })
}

/// Steps 2-4 for one `lambda`: cluster every subsample once (returning one
/// assignment per entry of `g_grid`) and accumulate `C` for each `G`.
pub fn accumulate_comembership<F>(
    set: &SubsampleSet,
    cluster_fn: F,
    g_grid: &[usize],
    lambda: f64,
) -> Result<Vec<ComembershipCounts>>
where
    F: Fn(usize, &[usize]) -> Result<Vec<ClusterAssignment>> + Sync,
{
    let per_subsample = cluster_subsamples(set, |k, items| {
        let zs = cluster_fn(k, items)?;
        if zs.len() != g_grid.len() {
            return Err(Error::Dimension { expected: g_grid.len(), found: zs.len() });
        }
        Ok(zs)
    })?;
    g_grid
        .iter()
        .enumerate()
        .map(|(gi, &g)| {
            let column: Vec<&ClusterAssignment> = per_subsample.iter().map(|zs| &zs[gi]).collect();
            count_comembership(set, &column, lambda, g)
        })
        .collect()
}

/// Hierarchical clustering of a subsample cut at every `G` of the grid.
pub fn hierarchical_cuts(dist: &DistanceMatrix, linkage: Linkage, g_grid: &[usize]) -> Result<Vec<ClusterAssignment>> {
    let tree = hierarchical(dist, linkage)?;
    g_grid.iter().map(|&g| cut(&tree, g)).collect()
}

/// Consensus matrix `Gamma = C / H`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusMatrix {
    gamma: Array2<f64>,
    /// Off-diagonal pairs `i < j` never sampled together; their entry is 0.
    uncovered: Vec<(usize, usize)>,
}

impl ConsensusMatrix {
    pub fn view(&self) -> ndarray::ArrayView2<'_, f64> {
        self.gamma.view()
    }

    pub fn n(&self) -> usize {
        self.gamma.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.gamma[(i, j)]
    }

    pub fn uncovered(&self) -> &[(usize, usize)] {
        &self.uncovered
    }

    /// Off-diagonal entries `Gamma_ij`, `i < j`.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n();
        let mut v = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                v.push(self.gamma[(i, j)]);
            }
        }
        v
    }

    /// `1 - Gamma` with a zero diagonal.
    pub fn to_distance(&self) -> Result<DistanceMatrix> {
        DistanceMatrix::from_fn(self.n(), |i, j| 1.0 - self.gamma[(i, j)])
    }
}

/// Elementwise `C / H`; pairs with `H_ij = 0` are set to 0 and reported.
pub fn consensus_matrix(c: &ComembershipCounts, h: &Array2<u32>) -> Result<ConsensusMatrix> {
    if c.c.dim() != h.dim() {
        return Err(Error::Dimension { expected: h.nrows(), found: c.c.nrows() });
    }
    if let Some(((i, j), _)) = c.c.indexed_iter().find(|&(ix, &v)| v > h[ix]) {
        return Err(Error::invalid(format!("co-membership count exceeds co-sampling count at ({i}, {j})")));
    }
    let n = h.nrows();
    let mut uncovered = Vec::new();
    let gamma = Array2::from_shape_fn((n, n), |(i, j)| {
        let hij = h[(i, j)];
        if hij == 0 {
            if i < j {
                uncovered.push((i, j));
            }
            0.0
        } else {
            f64::from(c.c[(i, j)]) / f64::from(hij)
        }
    });
    Ok(ConsensusMatrix { gamma, uncovered })
}

/// Step 6: hierarchical clustering on `1 - Gamma`, cut at `G`.
pub fn stable_clusters(gamma: &ConsensusMatrix, g: usize, linkage: Linkage) -> Result<ClusterAssignment> {
    let tree = hierarchical(&gamma.to_distance()?, linkage)?;
    cut(&tree, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{pairwise_distance, DataMatrix, Metric};
    use ndarray::array;

    #[test]
    fn full_subsamples_cover_everything() {
        let set = draw_subsamples(7, 5, 1.0, 3).unwrap();
        assert!(set.h().iter().all(|&v| v == 5));
        assert!(set.subsamples().iter().all(|s| s == &(0..7).collect::<Vec<_>>()));
    }

    #[test]
    fn single_subsample_counts() {
        let set = SubsampleSet::from_subsamples(3, vec![vec![1, 0]]).unwrap();
        assert_eq!(set.h(), &array![[1u32, 1, 0], [1, 1, 0], [0, 0, 0]]);
    }

    #[test]
    fn co_inclusion_rate_matches_hypergeometric() {
        // P(i, j both drawn) = m(m-1) / (n(n-1)) = 5*4/(10*9).
        let (n, k) = (10, 100);
        let set = draw_subsamples(n, k, 0.5, 42).unwrap();
        let p = 5.0 * 4.0 / (10.0 * 9.0);
        let expected = k as f64 * p;
        let sd = (k as f64 * p * (1.0 - p)).sqrt();
        let mut sum = 0.0;
        for i in 0..n {
            assert_eq!(set.h()[(i, i)] as usize, set.subsamples().iter().filter(|s| s.contains(&i)).count());
            for j in (i + 1)..n {
                let hij = f64::from(set.h()[(i, j)]);
                assert_eq!(set.h()[(i, j)], set.h()[(j, i)]);
                assert!((hij - expected).abs() < 4.0 * sd, "H[{i},{j}] = {hij}");
                sum += hij;
            }
        }
        // Every subsample contributes exactly m(m-1)/2 pairs, so the mean is exact.
        let mean = sum / 45.0;
        assert!((mean - expected).abs() < 1e-9, "{mean} vs {expected}");
        assert!((expected - 22.2).abs() < 0.1);
    }

    #[test]
    fn subsample_draws_are_reproducible_and_validated() {
        assert_eq!(draw_subsamples(20, 10, 0.5, 9).unwrap(), draw_subsamples(20, 10, 0.5, 9).unwrap());
        assert_ne!(draw_subsamples(20, 10, 0.5, 9).unwrap(), draw_subsamples(20, 10, 0.5, 10).unwrap());
        assert!(draw_subsamples(3, 10, 0.5, 0).is_err());
        assert!(draw_subsamples(10, 10, 0.0, 0).is_err());
        assert!(draw_subsamples(10, 10, 1.5, 0).is_err());
        assert!(draw_subsamples(10, 0, 0.5, 0).is_err());
    }

    fn blobs() -> DataMatrix {
        DataMatrix::from_values(array![[0.0, 0.0], [0.3, 0.1], [0.1, 0.4], [5.0, 5.0], [5.2, 4.9], [4.8, 5.3]]).unwrap()
    }

    fn hier_fn<'a>(data: &'a DataMatrix, grid: &'a [usize]) -> impl Fn(usize, &[usize]) -> Result<Vec<ClusterAssignment>> + Sync + 'a {
        move |_, items| {
            let rows = data.values().select(ndarray::Axis(0), items);
            let sub = DataMatrix::from_values(rows)?;
            hierarchical_cuts(&pairwise_distance(&sub, Metric::Euclidean)?, Linkage::Complete, grid)
        }
    }

    #[test]
    fn extreme_grid_values() {
        let data = blobs();
        let set = draw_subsamples(6, 20, 0.5, 1).unwrap();
        let grid = [1, 3];
        let counts = accumulate_comembership(&set, hier_fn(&data, &grid), &grid, 0.0).unwrap();
        assert_eq!(&counts[0].c, set.h());
        let singles = &counts[1].c;
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { set.h()[(i, i)] } else { 0 };
                assert_eq!(singles[(i, j)], want);
            }
        }
    }

    #[test]
    fn counts_match_recount_of_logged_assignments() {
        let data = blobs();
        let set = draw_subsamples(6, 20, 0.5, 2).unwrap();
        let grid = [2];
        let f = hier_fn(&data, &grid);
        let logged = cluster_subsamples(&set, |k, items| f(k, items)).unwrap();
        let counts = accumulate_comembership(&set, &f, &grid, 0.0).unwrap();
        let mut oracle = Array2::<u32>::zeros((6, 6));
        for (items, zs) in set.subsamples().iter().zip(&logged) {
            for (a, &i) in items.iter().enumerate() {
                for (b, &j) in items.iter().enumerate() {
                    if i == j || zs[0].labels()[a] == zs[0].labels()[b] {
                        oracle[(i, j)] += 1;
                    }
                }
            }
        }
        assert_eq!(counts[0].c, oracle);
        for ((i, j), &v) in counts[0].c.indexed_iter() {
            assert!(v <= set.h()[(i, j)]);
        }
    }

    #[test]
    fn failing_subsample_is_reported() {
        let set = draw_subsamples(10, 5, 0.5, 0).unwrap();
        let err = cluster_subsamples(&set, |k, _| if k >= 3 { Err(Error::Numerical("boom".into())) } else { Ok(()) }).unwrap_err();
        match err {
            Error::Subsample { index, .. } => assert_eq!(index, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn gamma_ratios_and_conventions() {
        let h = array![[26u32, 26, 0], [26, 26, 4], [0, 4, 30]];
        let c = ComembershipCounts { c: array![[26u32, 13, 0], [13, 26, 0], [0, 0, 30]], lambda: 0.0, g: 2 };
        let gamma = consensus_matrix(&c, &h).unwrap();
        assert_eq!(gamma.get(0, 1), 0.5);
        assert_eq!(gamma.get(1, 2), 0.0);
        assert_eq!(gamma.get(0, 0), 1.0);
        assert_eq!(gamma.uncovered(), &[(0, 2)]);
        let over = ComembershipCounts { c: array![[26u32, 27, 0], [27, 26, 0], [0, 0, 30]], lambda: 0.0, g: 2 };
        assert!(consensus_matrix(&over, &h).is_err());

        let all = ComembershipCounts { c: h.clone(), lambda: 0.0, g: 1 };
        let g1 = consensus_matrix(&all, &h).unwrap();
        assert!(g1.view().iter().enumerate().all(|(k, &v)| v == 1.0 || k == 2 || k == 6));
    }

    #[test]
    fn stable_clusters_recover_blocks() {
        let block = |i: usize| usize::from(i >= 3);
        let binary = ConsensusMatrix {
            gamma: Array2::from_shape_fn((6, 6), |(i, j)| if block(i) == block(j) { 1.0 } else { 0.0 }),
            uncovered: vec![],
        };
        assert_eq!(stable_clusters(&binary, 2, Linkage::Complete).unwrap().labels(), &[1, 1, 1, 2, 2, 2]);
        let noisy = ConsensusMatrix {
            gamma: Array2::from_shape_fn((6, 6), |(i, j)| {
                if i == j {
                    1.0
                } else if block(i) == block(j) {
                    0.9
                } else {
                    0.1
                }
            }),
            uncovered: vec![],
        };
        for linkage in [Linkage::Complete, Linkage::Average, Linkage::Single] {
            assert_eq!(stable_clusters(&noisy, 2, linkage).unwrap().labels(), &[1, 1, 1, 2, 2, 2]);
        }
        let ones = ConsensusMatrix { gamma: Array2::ones((4, 4)), uncovered: vec![] };
        assert_eq!(stable_clusters(&ones, 1, Linkage::Complete).unwrap().labels(), &[1, 1, 1, 1]);
    }
}
