use serde::{Deserialize, Serialize};

use super::ClusterAssignment;
use crate::distance::DistanceMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Linkage {
    #[default]
    Complete,
    Average,
    Single,
}

impl Linkage {
    /// Lance-Williams update of the distance from cluster `k` to the union of
    /// clusters `i` and `j`.
    #[inline]
    fn update(self, d_ki: f64, d_kj: f64, n_i: usize, n_j: usize) -> f64 {
        match self {
            Linkage::Single => d_ki.min(d_kj),
            Linkage::Complete => d_ki.max(d_kj),
            Linkage::Average => {
                let (a, b) = (n_i as f64, n_j as f64);
                (a * d_ki + b * d_kj) / (a + b)
            }
        }
    }
}

/// One agglomeration step. Node ids follow the usual convention: leaves are
/// `0..n`, the cluster created by merge `t` is `n + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    n: usize,
    linkage: Linkage,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linkage(&self) -> Linkage {
        self.linkage
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }
}

/// Agglomerative clustering. Among candidate merges at equal height the pair
/// of clusters with the smallest `(min item, min item)` is merged first.
///
/// Each active cluster lives in the slot of its smallest item; for every slot
/// we cache the nearest active slot above it, so a merge only rescans the rows
/// whose cached neighbour was touched.
pub fn hierarchical(dist: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = dist.n();
    if n < 2 {
        return Err(Error::invalid(format!("hierarchical clustering needs at least 2 items, got {n}")));
    }
    let mut d: Vec<f64> = dist.view().iter().copied().collect();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node = (0..n).collect::<Vec<_>>();
    let mut nn = vec![usize::MAX; n];
    let mut nn_dist = vec![f64::INFINITY; n];

    let rescan = |i: usize, d: &[f64], active: &[bool], nn: &mut [usize], nn_dist: &mut [f64]| {
        nn[i] = usize::MAX;
        nn_dist[i] = f64::INFINITY;
        for j in (i + 1)..n {
            if active[j] && d[i * n + j] < nn_dist[i] {
                nn_dist[i] = d[i * n + j];
                nn[i] = j;
            }
        }
    };
    for i in 0..n {
        rescan(i, &d, &active, &mut nn, &mut nn_dist);
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..(n - 1) {
        let mut a = usize::MAX;
        for i in 0..n {
            if active[i] && nn[i] != usize::MAX && (a == usize::MAX || nn_dist[i] < nn_dist[a]) {
                a = i;
            }
        }
        let b = nn[a];
        let height = nn_dist[a];
        merges.push(Merge {
            left: node[a].min(node[b]),
            right: node[a].max(node[b]),
            height,
            size: size[a] + size[b],
        });

        for k in 0..n {
            if active[k] && k != a && k != b {
                let v = linkage.update(d[k * n + a], d[k * n + b], size[a], size[b]);
                d[k * n + a] = v;
                d[a * n + k] = v;
            }
        }
        active[b] = false;
        size[a] += size[b];
        node[a] = n + step;

        for i in 0..b {
            if !active[i] {
                continue;
            }
            if i == a || nn[i] == a || nn[i] == b {
                rescan(i, &d, &active, &mut nn, &mut nn_dist);
            } else if i < a {
                let v = d[i * n + a];
                if v < nn_dist[i] || (v == nn_dist[i] && a < nn[i]) {
                    nn_dist[i] = v;
                    nn[i] = a;
                }
            }
        }
    }
    Ok(Dendrogram { n, linkage, merges })
}

/// Cuts the dendrogram into `g` clusters by applying its first `n - g`
/// merges; labels are numbered by first occurrence.
pub fn cut(dendro: &Dendrogram, g: usize) -> Result<ClusterAssignment> {
    let n = dendro.n;
    if g < 1 || g > n {
        return Err(Error::invalid(format!("cannot cut {n} items into {g} clusters")));
    }
    let mut parent: Vec<usize> = (0..(2 * n - 1)).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (t, m) in dendro.merges.iter().take(n - g).enumerate() {
        let (l, r) = (find(&mut parent, m.left), find(&mut parent, m.right));
        parent[l] = n + t;
        parent[r] = n + t;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    ClusterAssignment::from_raw(&roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn line(points: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_fn(points.len(), |i, j| (points[i] - points[j]).abs()).unwrap()
    }

    #[test]
    fn three_points_on_a_line() {
        let d = line(&[0.0, 1.0, 10.0]);
        let tree = hierarchical(&d, Linkage::Complete).unwrap();
        let m = tree.merges();
        assert_eq!((m[0].left, m[0].right, m[0].height), (0, 1, 1.0));
        assert_eq!((m[1].left, m[1].right, m[1].height), (2, 3, 10.0));
        assert_eq!(cut(&tree, 2).unwrap().labels(), &[1, 1, 2]);
        assert_eq!(cut(&tree, 3).unwrap().labels(), &[1, 2, 3]);
        assert_eq!(cut(&tree, 1).unwrap().labels(), &[1, 1, 1]);
        assert!(cut(&tree, 0).is_err());
        assert!(cut(&tree, 4).is_err());
    }

    #[test]
    fn equal_distances_merge_lowest_pair_first() {
        let d = DistanceMatrix::from_fn(5, |_, _| 1.0).unwrap();
        for linkage in [Linkage::Complete, Linkage::Average, Linkage::Single] {
            let tree = hierarchical(&d, linkage).unwrap();
            let m = tree.merges();
            assert_eq!((m[0].left, m[0].right), (0, 1));
            assert_eq!((m[1].left, m[1].right), (2, 5));
            assert_eq!((m[2].left, m[2].right), (3, 6));
            for g in 1..=5 {
                assert_eq!(cut(&tree, g).unwrap().g(), g);
            }
            assert_eq!(cut(&tree, 3).unwrap().labels(), &[1, 1, 1, 2, 3]);
        }
    }

    #[test]
    fn linkages_differ_as_expected() {
        // Chain 0-1-2 with a far point 3.
        let d = DistanceMatrix::from_array(array![
            [0.0, 1.0, 2.0, 6.0],
            [1.0, 0.0, 1.5, 5.0],
            [2.0, 1.5, 0.0, 3.0],
            [6.0, 5.0, 3.0, 0.0]
        ])
        .unwrap();
        let single = hierarchical(&d, Linkage::Single).unwrap();
        assert_eq!(single.merges()[1].height, 1.5);
        let complete = hierarchical(&d, Linkage::Complete).unwrap();
        assert_eq!(complete.merges()[1].height, 2.0);
        let average = hierarchical(&d, Linkage::Average).unwrap();
        assert_eq!(average.merges()[1].height, 1.75);
        assert_eq!(average.merges()[2].height, (6.0 + 5.0 + 3.0) / 3.0);
    }

    #[test]
    fn too_few_items() {
        let d = DistanceMatrix::from_fn(1, |_, _| 0.0).unwrap();
        assert!(hierarchical(&d, Linkage::Complete).is_err());
    }
}
