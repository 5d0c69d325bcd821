use crate::cluster::ClusterAssignment;
use crate::distance::DistanceMatrix;
use crate::{Error, Result};

/// Mean silhouette width. Items alone in their cluster score 0, as do items
/// with `a = b = 0`.
pub fn silhouette_score(dist: &DistanceMatrix, z: &ClusterAssignment) -> Result<f64> {
    let n = dist.n();
    if z.n() != n {
        return Err(Error::Dimension { expected: n, found: z.n() });
    }
    let g = z.g();
    if g < 2 {
        return Err(Error::invalid("silhouette needs at least 2 clusters"));
    }
    let sizes = z.sizes();
    let labels = z.labels();
    let mut sums = vec![0.0; g];
    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i] - 1;
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if j != i {
                sums[labels[j] - 1] += dist.get(i, j);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..g)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / n as f64)
}
