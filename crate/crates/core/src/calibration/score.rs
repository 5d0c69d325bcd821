use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignment;
use crate::consensus::ComembershipCounts;
use crate::{Error, Result};

/// Co-membership totals split by whether a pair shares a stable cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WithinBetweenTallies {
    /// `sum_{i<j} C_ij [Z_i = Z_j]`
    pub x_within: u64,
    /// `sum_{i<j} C_ij [Z_i != Z_j]`
    pub x_between: u64,
    /// `sum_{i<j} H_ij [Z_i = Z_j]`
    pub n_within: u64,
    /// `sum_{i<j} H_ij [Z_i != Z_j]`
    pub n_between: u64,
}

pub fn tally(c: &ComembershipCounts, h: &Array2<u32>, z: &ClusterAssignment) -> Result<WithinBetweenTallies> {
    let n = h.nrows();
    if c.c.dim() != h.dim() {
        return Err(Error::Dimension { expected: n, found: c.c.nrows() });
    }
    if z.n() != n {
        return Err(Error::Dimension { expected: n, found: z.n() });
    }
    let mut t = WithinBetweenTallies::default();
    for i in 0..n {
        for j in (i + 1)..n {
            let (cij, hij) = (u64::from(c.c[(i, j)]), u64::from(h[(i, j)]));
            if z.same(i, j) {
                t.x_within += cij;
                t.n_within += hij;
            } else {
                t.x_between += cij;
                t.n_between += hij;
            }
        }
    }
    Ok(t)
}

/// Two-proportion z statistic
/// `(p_w - p_b) / sqrt(p_0 (1 - p_0) (1/N_w + 1/N_b))`.
///
/// Returns `None` when it is undefined: no within or no between pairs, or a
/// pooled proportion of exactly 0 or 1.
pub fn consensus_score_or_none(t: &WithinBetweenTallies) -> Option<f64> {
    if t.n_within == 0 || t.n_between == 0 {
        return None;
    }
    let x = t.x_within + t.x_between;
    let total = t.n_within + t.n_between;
    if x == 0 || x == total {
        return None;
    }
    let (xw, xb, nw, nb) = (t.x_within as f64, t.x_between as f64, t.n_within as f64, t.n_between as f64);
    let p0 = x as f64 / total as f64;
    let num = xw / nw - xb / nb;
    let den = (p0 * (1.0 - p0) * (1.0 / nw + 1.0 / nb)).sqrt();
    Some(num / den)
}

/// [`consensus_score_or_none`] with `-inf` standing for undefined cells.
pub fn consensus_score(t: &WithinBetweenTallies) -> f64 {
    consensus_score_or_none(t).unwrap_or(f64::NEG_INFINITY)
}
