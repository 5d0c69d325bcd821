use super::ClusterAssignment;
use crate::distance::DistanceMatrix;
use crate::{Error, Result};

/// Outcome of [`pam`].
#[derive(Debug, Clone)]
pub struct PamFit {
    pub assignment: ClusterAssignment,
    /// Medoid item indices, in the order BUILD selected their slots.
    pub medoids: Vec<usize>,
    pub build_cost: f64,
    pub cost: f64,
    /// Cost after BUILD and after each accepted swap; strictly decreasing.
    pub trace: Vec<f64>,
}

/// Total distance of every item to its nearest medoid.
pub fn pam_cost(dist: &DistanceMatrix, medoids: &[usize]) -> f64 {
    (0..dist.n())
        .map(|i| medoids.iter().map(|&m| dist.get(i, m)).fold(f64::INFINITY, f64::min))
        .sum()
}

/// Partitioning around medoids: greedy BUILD followed by best-improvement
/// SWAP until no swap lowers the cost. BUILD is deterministic, so `_seed`
/// has no effect; ties go to the lowest index.
pub fn pam(dist: &DistanceMatrix, g: usize, _seed: u64) -> Result<PamFit> {
    let n = dist.n();
    if g < 1 || g > n {
        return Err(Error::invalid(format!("cannot partition {n} items around {g} medoids")));
    }
    // BUILD
    let mut medoids = Vec::with_capacity(g);
    let mut nearest = vec![f64::INFINITY; n];
    for _ in 0..g {
        let mut best = (f64::INFINITY, usize::MAX);
        for c in (0..n).filter(|c| !medoids.contains(c)) {
            let total: f64 = (0..n).map(|i| nearest[i].min(dist.get(i, c))).sum();
            if total < best.0 {
                best = (total, c);
            }
        }
        medoids.push(best.1);
        for (i, v) in nearest.iter_mut().enumerate() {
            *v = v.min(dist.get(i, best.1));
        }
    }
    let build_cost: f64 = nearest.iter().sum();

    // SWAP
    let mut cost = build_cost;
    let mut trace = vec![cost];
    loop {
        let (first, second) = nearest_two(dist, &medoids);
        let mut best = (0.0, usize::MAX, usize::MAX);
        for (slot, &m) in medoids.iter().enumerate() {
            for o in (0..n).filter(|o| !medoids.contains(o)) {
                let delta: f64 = (0..n)
                    .map(|i| {
                        let d_io = dist.get(i, o);
                        let current = dist.get(i, medoids[first[i]]);
                        if medoids[first[i]] == m {
                            d_io.min(second[i]) - current
                        } else {
                            d_io.min(current) - current
                        }
                    })
                    .sum();
                if delta < best.0 {
                    best = (delta, slot, o);
                }
            }
        }
        if best.1 == usize::MAX {
            break;
        }
        let mut candidate = medoids.clone();
        candidate[best.1] = best.2;
        let new_cost = pam_cost(dist, &candidate);
        // Guard against accepting a rounding-level "improvement" forever.
        if !(new_cost < cost - 1e-12 * cost.abs().max(1.0)) {
            break;
        }
        medoids = candidate;
        cost = new_cost;
        trace.push(cost);
    }

    let labels: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = 0;
            for s in 1..g {
                if dist.get(i, medoids[s]) < dist.get(i, medoids[best]) {
                    best = s;
                }
            }
            best
        })
        .collect();
    Ok(PamFit {
        assignment: ClusterAssignment::from_raw(&labels)?,
        medoids,
        build_cost,
        cost,
        trace,
    })
}

/// Slot of the nearest medoid and distance to the second nearest, per item.
fn nearest_two(dist: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, Vec<f64>) {
    let n = dist.n();
    let mut first = vec![0; n];
    let mut second = vec![f64::INFINITY; n];
    for i in 0..n {
        let mut d1 = f64::INFINITY;
        for (s, &m) in medoids.iter().enumerate() {
            let v = dist.get(i, m);
            if v < d1 {
                second[i] = d1;
                d1 = v;
                first[i] = s;
            } else if v < second[i] {
                second[i] = v;
            }
        }
    }
    (first, second)
}
