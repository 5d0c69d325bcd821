//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wcc::calibration::{consensus_score_or_none, WithinBetweenTallies};
use wcc::cluster::{cut, hierarchical, pam, pam_cost, ClusterAssignment, Linkage};
use wcc::distance::DistanceMatrix;
use wcc::metrics::{ari, pair_confusion};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn canonical(z: &[usize]) -> ClusterAssignment {
    ClusterAssignment::from_raw(z).unwrap()
}

/// Random distances in (0, 1): ties have probability zero.
pub fn random_distances(rng: &mut impl Rng, n: usize) -> DistanceMatrix {
    DistanceMatrix::from_fn(n, |_, _| rng.random_range(1e-6..1.0)).unwrap()
}

/// Euclidean distances between random points in the plane.
pub fn planar_distances(rng: &mut impl Rng, n: usize) -> DistanceMatrix {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    DistanceMatrix::from_fn(n, |i, j| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()).unwrap()
}

fn cluster_distance(d: &DistanceMatrix, a: &[usize], b: &[usize], linkage: Linkage) -> f64 {
    let pairs = a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j)));
    match linkage {
        Linkage::Single => pairs.map(|(i, j)| d.get(i, j)).fold(f64::INFINITY, f64::min),
        Linkage::Complete => pairs.map(|(i, j)| d.get(i, j)).fold(f64::NEG_INFINITY, f64::max),
        Linkage::Average => pairs.map(|(i, j)| d.get(i, j)).sum::<f64>() / (a.len() * b.len()) as f64,
    }
}

/// Agglomeration straight from the linkage definitions. Returns the
/// partition into `g` clusters at index `g - 1`.
pub fn naive_agglomeration(d: &DistanceMatrix, linkage: Linkage) -> Vec<ClusterAssignment> {
    let n = d.n();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut out = vec![None; n];
    let label = |clusters: &[Vec<usize>]| {
        let mut z = vec![0; n];
        for (c, members) in clusters.iter().enumerate() {
            for &i in members {
                z[i] = c;
            }
        }
        canonical(&z)
    };
    out[n - 1] = Some(label(&clusters));
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let h = cluster_distance(d, &clusters[a], &clusters[b], linkage);
                if h < best.0 {
                    best = (h, a, b);
                }
            }
        }
        let (_, a, b) = best;
        let merged = clusters.remove(b);
        clusters[a].extend(merged);
        out[clusters.len() - 1] = Some(label(&clusters));
    }
    out.into_iter().map(Option::unwrap).collect()
}

/// Index of the first cut at which the fast and naive partitions differ.
pub fn first_cut_mismatch(d: &DistanceMatrix, linkage: Linkage) -> Option<usize> {
    let dendro = hierarchical(d, linkage).unwrap();
    let naive = naive_agglomeration(d, linkage);
    (1..=d.n()).find(|&g| canonical(cut(&dendro, g).unwrap().labels()) != naive[g - 1])
}

/// Smallest cost over every pair of medoids.
pub fn exhaustive_pam2(d: &DistanceMatrix) -> f64 {
    let n = d.n();
    let mut best = f64::INFINITY;
    for a in 0..n {
        for b in (a + 1)..n {
            best = best.min(pam_cost(d, &[a, b]));
        }
    }
    best
}

pub fn pam2_gap(d: &DistanceMatrix) -> f64 {
    (pam(d, 2, 0).unwrap().cost - exhaustive_pam2(d)).abs()
}

fn choose2(x: u64) -> f64 {
    (x * x.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index from the contingency table.
pub fn contingency_ari(a: &ClusterAssignment, b: &ClusterAssignment) -> f64 {
    let (ga, gb) = (a.g(), b.g());
    let mut table = vec![vec![0u64; gb]; ga];
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        table[x - 1][y - 1] += 1;
    }
    let index: f64 = table.iter().flatten().map(|&c| choose2(c)).sum();
    let rows: f64 = table.iter().map(|r| choose2(r.iter().sum())).sum();
    let cols: f64 = (0..gb).map(|j| choose2(table.iter().map(|r| r[j]).sum())).sum();
    let expected = rows * cols / choose2(a.n() as u64);
    (index - expected) / (0.5 * (rows + cols) - expected)
}

pub fn random_partition(rng: &mut impl Rng, n: usize, g_max: usize) -> ClusterAssignment {
    let g = rng.random_range(2..=g_max);
    let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..g)).collect();
    canonical(&raw)
}

/// Largest gap between the pair-counting and contingency ARI.
pub fn ari_oracle_gap(pairs: usize, n: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let a = random_partition(&mut r, n, 6);
        let b = random_partition(&mut r, n, 6);
        let fast = ari(&pair_confusion(&a, &b).unwrap());
        worst = worst.max((fast - contingency_ari(&a, &b)).abs());
    }
    worst
}

pub fn tallies(nw: u64, nb: u64, xw: u64, xb: u64) -> WithinBetweenTallies {
    WithinBetweenTallies { x_within: xw, x_between: xb, n_within: nw, n_between: nb }
}

/// Every cell with `1 <= N_w, N_b <= max`, `0 <= X_w <= N_w`, `0 <= X_b <= N_b`.
pub fn score_cells(max: u64) -> impl Iterator<Item = (u64, u64, u64, u64)> {
    (1..=max).flat_map(move |nw| {
        (1..=max).flat_map(move |nb| (0..=nw).flat_map(move |xw| (0..=nb).map(move |xb| (nw, nb, xw, xb))))
    })
}

/// Violations of the upper bound and of its attainment exactly at `(N_w, 0)`.
pub fn score_maximum_violations(max: u64, tol: f64) -> Vec<String> {
    let mut bad = Vec::new();
    for (nw, nb, xw, xb) in score_cells(max) {
        let Some(s) = consensus_score_or_none(&tallies(nw, nb, xw, xb)) else { continue };
        let bound = ((nw + nb) as f64).sqrt();
        let at_corner = (xw, xb) == (nw, 0);
        if s > bound + tol {
            bad.push(format!("({nw},{nb},{xw},{xb}): {s} above {bound}"));
        }
        if at_corner != ((s - bound).abs() <= tol) {
            bad.push(format!("({nw},{nb},{xw},{xb}): {s} vs bound {bound}, corner = {at_corner}"));
        }
    }
    bad
}

/// Adjacent defined cells where the score decreases in X_w or increases in X_b.
pub fn score_monotonicity_violations(max: u64, tol: f64) -> Vec<String> {
    let s = |nw, nb, xw, xb| consensus_score_or_none(&tallies(nw, nb, xw, xb));
    let mut bad = Vec::new();
    for (nw, nb, xw, xb) in score_cells(max) {
        let Some(here) = s(nw, nb, xw, xb) else { continue };
        if xw < nw {
            if let Some(up) = s(nw, nb, xw + 1, xb) {
                if up < here - tol {
                    bad.push(format!("X_w step at ({nw},{nb},{xw},{xb})"));
                }
            }
        }
        if xb < nb {
            if let Some(up) = s(nw, nb, xw, xb + 1) {
                if up > here + tol {
                    bad.push(format!("X_b step at ({nw},{nb},{xw},{xb})"));
                }
            }
        }
    }
    bad
}

/// Cheapest medoid set reachable from `medoids` by replacing one medoid.
pub fn best_single_swap(d: &DistanceMatrix, medoids: &[usize]) -> f64 {
    let mut best = f64::INFINITY;
    for slot in 0..medoids.len() {
        for o in (0..d.n()).filter(|o| !medoids.contains(o)) {
            let mut m = medoids.to_vec();
            m[slot] = o;
            best = best.min(pam_cost(d, &m));
        }
    }
    best
}
