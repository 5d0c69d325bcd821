//! The full consensus pipeline over a `(lambda, G)` grid.
//!
//! For every `lambda` each subsample is weighted and clustered once, the
//! clustering is cut at every `G`, and the co-membership counts are turned
//! into a consensus matrix, stable clusters and scores. `lambda = 0` always
//! runs the unweighted path, whatever the method.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{
    calibrate, cdf_scores, consensus_score, silhouette_score, tally, Calibration, CellScores, ScoreGrid, ScoreKind,
    DEFAULT_PAC_BOUNDS,
};
use crate::cluster::{pam, ClusterAssignment, Linkage};
use crate::consensus::{
    accumulate_comembership, consensus_matrix, draw_subsamples, hierarchical_cuts, stable_clusters, subsample_size,
    ComembershipCounts, ConsensusMatrix, SubsampleSet,
};
use crate::distance::cosa::median;
use crate::distance::{
    cosa_distance, fit_cosa_weights, fit_sparse_weights, pairwise_distance, pairwise_rows, sparse_weighted_distance,
    DataMatrix, DistanceMatrix, Kernel, PerAttributeDistance,
};
use crate::{derive_seed, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Unweighted,
    /// One sparse weight vector shared by all items.
    Sparcl,
    /// Item-specific weights (Clustering Objects on Subsets of Attributes).
    Cosa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Hierarchical,
    Pam,
}

macro_rules! parse_enum {
    ($ty:ty, $what:literal, { $($name:literal => $val:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($val),)+
                    other => Err(Error::invalid(format!(concat!("unknown ", $what, " '{}'"), other))),
                }
            }
        }
    };
}

parse_enum!(Method, "method", { "unweighted" => Method::Unweighted, "sparcl" => Method::Sparcl, "cosa" => Method::Cosa });
parse_enum!(Algorithm, "algorithm", { "hierarchical" => Algorithm::Hierarchical, "pam" => Algorithm::Pam });
parse_enum!(Linkage, "linkage", { "complete" => Linkage::Complete, "average" => Linkage::Average, "single" => Linkage::Single });
parse_enum!(Kernel, "kernel", {
    "squared-difference" => Kernel::SquaredDifference,
    "squared" => Kernel::SquaredDifference,
    "absolute-difference" => Kernel::AbsoluteDifference,
    "absolute" => Kernel::AbsoluteDifference,
});

/// `k` points spaced geometrically from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let step = (hi / lo).ln() / (k - 1) as f64;
            (0..k)
                .map(|i| if i + 1 == k { hi } else { lo * (step * i as f64).exp() })
                .collect()
        }
    }
}

impl Method {
    pub fn default_lambda_grid(self) -> Vec<f64> {
        match self {
            Method::Unweighted => vec![0.0],
            Method::Sparcl => geometric_grid(1.1, 10.0, 10),
            Method::Cosa => geometric_grid(0.1, 10.0, 10),
        }
    }
}

/// Settings of one consensus run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub method: Method,
    pub algorithm: Algorithm,
    /// Linkage for clustering the subsamples.
    pub linkage: Linkage,
    /// Linkage for the stable clusters on `1 - Gamma`; defaults to `linkage`.
    pub stable_linkage: Option<Linkage>,
    pub kernel: Kernel,
    /// Number of subsamples.
    pub k: usize,
    /// Subsampling proportion.
    pub tau: f64,
    pub seed: u64,
    pub g_grid: Vec<usize>,
    /// `None` picks the method's default grid.
    pub lambda_grid: Option<Vec<f64>>,
    /// Score used to pick the calibrated cell.
    pub score: ScoreKind,
    pub pac_bounds: (f64, f64),
    pub silhouette: bool,
    /// z-score each attribute before anything else.
    pub standardize: bool,
    /// Worker threads; 0 uses all cores. Never affects results.
    #[serde(skip_serializing)]
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: Method::Unweighted,
            algorithm: Algorithm::Hierarchical,
            linkage: Linkage::Complete,
            stable_linkage: None,
            kernel: Kernel::SquaredDifference,
            k: 100,
            tau: 0.5,
            seed: 1,
            g_grid: (2..=20).collect(),
            lambda_grid: None,
            score: ScoreKind::Consensus,
            pac_bounds: DEFAULT_PAC_BOUNDS,
            silhouette: true,
            standardize: false,
            threads: 0,
        }
    }
}

impl RunConfig {
    /// The lambda grid actually used: `{0}` for the unweighted method.
    pub fn lambdas(&self) -> Vec<f64> {
        match (&self.lambda_grid, self.method) {
            (_, Method::Unweighted) => vec![0.0],
            (Some(g), _) => g.clone(),
            (None, m) => m.default_lambda_grid(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("need at least one subsample"));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::invalid(format!("tau must lie in (0, 1], got {}", self.tau)));
        }
        let m = subsample_size(n, self.tau);
        if m < 2 {
            return Err(Error::invalid(format!("subsample size {m} is below 2")));
        }
        if self.g_grid.is_empty() {
            return Err(Error::invalid("G grid is empty"));
        }
        if self.g_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("G grid must be strictly increasing"));
        }
        if self.g_grid[0] < 1 || *self.g_grid.last().unwrap() > m {
            return Err(Error::invalid(format!("G grid must lie within [1, {m}] (the subsample size)")));
        }
        if self.method == Method::Unweighted && self.lambda_grid.as_ref().is_some_and(|g| g.iter().any(|&l| l != 0.0)) {
            log::warn!("unweighted method ignores the lambda grid");
        }
        let lambdas = self.lambdas();
        if lambdas.is_empty() {
            return Err(Error::invalid("lambda grid is empty"));
        }
        for &l in &lambdas {
            let ok = l == 0.0
                || match self.method {
                    Method::Unweighted => false,
                    Method::Sparcl => l > 1.0 && l.is_finite(),
                    Method::Cosa => l > 0.0 && l.is_finite(),
                };
            if !ok {
                return Err(Error::invalid(format!("lambda {l} is not valid for {:?}", self.method)));
            }
        }
        let (x1, x2) = self.pac_bounds;
        if !(0.0..=1.0).contains(&x1) || !(0.0..=1.0).contains(&x2) || x1 > x2 {
            return Err(Error::invalid("PAC bounds need 0 <= x1 <= x2 <= 1"));
        }
        Ok(())
    }

    fn stable_linkage(&self) -> Linkage {
        self.stable_linkage.unwrap_or(self.linkage)
    }
}

/// Attribute weight summary for one lambda.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSummary {
    pub lambda: f64,
    /// Sparse weights: fraction of subsamples with `w_m > 0`. COSA: median
    /// over subsamples of the per-attribute median item weight.
    pub attribute_scores: Vec<f64>,
    /// Mean number of non-zero sparse weights (sparse method only).
    pub mean_support: Option<f64>,
    pub converged_fits: usize,
    pub fits: usize,
}

/// Matrices of one grid cell, handed to a [`run_with_observer`] callback.
pub struct CellMatrices<'a> {
    pub lambda_index: usize,
    pub g_index: usize,
    pub counts: &'a ComembershipCounts,
    pub gamma: &'a ConsensusMatrix,
    pub stable: &'a ClusterAssignment,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: RunConfig,
    pub lambdas: Vec<f64>,
    pub item_ids: Vec<String>,
    pub attribute_ids: Vec<String>,
    pub subsamples: SubsampleSet,
    pub grid: ScoreGrid,
    /// Selection under `config.score`.
    pub calibration: Calibration,
    /// Stable clusters of every cell, `stable[l][t]`.
    pub stable: Vec<Vec<ClusterAssignment>>,
    /// Counts and consensus matrix of the calibrated cell.
    pub counts: Option<ComembershipCounts>,
    pub gamma: Option<ConsensusMatrix>,
    /// Empty for the unweighted method.
    pub weights: Vec<WeightSummary>,
    pub warnings: Vec<String>,
    /// Seconds spent per lambda (weighting, subsample clustering, scoring).
    pub seconds_per_lambda: Vec<f64>,
}

impl RunResult {
    /// Stable clusters at the calibrated cell.
    pub fn assignment(&self) -> Option<&ClusterAssignment> {
        self.calibration.indices().map(|(l, t)| &self.stable[l][t])
    }

    /// Calibration of the same grid under another score.
    pub fn calibrate_with(&self, kind: ScoreKind) -> Calibration {
        calibrate(&self.grid, kind)
    }

    pub fn assignment_for(&self, cal: &Calibration) -> Option<&ClusterAssignment> {
        cal.indices().map(|(l, t)| &self.stable[l][t])
    }
}

/// Serializable summary of a run. It carries no timings, so identical
/// inputs give byte-identical reports.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub status: &'static str,
    pub n: usize,
    pub p: usize,
    pub config: RunConfig,
    pub lambdas: Vec<f64>,
    pub calibration: Calibration,
    /// Calibration of the same grid under every score.
    pub by_score: BTreeMap<String, Calibration>,
    pub item_ids: Vec<String>,
    /// Stable cluster labels at the calibrated cell.
    pub assignment: Option<Vec<usize>>,
    pub uncovered_pairs: usize,
    pub weights: Vec<WeightSummary>,
    pub warnings: Vec<String>,
    /// Score-grid cells; undefined scores serialize as `null`.
    pub grid: ScoreGrid,
    /// Output files written alongside the report, by role.
    pub files: BTreeMap<String, String>,
}

impl RunResult {
    pub fn report(&self) -> RunReport {
        RunReport {
            status: if self.calibration.is_calibrated() { "calibrated" } else { "no_stable_structure" },
            n: self.item_ids.len(),
            p: self.attribute_ids.len(),
            config: self.config.clone(),
            lambdas: self.lambdas.clone(),
            calibration: self.calibration,
            by_score: ScoreKind::ALL.iter().map(|&k| (k.name().to_owned(), self.calibrate_with(k))).collect(),
            item_ids: self.item_ids.clone(),
            assignment: self.assignment().map(|z| z.labels().to_vec()),
            uncovered_pairs: self.gamma.as_ref().map_or(0, |g| g.uncovered().len()),
            weights: self.weights.clone(),
            warnings: self.warnings.clone(),
            grid: self.grid.clone(),
            files: BTreeMap::new(),
        }
    }
}

pub fn run(data: &DataMatrix, config: &RunConfig) -> Result<RunResult> {
    run_with_observer(data, config, |_| Ok(()))
}

/// Like [`run`], calling `observer` on every cell in grid order.
pub fn run_with_observer<F>(data: &DataMatrix, config: &RunConfig, mut observer: F) -> Result<RunResult>
where
    F: FnMut(&CellMatrices<'_>) -> Result<()>,
{
    config.validate(data.n())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;

    let standardized;
    let data = if config.standardize {
        let mut d = data.clone();
        d.standardize();
        standardized = d;
        &standardized
    } else {
        data
    };

    let lambdas = config.lambdas();
    let set = draw_subsamples(data.n(), config.k, config.tau, config.seed)?;
    let full_distance = if config.silhouette { Some(pairwise_distance(data, config.kernel.metric())?) } else { None };

    let mut warnings = Vec::new();
    let mut cells = Vec::with_capacity(lambdas.len() * config.g_grid.len());
    let mut stable = Vec::with_capacity(lambdas.len());
    let mut weights = Vec::new();
    let mut seconds_per_lambda = Vec::with_capacity(lambdas.len());
    // Row-best matrices; the calibrated cell is always the best of its row.
    let mut kept: Vec<Option<(ComembershipCounts, ConsensusMatrix)>> = Vec::with_capacity(lambdas.len());

    for (l, &lambda) in lambdas.iter().enumerate() {
        let start = Instant::now();
        let (counts, summary) = pool.install(|| weighted_counts(data, config, &set, lambda))?;
        let converged = summary.as_ref().is_none_or(|s| s.converged_fits == s.fits);
        if let Some(s) = summary {
            if s.converged_fits < s.fits {
                warnings.push(format!(
                    "lambda {lambda}: {} of {} weight fits stopped at the iteration limit",
                    s.fits - s.converged_fits,
                    s.fits
                ));
            }
            weights.push(s);
        }

        let row: Vec<(ConsensusMatrix, ClusterAssignment, CellScores)> = pool.install(|| {
            counts
                .par_iter()
                .map(|c| score_cell(c, &set, config, full_distance.as_ref(), converged))
                .collect::<Result<_>>()
        })?;

        if let Some((gamma, _, _)) = row.first() {
            if !gamma.uncovered().is_empty() {
                warnings.push(format!(
                    "{} item pairs were never subsampled together; their consensus is set to 0",
                    gamma.uncovered().len()
                ));
            }
        }
        for (t, (gamma, z, _)) in row.iter().enumerate() {
            observer(&CellMatrices { lambda_index: l, g_index: t, counts: &counts[t], gamma, stable: z })?;
        }

        let row_scores: Vec<CellScores> = row.iter().map(|r| r.2.clone()).collect();
        let row_grid = ScoreGrid::new(vec![lambda], config.g_grid.clone(), row_scores.clone())?;
        let best = calibrate(&row_grid, config.score).indices().map(|(_, t)| t);

        let mut counts = counts;
        let mut zs = Vec::with_capacity(row.len());
        let mut keep = None;
        for (t, (gamma, z, _)) in row.into_iter().enumerate() {
            if Some(t) == best {
                keep = Some((std::mem::replace(&mut counts[t], empty_counts()), gamma));
            }
            zs.push(z);
        }
        kept.push(keep);
        stable.push(zs);
        cells.extend(row_scores);
        seconds_per_lambda.push(start.elapsed().as_secs_f64());
        log::info!("lambda {lambda}: done in {:.2}s", seconds_per_lambda[l]);
    }

    let grid = ScoreGrid::new(lambdas.clone(), config.g_grid.clone(), cells)?;
    let calibration = calibrate(&grid, config.score);
    let (counts, gamma) = match calibration.indices() {
        Some((l, _)) => match kept[l].take() {
            Some((c, g)) => (Some(c), Some(g)),
            None => (None, None),
        },
        None => {
            warnings.push(format!("no stable structure: every cell has an undefined {} score", config.score));
            (None, None)
        }
    };

    Ok(RunResult {
        config: config.clone(),
        lambdas,
        item_ids: data.item_ids().to_vec(),
        attribute_ids: data.attribute_ids().to_vec(),
        subsamples: set,
        grid,
        calibration,
        stable,
        counts,
        gamma,
        weights,
        warnings,
        seconds_per_lambda,
    })
}

fn empty_counts() -> ComembershipCounts {
    ComembershipCounts { c: Array2::zeros((0, 0)), lambda: 0.0, g: 0 }
}

/// Per-subsample output of the weighting step.
enum Fitted {
    None,
    Sparse { weights: Vec<f64>, converged: bool },
    Cosa { column_medians: Vec<f64>, converged: bool },
}

/// Steps 2-4 at one lambda: weighted distances on every subsample,
/// clustering cut at every `G`, co-membership counts.
fn weighted_counts(
    data: &DataMatrix,
    config: &RunConfig,
    set: &SubsampleSet,
    lambda: f64,
) -> Result<(Vec<ComembershipCounts>, Option<WeightSummary>)> {
    let fitted: std::sync::Mutex<Vec<Option<Fitted>>> = std::sync::Mutex::new((0..set.k()).map(|_| None).collect());
    let counts = accumulate_comembership(
        set,
        |k, items| {
            let rows = data.values().select(Axis(0), items);
            let (dist, fit) = subsample_distance(rows.view(), config, lambda)?;
            fitted.lock().expect("weight store poisoned")[k] = Some(fit);
            match config.algorithm {
                Algorithm::Hierarchical => hierarchical_cuts(&dist, config.linkage, &config.g_grid),
                Algorithm::Pam => {
                    let seed = derive_seed(config.seed, k as u64);
                    config.g_grid.iter().map(|&g| pam(&dist, g, seed).map(|f| f.assignment)).collect()
                }
            }
        },
        &config.g_grid,
        lambda,
    )?;
    let fitted: Vec<Fitted> = fitted
        .into_inner()
        .expect("weight store poisoned")
        .into_iter()
        .map(|f| f.expect("every subsample was fitted"))
        .collect();
    Ok((counts, summarize(lambda, data.p(), &fitted)))
}

fn subsample_distance(
    rows: ndarray::ArrayView2<'_, f64>,
    config: &RunConfig,
    lambda: f64,
) -> Result<(DistanceMatrix, Fitted)> {
    if lambda == 0.0 || config.method == Method::Unweighted {
        return Ok((pairwise_rows(rows, config.kernel.metric())?, Fitted::None));
    }
    let d = PerAttributeDistance::from_rows(rows, config.kernel);
    match config.method {
        Method::Sparcl => {
            let fit = fit_sparse_weights(&d, lambda, None)?;
            let dist = sparse_weighted_distance(&d, &fit.weights)?;
            Ok((dist, Fitted::Sparse { weights: fit.weights.as_slice().to_vec(), converged: fit.converged }))
        }
        Method::Cosa => {
            let fit = fit_cosa_weights(&d, lambda)?;
            let dist = cosa_distance(&d, &fit.weights)?;
            Ok((dist, Fitted::Cosa { column_medians: fit.weights.column_medians(), converged: fit.converged }))
        }
        Method::Unweighted => unreachable!(),
    }
}

fn summarize(lambda: f64, p: usize, fitted: &[Fitted]) -> Option<WeightSummary> {
    let fits = fitted.len();
    match fitted.first()? {
        Fitted::None => None,
        Fitted::Sparse { .. } => {
            let mut selected = vec![0usize; p];
            let mut support = 0usize;
            let mut converged_fits = 0;
            for f in fitted {
                if let Fitted::Sparse { weights, converged } = f {
                    for (s, &w) in selected.iter_mut().zip(weights) {
                        if w > 0.0 {
                            *s += 1;
                            support += 1;
                        }
                    }
                    converged_fits += usize::from(*converged);
                }
            }
            Some(WeightSummary {
                lambda,
                attribute_scores: selected.iter().map(|&s| s as f64 / fits as f64).collect(),
                mean_support: Some(support as f64 / fits as f64),
                converged_fits,
                fits,
            })
        }
        Fitted::Cosa { .. } => {
            let mut per_attr = vec![Vec::with_capacity(fits); p];
            let mut converged_fits = 0;
            for f in fitted {
                if let Fitted::Cosa { column_medians, converged } = f {
                    for (v, &m) in per_attr.iter_mut().zip(column_medians) {
                        v.push(m);
                    }
                    converged_fits += usize::from(*converged);
                }
            }
            Some(WeightSummary {
                lambda,
                attribute_scores: per_attr.into_iter().map(median).collect(),
                mean_support: None,
                converged_fits,
                fits,
            })
        }
    }
}

/// Steps 5-6 and scoring for one cell.
fn score_cell(
    counts: &ComembershipCounts,
    set: &SubsampleSet,
    config: &RunConfig,
    full_distance: Option<&DistanceMatrix>,
    converged: bool,
) -> Result<(ConsensusMatrix, ClusterAssignment, CellScores)> {
    let gamma = consensus_matrix(counts, set.h())?;
    let z = stable_clusters(&gamma, counts.g, config.stable_linkage())?;
    let tallies = tally(counts, set.h(), &z)?;
    let cdf = cdf_scores(&gamma, config.pac_bounds);
    let silhouette = match full_distance {
        Some(d) if z.g() >= 2 => Some(silhouette_score(d, &z)?),
        _ => None,
    };
    let scores = CellScores {
        lambda: counts.lambda,
        g: counts.g,
        tallies,
        consensus: consensus_score(&tallies),
        area: cdf.area,
        pac: cdf.pac,
        delta: None,
        silhouette,
        converged,
    };
    Ok((gamma, z, scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{cut, hierarchical};
    use crate::simulate::{simulate_dataset, SimulationSpec};

    fn small(seed: u64) -> DataMatrix {
        simulate_dataset(&SimulationSpec::homogeneous(vec![10, 15, 12], 6, 4, 0.8, seed)).unwrap().data
    }

    fn quick(method: Method) -> RunConfig {
        RunConfig { method, k: 20, g_grid: (2..=6).collect(), ..RunConfig::default() }
    }

    #[test]
    fn geometric_grid_endpoints() {
        let g = geometric_grid(0.1, 10.0, 10);
        assert_eq!(g.len(), 10);
        assert_eq!((g[0], g[9]), (0.1, 10.0));
        assert!(g.windows(2).all(|w| (w[1] / w[0] - g[1] / g[0]).abs() < 1e-12));
    }

    #[test]
    fn degenerate_consensus_is_plain_clustering() {
        let data = small(2);
        let cfg = RunConfig { k: 1, tau: 1.0, g_grid: vec![3], silhouette: false, ..RunConfig::default() };
        let res = run(&data, &cfg).unwrap();
        let direct = cut(&hierarchical(&pairwise_distance(&data, crate::distance::Metric::Euclidean).unwrap(), Linkage::Complete).unwrap(), 3)
            .unwrap();
        assert_eq!(res.assignment(), Some(&direct));
        let gamma = res.gamma.as_ref().unwrap();
        for i in 0..data.n() {
            for j in 0..data.n() {
                assert_eq!(gamma.get(i, j), if direct.same(i, j) { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn zero_lambda_matches_unweighted() {
        let data = small(4);
        let base = run(&data, &quick(Method::Unweighted)).unwrap();
        for method in [Method::Cosa, Method::Sparcl] {
            let mut cfg = quick(method);
            cfg.lambda_grid = Some(vec![0.0]);
            let res = run(&data, &cfg).unwrap();
            assert_eq!(res.grid.cells(), base.grid.cells());
            assert_eq!(res.gamma, base.gamma);
            assert_eq!(res.counts, base.counts);
            assert_eq!(res.stable, base.stable);
        }
    }

    #[test]
    fn weighted_runs_produce_summaries() {
        let data = small(5);
        let mut cfg = quick(Method::Sparcl);
        cfg.lambda_grid = Some(vec![1.5, 2.0]);
        let res = run(&data, &cfg).unwrap();
        assert_eq!(res.weights.len(), 2);
        assert!(res.weights[0].attribute_scores.iter().all(|s| (0.0..=1.0).contains(s)));
        let mut cfg = quick(Method::Cosa);
        cfg.lambda_grid = Some(vec![0.5]);
        cfg.algorithm = Algorithm::Pam;
        let res = run(&data, &cfg).unwrap();
        assert_eq!(res.weights[0].attribute_scores.len(), 6);
        assert!(res.calibration.is_calibrated());
    }

    #[test]
    fn calibrated_cell_matrices_are_retained() {
        let data = small(6);
        let mut cfg = quick(Method::Cosa);
        cfg.lambda_grid = Some(vec![0.2, 1.0, 5.0]);
        let mut all = Vec::new();
        let res = run_with_observer(&data, &cfg, |m| {
            all.push((m.lambda_index, m.g_index, m.counts.clone(), m.gamma.clone()));
            Ok(())
        })
        .unwrap();
        assert_eq!(all.len(), 15);
        let (l, t) = res.calibration.indices().unwrap();
        let (_, _, c, g) = all.iter().find(|x| x.0 == l && x.1 == t).unwrap();
        assert_eq!(res.counts.as_ref(), Some(c));
        assert_eq!(res.gamma.as_ref(), Some(g));
    }

    #[test]
    fn config_validation() {
        let data = small(1);
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = quick(Method::Sparcl);
            f(&mut c);
            run(&data, &c).is_err()
        };
        assert!(bad(|c| c.lambda_grid = Some(vec![0.5])));
        assert!(bad(|c| c.g_grid = vec![3, 2]));
        assert!(bad(|c| c.g_grid = vec![2, 40]));
        assert!(bad(|c| c.tau = 0.0));
        assert!(bad(|c| c.k = 0));
        assert!(bad(|c| c.pac_bounds = (0.9, 0.1)));
        assert!("COSA".parse::<Method>().is_ok() && "kmeans".parse::<Method>().is_err());
    }
}
