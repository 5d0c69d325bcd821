//! Repeated simulate-and-cluster studies summarised by median and IQR.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::calibration::ScoreKind;
use crate::metrics::{ari, jaccard, pair_confusion, rand_index, weighting_f1};
use crate::pipeline::{run, Algorithm, Method, RunConfig};
use crate::simulate::{simulate_dataset, Correlation, SimulationSpec};
use crate::{derive_seed, Error, Result};

/// Simulation settings shared by all repeats. Give either
/// `explained_variance` or the shorthand `p`, `q`, `e` (the first `q` of `p`
/// attributes have explained variance `e`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationTemplate {
    pub cluster_sizes: Vec<usize>,
    #[serde(default)]
    pub explained_variance: Option<Vec<f64>>,
    #[serde(default)]
    pub p: Option<usize>,
    #[serde(default)]
    pub q: Option<usize>,
    #[serde(default)]
    pub e: Option<f64>,
    #[serde(default)]
    pub correlation: Correlation,
}

impl SimulationTemplate {
    pub fn spec(&self, seed: u64) -> Result<SimulationSpec> {
        let explained_variance = match (&self.explained_variance, self.p, self.e) {
            (Some(ev), None, None) if self.q.is_none() => ev.clone(),
            (None, Some(p), Some(e)) => {
                let q = self.q.unwrap_or(p);
                if q > p {
                    return Err(Error::invalid(format!("q = {q} exceeds p = {p}")));
                }
                (0..p).map(|j| if j < q { e } else { 0.0 }).collect()
            }
            _ => return Err(Error::invalid("give either explained_variance or p and e (and optionally q)")),
        };
        Ok(SimulationSpec {
            cluster_sizes: self.cluster_sizes.clone(),
            explained_variance,
            correlation: self.correlation,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    /// Row label; defaults to the method name.
    #[serde(default)]
    pub name: Option<String>,
    pub method: Method,
    #[serde(default)]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub algorithm: Option<Algorithm>,
}

impl MethodSpec {
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("{:?}", self.method).to_lowercase())
    }
}

fn all_scores() -> Vec<ScoreKind> {
    ScoreKind::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub repeats: usize,
    #[serde(default)]
    pub seed: u64,
    pub simulation: SimulationTemplate,
    /// Consensus settings shared by all methods.
    #[serde(default)]
    pub consensus: RunConfig,
    pub methods: Vec<MethodSpec>,
    #[serde(default = "all_scores")]
    pub scores: Vec<ScoreKind>,
    /// Number of top-weighted attributes for F1; defaults to the number of
    /// contributing attributes.
    #[serde(default)]
    pub top_q: Option<usize>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
    }
}

/// Outcome of one (repeat, method, score).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub repeat: usize,
    pub method: String,
    pub score: ScoreKind,
    pub g: Option<usize>,
    pub lambda: Option<f64>,
    pub rand: Option<f64>,
    pub ari: Option<f64>,
    pub jaccard: Option<f64>,
    pub f1: Option<f64>,
    /// Wall time of the whole consensus run (shared by its scores).
    pub seconds: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

impl Stat {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Linear-interpolation quantile of sorted data (type 7).
pub fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * prob;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn stat(values: impl IntoIterator<Item = f64>) -> Option<Stat> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(Stat { median: quantile(&v, 0.5), q1: quantile(&v, 0.25), q3: quantile(&v, 0.75) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: String,
    pub score: ScoreKind,
    pub ok: usize,
    pub failed: usize,
    pub g: Option<Stat>,
    pub lambda: Option<Stat>,
    pub rand: Option<Stat>,
    pub ari: Option<Stat>,
    pub jaccard: Option<Stat>,
    pub f1: Option<Stat>,
    pub seconds: Option<Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkResult {
    pub rows: Vec<BenchmarkRow>,
    pub summary: Vec<SummaryRow>,
}

impl BenchmarkResult {
    pub fn summary_for(&self, method: &str, score: ScoreKind) -> Option<&SummaryRow> {
        self.summary.iter().find(|s| s.method == method && s.score == score)
    }
}

/// Runs every repeat. Repeat `r` simulates with seed `derive(seed, 2r)` and
/// clusters with `derive(seed, 2r + 1)`. Failures are recorded per row.
pub fn run_benchmark(scenario: &Scenario, threads: usize, mut progress: impl FnMut(usize)) -> Result<BenchmarkResult> {
    if scenario.methods.is_empty() || scenario.scores.is_empty() {
        return Err(Error::invalid("scenario needs at least one method and one score"));
    }
    scenario.simulation.spec(0)?.validate()?;
    let mut rows = Vec::new();
    for r in 0..scenario.repeats {
        let data_seed = derive_seed(scenario.seed, 2 * r as u64);
        let run_seed = derive_seed(scenario.seed, 2 * r as u64 + 1);
        let sim = scenario.simulation.spec(data_seed).and_then(|s| simulate_dataset(&s));
        for m in &scenario.methods {
            let failed = |error: String| {
                scenario.scores.iter().map(move |&score| BenchmarkRow {
                    repeat: r,
                    method: m.label(),
                    score,
                    g: None,
                    lambda: None,
                    rand: None,
                    ari: None,
                    jaccard: None,
                    f1: None,
                    seconds: None,
                    error: Some(error.clone()),
                })
            };
            let sim = match &sim {
                Ok(s) => s,
                Err(e) => {
                    rows.extend(failed(format!("simulation: {e}")));
                    continue;
                }
            };
            let config = RunConfig {
                method: m.method,
                lambda_grid: m.lambda_grid.clone().or_else(|| scenario.consensus.lambda_grid.clone()),
                algorithm: m.algorithm.unwrap_or(scenario.consensus.algorithm),
                seed: run_seed,
                threads,
                ..scenario.consensus.clone()
            };
            let start = Instant::now();
            let res = match run(&sim.data, &config) {
                Ok(res) => res,
                Err(e) => {
                    log::warn!("repeat {r}, {}: {e}", m.label());
                    rows.extend(failed(e.to_string()));
                    continue;
                }
            };
            let seconds = start.elapsed().as_secs_f64();
            let q = scenario.top_q.unwrap_or(sim.contributing.len());
            for &score in &scenario.scores {
                let cal = res.calibrate_with(score);
                let Some((l, _)) = cal.indices() else {
                    rows.extend(failed(format!("no stable structure under {score}")).filter(|row| row.score == score));
                    continue;
                };
                let z = res.assignment_for(&cal).expect("calibrated cell has an assignment");
                let pc = pair_confusion(&sim.truth, z)?;
                let f1 = match res.weights.iter().find(|w| w.lambda.to_bits() == res.lambdas[l].to_bits()) {
                    Some(w) if q > 0 && q <= w.attribute_scores.len() => Some(weighting_f1(&sim.contributing, &w.attribute_scores, q)?),
                    _ => None,
                };
                rows.push(BenchmarkRow {
                    repeat: r,
                    method: m.label(),
                    score,
                    g: Some(z.g()),
                    lambda: Some(res.lambdas[l]),
                    rand: Some(rand_index(&pc)),
                    ari: Some(ari(&pc)),
                    jaccard: Some(jaccard(&pc)),
                    f1,
                    seconds: Some(seconds),
                    error: None,
                });
            }
        }
        progress(r + 1);
    }
    let summary = summarize(scenario, &rows);
    Ok(BenchmarkResult { rows, summary })
}

fn summarize(scenario: &Scenario, rows: &[BenchmarkRow]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for m in &scenario.methods {
        let label = m.label();
        for &score in &scenario.scores {
            let sel: Vec<&BenchmarkRow> = rows.iter().filter(|r| r.method == label && r.score == score).collect();
            let ok: Vec<&&BenchmarkRow> = sel.iter().filter(|r| r.error.is_none()).collect();
            let col = |f: fn(&BenchmarkRow) -> Option<f64>| stat(ok.iter().filter_map(|r| f(r)));
            out.push(SummaryRow {
                method: label.clone(),
                score,
                ok: ok.len(),
                failed: sel.len() - ok.len(),
                g: col(|r| r.g.map(|g| g as f64)),
                lambda: col(|r| r.lambda),
                rand: col(|r| r.rand),
                ari: col(|r| r.ari),
                jaccard: col(|r| r.jaccard),
                f1: col(|r| r.f1),
                seconds: col(|r| r.seconds),
            });
        }
    }
    out
}

fn cell(s: Option<Stat>, digits: usize) -> String {
    s.map_or_else(|| "NA".to_owned(), |s| format!("{:.*} [{:.*}]", digits, s.median, digits, s.iqr()))
}

/// Median [IQR] table, tab separated.
pub fn format_summary(summary: &[SummaryRow]) -> String {
    let mut s = String::from("method\tscore\tok\tfailed\tG\tlambda\tRand\tARI\tJaccard\tF1\tseconds\n");
    for r in summary {
        s += &format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.method,
            r.score,
            r.ok,
            r.failed,
            cell(r.g, 0),
            cell(r.lambda, 3),
            cell(r.rand, 3),
            cell(r.ari, 3),
            cell(r.jaccard, 3),
            cell(r.f1, 3),
            cell(r.seconds, 2)
        );
    }
    s
}

/// One line per (repeat, method, score).
pub fn format_rows(rows: &[BenchmarkRow]) -> String {
    let o = |v: Option<f64>| v.map_or_else(|| "NA".to_owned(), |x| x.to_string());
    let mut s = String::from("repeat\tmethod\tscore\tG\tlambda\tRand\tARI\tJaccard\tF1\tseconds\terror\n");
    for r in rows {
        s += &format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.repeat,
            r.method,
            r.score,
            r.g.map_or_else(|| "NA".to_owned(), |g| g.to_string()),
            o(r.lambda),
            o(r.rand),
            o(r.ari),
            o(r.jaccard),
            o(r.f1),
            o(r.seconds),
            r.error.as_deref().unwrap_or("")
        );
    }
    s
}
