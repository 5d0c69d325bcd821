//! Command-line front end: simulate data, run consensus clustering,
//! benchmark calibration scores and compare partitions.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use wcc::benchmark::{format_rows, format_summary, run_benchmark, Scenario, SimulationTemplate};
use wcc::calibration::ScoreKind;
use wcc::cluster::{ClusterAssignment, Linkage};
use wcc::distance::Kernel;
use wcc::io;
use wcc::metrics::{ari, jaccard, pair_confusion, rand_index};
use wcc::pipeline::{run_with_observer, Algorithm, Method, RunConfig};
use wcc::plot::{calibration_svg, heatmap_svg};
use wcc::simulate::{simulate_dataset, BlockGraph, Correlation};
use wcc::{Error, Result};

#[derive(Parser)]
#[command(name = "wcc", version, about = "Consensus weighted clustering with calibrated number of clusters")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a Gaussian mixture dataset.
    Simulate(SimulateArgs),
    /// Run consensus clustering over a (lambda, G) grid and calibrate.
    Cluster(ClusterArgs),
    /// Repeat simulate-and-cluster and summarise the calibration scores.
    Benchmark(BenchmarkArgs),
    /// Compare two label files (Rand, adjusted Rand, Jaccard).
    Score(ScoreArgs),
}

fn comma_list<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',').map(|t| t.trim().parse::<T>().map_err(|e| format!("'{t}': {e}"))).collect()
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    match comma_list::<f64>(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err("expected two comma separated numbers".into()),
    }
}

fn parse_from_str<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML file with cluster_sizes, p/q/e or explained_variance, correlation, seed.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
    /// Cluster sizes, e.g. 20,50,30,10,40.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    sizes: Option<Vec<usize>>,
    /// Number of attributes.
    #[arg(long)]
    p: Option<usize>,
    /// Number of contributing attributes (the first q).
    #[arg(long)]
    q: Option<usize>,
    /// Explained variance of each contributing attribute.
    #[arg(long)]
    e: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use correlated attribute blocks instead of independent attributes.
    #[arg(long)]
    blocks: bool,
}

#[derive(Args)]
struct ClusterArgs {
    /// Delimited data: items in rows, attributes in columns, ids in the first row and column.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short, default_value = "wcc-out")]
    out: PathBuf,
    /// TOML run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field delimiter of the input (tab or comma); guessed from the extension by default.
    #[arg(long)]
    delimiter: Option<String>,
    /// unweighted, sparcl or cosa.
    #[arg(long, value_parser = parse_from_str::<Method>)]
    method: Option<Method>,
    /// Subsample clustering: hierarchical or pam.
    #[arg(long, value_parser = parse_from_str::<Algorithm>)]
    algorithm: Option<Algorithm>,
    /// complete, average or single.
    #[arg(long, value_parser = parse_from_str::<Linkage>)]
    linkage: Option<Linkage>,
    /// Linkage on 1 - consensus for the stable clusters.
    #[arg(long, value_parser = parse_from_str::<Linkage>)]
    stable_linkage: Option<Linkage>,
    /// Per-attribute dissimilarity: squared or absolute difference.
    #[arg(long, value_parser = parse_from_str::<Kernel>)]
    kernel: Option<Kernel>,
    /// Number of subsamples.
    #[arg(short = 'K', long = "subsamples")]
    k: Option<usize>,
    /// Subsampling proportion.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Explicit G grid, e.g. 2,3,4,5.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with_all = ["g_min", "g_max"])]
    g_grid: Option<Vec<usize>>,
    #[arg(long)]
    g_min: Option<usize>,
    #[arg(long)]
    g_max: Option<usize>,
    /// Lambda grid, e.g. 0.1,0.5,1.
    #[arg(long = "lambda", value_delimiter = ',', num_args = 1..)]
    lambda_grid: Option<Vec<f64>>,
    /// Calibration score: consensus, delta, pac or silhouette.
    #[arg(long, value_parser = parse_from_str::<ScoreKind>)]
    score: Option<ScoreKind>,
    /// PAC bounds x1,x2.
    #[arg(long, value_parser = parse_pair)]
    pac_bounds: Option<(f64, f64)>,
    #[arg(long)]
    no_silhouette: bool,
    /// z-score attributes (the default for input files).
    #[arg(long, overrides_with = "no_standardize")]
    standardize: bool,
    #[arg(long)]
    no_standardize: bool,
    #[arg(long, env = "WCC_THREADS")]
    threads: Option<usize>,
    /// Also write H and every C and consensus matrix of the grid.
    #[arg(long)]
    dump_matrices: bool,
    #[arg(long)]
    no_plots: bool,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// TOML scenario file.
    #[arg(long, short)]
    scenario: PathBuf,
    #[arg(long, short, default_value = "wcc-benchmark")]
    out: PathBuf,
    #[arg(long, env = "WCC_THREADS")]
    threads: Option<usize>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Reference labels (item, cluster).
    #[arg(long)]
    truth: PathBuf,
    /// Estimated labels (item, cluster).
    #[arg(long)]
    estimate: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Cluster(a) => cluster(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Score(a) => score(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

fn read_toml(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    text.parse::<toml::Table>().map_err(|e| Error::Parse { path: path.into(), message: e.to_string() })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })
}

fn display(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut template = SimulationTemplate {
        cluster_sizes: vec![20, 50, 30, 10, 40],
        explained_variance: None,
        p: Some(10),
        q: None,
        e: Some(0.6),
        correlation: Correlation::Independent,
    };
    let mut seed = 1;
    if let Some(path) = &a.config {
        let mut table = read_toml(path)?;
        if let Some(s) = table.remove("seed") {
            seed = s
                .as_integer()
                .and_then(|v| u64::try_from(v).ok())
                .ok_or_else(|| Error::Parse { path: path.clone(), message: "seed must be a non-negative integer".into() })?;
        }
        template = table.try_into().map_err(|e: toml::de::Error| Error::Parse { path: path.clone(), message: e.to_string() })?;
    }
    if let Some(s) = a.sizes {
        template.cluster_sizes = s;
    }
    if a.p.is_some() || a.q.is_some() || a.e.is_some() {
        let p = a.p.or(template.p).or(template.explained_variance.as_ref().map(Vec::len));
        template.explained_variance = None;
        template.p = p;
        template.q = a.q.or(template.q);
        template.e = a.e.or(template.e);
    }
    if a.blocks {
        template.correlation = Correlation::BlockGraph(BlockGraph::default());
    }
    let seed = a.seed.unwrap_or(seed);
    let spec = template.spec(seed)?;
    let sim = simulate_dataset(&spec)?;

    create_dir(&a.out)?;
    let data_path = a.out.join("data.tsv");
    let truth_path = a.out.join("truth.tsv");
    let means_path = a.out.join("means.tsv");
    let sigma_path = a.out.join("sigma.tsv");
    io::write_data(&data_path, &sim.data)?;
    io::write_labels(&truth_path, sim.data.item_ids(), &sim.truth)?;
    io::write_matrix(&means_path, "item", sim.data.item_ids(), sim.data.attribute_ids(), sim.means.view())?;
    io::write_matrix(&sigma_path, "attribute", sim.data.attribute_ids(), sim.data.attribute_ids(), sim.sigma.view())?;

    #[derive(Serialize)]
    struct Manifest<'a> {
        spec: &'a wcc::simulate::SimulationSpec,
        n: usize,
        p: usize,
        contributing: &'a [usize],
        files: BTreeMap<&'static str, String>,
    }
    let files = BTreeMap::from([
        ("data", display(&data_path)),
        ("truth", display(&truth_path)),
        ("means", display(&means_path)),
        ("sigma", display(&sigma_path)),
    ]);
    io::write_json(
        &a.out.join("manifest.json"),
        &Manifest { spec: &spec, n: spec.n(), p: spec.p(), contributing: &sim.contributing, files },
    )?;
    println!("simulated {} items x {} attributes into {}", spec.n(), spec.p(), a.out.display());
    Ok(())
}

/// Defaults, then the config file, then flags.
fn resolve_config(a: &ClusterArgs) -> Result<RunConfig> {
    let mut config = RunConfig { standardize: true, ..RunConfig::default() };
    if let Some(path) = &a.config {
        let overlay = read_toml(path)?;
        let mut base = toml::Table::try_from(&config).map_err(|e| Error::Numerical(e.to_string()))?;
        base.extend(overlay);
        config = base.try_into().map_err(|e: toml::de::Error| Error::Parse { path: path.clone(), message: e.to_string() })?;
    }
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = a.$field.clone() { config.$field = v; } )* };
    }
    set!(method, algorithm, linkage, kernel, k, tau, seed, g_grid, score, pac_bounds);
    if let Some(l) = a.stable_linkage {
        config.stable_linkage = Some(l);
    }
    if let Some(l) = &a.lambda_grid {
        config.lambda_grid = Some(l.clone());
    }
    if a.g_min.is_some() || a.g_max.is_some() {
        let lo = a.g_min.unwrap_or(config.g_grid[0]);
        let hi = a.g_max.unwrap_or(*config.g_grid.last().unwrap_or(&lo));
        config.g_grid = (lo..=hi).collect();
    }
    if a.no_silhouette {
        config.silhouette = false;
    }
    if a.standardize {
        config.standardize = true;
    }
    if a.no_standardize {
        config.standardize = false;
    }
    if let Some(t) = a.threads {
        config.threads = t;
    }
    Ok(config)
}

fn delimiter(s: &Option<String>) -> Result<Option<u8>> {
    match s.as_deref() {
        None => Ok(None),
        Some("tab") | Some("\\t") | Some("\t") => Ok(Some(b'\t')),
        Some("comma") | Some(",") => Ok(Some(b',')),
        Some(other) => Err(Error::InvalidInput(format!("unknown delimiter '{other}' (use tab or comma)"))),
    }
}

fn cluster(a: ClusterArgs) -> Result<()> {
    let config = resolve_config(&a)?;
    let data = io::read_data(&a.input, delimiter(&a.delimiter)?)?;
    create_dir(&a.out)?;
    let matrices = a.out.join("matrices");
    if a.dump_matrices {
        create_dir(&matrices)?;
    }
    let ids = data.item_ids().to_vec();
    let g_grid = config.g_grid.clone();
    let start = Instant::now();
    let res = run_with_observer(&data, &config, |m| {
        if !a.dump_matrices {
            return Ok(());
        }
        let g = g_grid[m.g_index];
        let tag = format!("l{}_G{g}", m.lambda_index);
        io::write_matrix(&matrices.join(format!("C_{tag}.tsv")), "item", &ids, &ids, m.counts.c.view())?;
        io::write_matrix(&matrices.join(format!("Gamma_{tag}.tsv")), "item", &ids, &ids, m.gamma.view())
    })?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut files = BTreeMap::new();
    let mut put = |role: &str, path: &Path| {
        files.insert(role.to_owned(), display(path));
    };
    if a.dump_matrices {
        let h_path = matrices.join("H.tsv");
        io::write_matrix(&h_path, "item", &ids, &ids, res.subsamples.h().view())?;
        put("matrices", &matrices);
    }
    let scores_path = a.out.join("scores.tsv");
    io::write_score_grid(&scores_path, &res.grid)?;
    put("scores", &scores_path);
    if let (Some(z), Some(gamma)) = (res.assignment(), res.gamma.as_ref()) {
        let assignment_path = a.out.join("assignment.tsv");
        io::write_labels(&assignment_path, &ids, z)?;
        put("assignment", &assignment_path);
        let consensus_path = a.out.join("consensus.tsv");
        io::write_matrix(&consensus_path, "item", &ids, &ids, gamma.view())?;
        put("consensus", &consensus_path);
        if !a.no_plots {
            let heat = a.out.join("consensus.svg");
            io::write_text(&heat, &heatmap_svg(gamma, z))?;
            put("consensus_plot", &heat);
        }
    }
    if !a.no_plots {
        let curve = a.out.join("calibration.svg");
        io::write_text(&curve, &calibration_svg(&res.grid, config.score, &res.calibration))?;
        put("calibration_plot", &curve);
    }
    let timings_path = a.out.join("timings.json");
    io::write_json(
        &timings_path,
        &serde_json::json!({ "total_seconds": elapsed, "seconds_per_lambda": res.seconds_per_lambda }),
    )?;
    put("timings", &timings_path);

    let mut report = res.report();
    report.files = files;
    io::write_json(&a.out.join("report.json"), &report)?;

    for w in &res.warnings {
        log::warn!("{w}");
    }
    match res.calibration {
        wcc::calibration::Calibration::Calibrated { lambda, g, score, .. } => {
            println!("calibrated G = {g}, lambda = {lambda} ({} score {score:.4})", config.score);
        }
        wcc::calibration::Calibration::NoStableStructure => {
            println!("no stable structure: every cell has an undefined {} score", config.score);
        }
    }
    Ok(())
}

fn benchmark(a: BenchmarkArgs) -> Result<()> {
    let scenario = Scenario::load(&a.scenario)?;
    let threads = a.threads.unwrap_or(scenario.consensus.threads);
    let repeats = scenario.repeats;
    let res = run_benchmark(&scenario, threads, |r| log::info!("repeat {r}/{repeats} done"))?;
    create_dir(&a.out)?;
    let summary = format_summary(&res.summary);
    io::write_text(&a.out.join("summary.tsv"), &summary)?;
    io::write_text(&a.out.join("rows.tsv"), &format_rows(&res.rows))?;
    io::write_json(&a.out.join("benchmark.json"), &res)?;
    print!("{summary}");
    Ok(())
}

fn score(a: ScoreArgs) -> Result<()> {
    let (truth_ids, truth) = io::read_labels(&a.truth)?;
    let (est_ids, est) = io::read_labels(&a.estimate)?;
    let position: std::collections::HashMap<&str, usize> =
        est_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    if position.len() != est_ids.len() || truth_ids.len() != est_ids.len() {
        return Err(Error::InvalidInput("label files must list the same distinct items".into()));
    }
    let reordered = truth_ids
        .iter()
        .map(|id| {
            position
                .get(id.as_str())
                .map(|&i| est.labels()[i])
                .ok_or_else(|| Error::InvalidInput(format!("item '{id}' missing from {}", a.estimate.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let est = ClusterAssignment::from_raw(&reordered)?;
    let pc = pair_confusion(&truth, &est)?;
    let out = serde_json::json!({
        "n": truth.n(),
        "tp": pc.tp,
        "tn": pc.tn,
        "fp": pc.fp,
        "fn": pc.fn_,
        "rand": rand_index(&pc),
        "ari": ari(&pc),
        "jaccard": jaccard(&pc),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("plain JSON values"));
    Ok(())
}
