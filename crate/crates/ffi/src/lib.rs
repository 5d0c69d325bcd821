//! C ABI over `wcc-core`.
//!
//! Data and results live behind opaque handles that must be released with
//! their `*_free` function. Every fallible call returns a [`WccStatus`]; on
//! failure [`wcc_last_error_message`] describes the last error raised on the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wcc::calibration::{consensus_score, Calibration, ScoreKind, WithinBetweenTallies};
use wcc::cluster::{ClusterAssignment, Linkage};
use wcc::distance::DataMatrix;
use wcc::metrics::{ari, pair_confusion};
use wcc::pipeline::{run, Algorithm, Method, RunConfig, RunResult};
use wcc::simulate::{simulate_dataset, SimulationSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WccStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Numerical = 3,
    /// No calibrated cell (every score undefined).
    NoStableStructure = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WccMethod {
    Unweighted = 0,
    Sparcl = 1,
    Cosa = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WccAlgorithm {
    Hierarchical = 0,
    Pam = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WccLinkage {
    Complete = 0,
    Average = 1,
    Single = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WccScore {
    Consensus = 0,
    Delta = 1,
    Pac = 2,
    Silhouette = 3,
}

/// Run settings. Start from [`wcc_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WccConfig {
    pub method: WccMethod,
    pub algorithm: WccAlgorithm,
    pub linkage: WccLinkage,
    pub score: WccScore,
    /// Number of subsamples.
    pub k: usize,
    /// Subsampling proportion in (0, 1].
    pub tau: f64,
    pub seed: u64,
    /// Inclusive range of the number of clusters.
    pub g_min: usize,
    pub g_max: usize,
    /// Optional lambda grid; null selects the method default.
    pub lambdas: *const f64,
    pub n_lambdas: usize,
    pub standardize: bool,
    /// 0 uses all cores.
    pub threads: usize,
}

/// Opaque data matrix.
pub struct WccData {
    inner: DataMatrix,
}

/// Opaque result of [`wcc_cluster`].
pub struct WccResult {
    inner: RunResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &wcc::Error) -> WccStatus {
    set_error(e.to_string());
    if e.is_input_error() {
        WccStatus::InvalidInput
    } else {
        WccStatus::Numerical
    }
}

/// Runs `f`, turning errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), WccStatus>) -> WccStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            WccStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            WccStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), WccStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(WccStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Message of the last error on this thread, empty after a successful call.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn wcc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Copies an `n x p` row-major matrix into a new data handle.
///
/// # Safety
/// `values` must point to `n * p` readable doubles and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wcc_data_new(values: *const f64, n: usize, p: usize, out: *mut *mut WccData) -> WccStatus {
    guard(|| {
        non_null(values, "values")?;
        non_null(out, "out")?;
        let len = n.checked_mul(p).ok_or_else(|| {
            set_error("n * p overflows");
            WccStatus::InvalidInput
        })?;
        let slice = unsafe { std::slice::from_raw_parts(values, len) };
        let arr = ndarray::Array2::from_shape_vec((n, p), slice.to_vec()).map_err(|e| {
            set_error(e.to_string());
            WccStatus::InvalidInput
        })?;
        let data = DataMatrix::from_values(arr).map_err(|e| status_of(&e))?;
        unsafe { *out = Box::into_raw(Box::new(WccData { inner: data })) };
        Ok(())
    })
}

/// # Safety
/// `data` must come from [`wcc_data_new`] and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn wcc_data_free(data: *mut WccData) {
    if !data.is_null() {
        drop(unsafe { Box::from_raw(data) });
    }
}

#[no_mangle]
pub extern "C" fn wcc_config_default() -> WccConfig {
    let d = RunConfig::default();
    WccConfig {
        method: WccMethod::Unweighted,
        algorithm: WccAlgorithm::Hierarchical,
        linkage: WccLinkage::Complete,
        score: WccScore::Consensus,
        k: d.k,
        tau: d.tau,
        seed: d.seed,
        g_min: d.g_grid[0],
        g_max: *d.g_grid.last().expect("default grid is non-empty"),
        lambdas: ptr::null(),
        n_lambdas: 0,
        standardize: d.standardize,
        threads: d.threads,
    }
}

fn to_run_config(c: &WccConfig) -> Result<RunConfig, WccStatus> {
    if c.g_min > c.g_max {
        set_error("g_min exceeds g_max");
        return Err(WccStatus::InvalidInput);
    }
    let lambda_grid = if c.lambdas.is_null() {
        None
    } else {
        Some(unsafe { std::slice::from_raw_parts(c.lambdas, c.n_lambdas) }.to_vec())
    };
    Ok(RunConfig {
        method: match c.method {
            WccMethod::Unweighted => Method::Unweighted,
            WccMethod::Sparcl => Method::Sparcl,
            WccMethod::Cosa => Method::Cosa,
        },
        algorithm: match c.algorithm {
            WccAlgorithm::Hierarchical => Algorithm::Hierarchical,
            WccAlgorithm::Pam => Algorithm::Pam,
        },
        linkage: match c.linkage {
            WccLinkage::Complete => Linkage::Complete,
            WccLinkage::Average => Linkage::Average,
            WccLinkage::Single => Linkage::Single,
        },
        score: match c.score {
            WccScore::Consensus => ScoreKind::Consensus,
            WccScore::Delta => ScoreKind::Delta,
            WccScore::Pac => ScoreKind::Pac,
            WccScore::Silhouette => ScoreKind::Silhouette,
        },
        k: c.k,
        tau: c.tau,
        seed: c.seed,
        g_grid: (c.g_min..=c.g_max).collect(),
        lambda_grid,
        standardize: c.standardize,
        threads: c.threads,
        ..RunConfig::default()
    })
}

/// Runs consensus clustering and calibration.
///
/// # Safety
/// `data` must be a live handle, `config` readable (its `lambdas` pointing
/// to `n_lambdas` doubles when non-null) and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wcc_cluster(data: *const WccData, config: *const WccConfig, out: *mut *mut WccResult) -> WccStatus {
    guard(|| {
        non_null(data, "data")?;
        non_null(config, "config")?;
        non_null(out, "out")?;
        let cfg = to_run_config(unsafe { &*config })?;
        let res = run(unsafe { &(*data).inner }, &cfg).map_err(|e| status_of(&e))?;
        unsafe { *out = Box::into_raw(Box::new(WccResult { inner: res })) };
        Ok(())
    })
}

/// # Safety
/// `result` must come from [`wcc_cluster`] and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn wcc_result_free(result: *mut WccResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

unsafe fn calibrated<'a>(result: *const WccResult) -> Result<(&'a RunResult, f64, usize, f64), WccStatus> {
    non_null(result, "result")?;
    let r: &RunResult = unsafe { &(*result).inner };
    match r.calibration {
        Calibration::Calibrated { lambda, g, score, .. } => Ok((r, lambda, g, score)),
        Calibration::NoStableStructure => {
            set_error("no stable structure");
            Err(WccStatus::NoStableStructure)
        }
    }
}

/// Number of items, or 0 for a null handle.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wcc_result_n(result: *const WccResult) -> usize {
    if result.is_null() {
        0
    } else {
        unsafe { (*result).inner.item_ids.len() }
    }
}

/// Calibrated number of clusters, penalty and score.
///
/// # Safety
/// `result` must be a live handle; each output pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn wcc_result_calibration(
    result: *const WccResult,
    g: *mut usize,
    lambda: *mut f64,
    score: *mut f64,
) -> WccStatus {
    guard(|| {
        let (_, l, gg, s) = unsafe { calibrated(result) }?;
        unsafe {
            if !g.is_null() {
                *g = gg;
            }
            if !lambda.is_null() {
                *lambda = l;
            }
            if !score.is_null() {
                *score = s;
            }
        }
        Ok(())
    })
}

/// Copies the stable cluster labels (1-based) into `labels[0..len]`;
/// `len` must be at least [`wcc_result_n`].
///
/// # Safety
/// `result` must be a live handle and `labels` writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn wcc_result_labels(result: *const WccResult, labels: *mut u32, len: usize) -> WccStatus {
    guard(|| {
        non_null(labels, "labels")?;
        let (r, ..) = unsafe { calibrated(result) }?;
        let z = r.assignment().expect("calibrated run has an assignment");
        if len < z.n() {
            set_error(format!("label buffer holds {len}, need {}", z.n()));
            return Err(WccStatus::BufferTooSmall);
        }
        let out = unsafe { std::slice::from_raw_parts_mut(labels, z.n()) };
        for (o, &l) in out.iter_mut().zip(z.labels()) {
            *o = l as u32;
        }
        Ok(())
    })
}

/// Consensus score from within/between tallies; `-INFINITY` when undefined.
#[no_mangle]
pub extern "C" fn wcc_consensus_score(x_within: u64, x_between: u64, n_within: u64, n_between: u64) -> f64 {
    consensus_score(&WithinBetweenTallies { x_within, x_between, n_within, n_between })
}

/// Adjusted Rand index between two labelings of `n` items. Labels are
/// arbitrary integers.
///
/// # Safety
/// `a` and `b` must point to `n` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn wcc_adjusted_rand_index(a: *const u32, b: *const u32, n: usize, out: *mut f64) -> WccStatus {
    guard(|| {
        non_null(a, "a")?;
        non_null(b, "b")?;
        non_null(out, "out")?;
        let za = ClusterAssignment::from_raw(unsafe { std::slice::from_raw_parts(a, n) }).map_err(|e| status_of(&e))?;
        let zb = ClusterAssignment::from_raw(unsafe { std::slice::from_raw_parts(b, n) }).map_err(|e| status_of(&e))?;
        let pc = pair_confusion(&za, &zb).map_err(|e| status_of(&e))?;
        unsafe { *out = ari(&pc) };
        Ok(())
    })
}

/// Simulates `sum(sizes)` items over `p` attributes, the first `q` with
/// explained variance `e`. Writes row-major values (`n * p`) and 1-based
/// true labels (`n`) into caller buffers.
///
/// # Safety
/// `sizes` must hold `n_clusters` values; `values` and `labels` must be
/// writable for `n * p` and `n` entries.
#[no_mangle]
pub unsafe extern "C" fn wcc_simulate(
    sizes: *const usize,
    n_clusters: usize,
    p: usize,
    q: usize,
    e: f64,
    seed: u64,
    values: *mut f64,
    labels: *mut u32,
) -> WccStatus {
    guard(|| {
        non_null(sizes, "sizes")?;
        non_null(values, "values")?;
        non_null(labels, "labels")?;
        if q > p {
            set_error("q exceeds p");
            return Err(WccStatus::InvalidInput);
        }
        let sizes = unsafe { std::slice::from_raw_parts(sizes, n_clusters) }.to_vec();
        let spec = SimulationSpec::homogeneous(sizes, p, q, e, seed);
        let sim = simulate_dataset(&spec).map_err(|e| status_of(&e))?;
        let n = sim.data.n();
        let v = unsafe { std::slice::from_raw_parts_mut(values, n * p) };
        for (o, x) in v.iter_mut().zip(sim.data.values().iter()) {
            *o = *x;
        }
        let l = unsafe { std::slice::from_raw_parts_mut(labels, n) };
        for (o, &x) in l.iter_mut().zip(sim.truth.labels()) {
            *o = x as u32;
        }
        Ok(())
    })
}
