use std::ffi::CStr;
use std::ptr;

use wcc_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(wcc_last_error_message()) }.to_string_lossy().into_owned()
}

fn simulated(sizes: &[usize], p: usize, q: usize, e: f64, seed: u64) -> (Vec<f64>, Vec<u32>) {
    let n: usize = sizes.iter().sum();
    let mut values = vec![0.0; n * p];
    let mut labels = vec![0u32; n];
    let st = unsafe {
        wcc_simulate(sizes.as_ptr(), sizes.len(), p, q, e, seed, values.as_mut_ptr(), labels.as_mut_ptr())
    };
    assert_eq!(st, WccStatus::Ok, "{}", last_error());
    (values, labels)
}

#[test]
fn cluster_round_trip_recovers_separated_groups() {
    let (values, truth) = simulated(&[15, 15], 6, 6, 0.9, 3);
    let mut data = ptr::null_mut();
    assert_eq!(unsafe { wcc_data_new(values.as_ptr(), 30, 6, &mut data) }, WccStatus::Ok);

    let mut cfg = wcc_config_default();
    cfg.g_min = 2;
    cfg.g_max = 6;
    cfg.threads = 1;
    let mut res = ptr::null_mut();
    assert_eq!(unsafe { wcc_cluster(data, &cfg, &mut res) }, WccStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { wcc_result_n(res) }, 30);

    let (mut g, mut lambda, mut score) = (0usize, -1.0, 0.0);
    assert_eq!(unsafe { wcc_result_calibration(res, &mut g, &mut lambda, &mut score) }, WccStatus::Ok);
    assert_eq!((g, lambda), (2, 0.0));
    assert!(score.is_finite());

    let mut labels = vec![0u32; 30];
    assert_eq!(unsafe { wcc_result_labels(res, labels.as_mut_ptr(), 29) }, WccStatus::BufferTooSmall);
    assert_eq!(unsafe { wcc_result_labels(res, labels.as_mut_ptr(), 30) }, WccStatus::Ok);
    let mut a = 0.0;
    assert_eq!(unsafe { wcc_adjusted_rand_index(truth.as_ptr(), labels.as_ptr(), 30, &mut a) }, WccStatus::Ok);
    assert_eq!(a, 1.0);

    unsafe {
        wcc_result_free(res);
        wcc_data_free(data);
    }
}

#[test]
fn null_pointers_and_bad_input_are_reported() {
    let mut data = ptr::null_mut();
    assert_eq!(unsafe { wcc_data_new(ptr::null(), 2, 2, &mut data) }, WccStatus::NullPointer);
    assert!(last_error().contains("values"));

    let nan = [f64::NAN, 1.0];
    assert_eq!(unsafe { wcc_data_new(nan.as_ptr(), 1, 2, &mut data) }, WccStatus::InvalidInput);
    assert!(!last_error().is_empty());

    let ok = [0.0, 1.0, 2.0, 3.0];
    assert_eq!(unsafe { wcc_data_new(ok.as_ptr(), 2, 2, &mut data) }, WccStatus::Ok);
    assert!(last_error().is_empty());
    let mut cfg = wcc_config_default();
    cfg.g_min = 5;
    cfg.g_max = 2;
    let mut res = ptr::null_mut();
    assert_eq!(unsafe { wcc_cluster(data, &cfg, &mut res) }, WccStatus::InvalidInput);
    assert!(res.is_null());
    unsafe {
        wcc_data_free(data);
        wcc_data_free(ptr::null_mut());
        wcc_result_free(ptr::null_mut());
    }
    assert_eq!(unsafe { wcc_result_n(ptr::null()) }, 0);
}

#[test]
fn consensus_score_matches_known_values() {
    assert!((wcc_consensus_score(10, 0, 10, 20) - 30f64.sqrt()).abs() < 1e-12);
    assert_eq!(wcc_consensus_score(0, 0, 0, 5), f64::NEG_INFINITY);
}

#[test]
fn simulate_is_seed_deterministic() {
    let a = simulated(&[4, 5], 3, 2, 0.5, 11);
    let b = simulated(&[4, 5], 3, 2, 0.5, 11);
    assert!(a.0.iter().zip(&b.0).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_eq!(a.1, vec![1, 1, 1, 1, 2, 2, 2, 2, 2]);
    let mut v = vec![0.0; 9 * 3];
    let mut l = vec![0u32; 9];
    let st = unsafe { wcc_simulate([4usize, 5].as_ptr(), 2, 3, 4, 0.5, 1, v.as_mut_ptr(), l.as_mut_ptr()) };
    assert_eq!(st, WccStatus::InvalidInput);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/wcc.h")).unwrap();
    for f in [
        "wcc_last_error_message",
        "wcc_data_new",
        "wcc_data_free",
        "wcc_config_default",
        "wcc_cluster",
        "wcc_result_free",
        "wcc_result_n",
        "wcc_result_calibration",
        "wcc_result_labels",
        "wcc_consensus_score",
        "wcc_adjusted_rand_index",
        "wcc_simulate",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("#ifndef WCC_H"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"wcc.h\"\nint main(void) { WccConfig c = wcc_config_default(); (void)c; return WCC_STATUS_OK; }\n",
    )
    .unwrap();
    let out = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn which_cc() -> Result<String, ()> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match std::process::Command::new(&cc).arg("--version").output() {
        Ok(o) if o.status.success() => Ok(cc),
        _ => Err(()),
    }
}
