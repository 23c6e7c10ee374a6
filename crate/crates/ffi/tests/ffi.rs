use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use blackgreedy_ffi::*;

fn last_error() -> String {
    let p = bg_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn learner_round_trip() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(bg_blackwell_new(3, 2.0, 100, BgResponder::Proportional, &mut h), BgStatus::Ok);
        assert_eq!(bg_blackwell_dim(h), 3);
        let mut theta = [0.0; 3];
        assert_eq!(bg_blackwell_theta(h, theta.as_mut_ptr(), 3), BgStatus::Ok);
        assert!(theta.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-12));
        // Coordinate 0 keeps falling short: mass must move onto it.
        for _ in 0..50 {
            let p = [-1.0, 0.5, 0.5];
            assert_eq!(bg_blackwell_observe(h, p.as_ptr(), 3), BgStatus::Ok);
        }
        assert_eq!(bg_blackwell_theta(h, theta.as_mut_ptr(), 3), BgStatus::Ok);
        assert!((theta.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(theta[0] > theta[1] && theta[0] > theta[2]);
        bg_blackwell_free(h);
    }
}

#[test]
fn saddle_learner_stays_on_simplex() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(bg_blackwell_new(3, 3.0, 0, BgResponder::NsmSaddle, &mut h), BgStatus::Ok);
        let mut theta = [0.0; 3];
        for p in [[0.2, -0.4, 0.1], [-0.3, 0.2, 0.2], [0.0, 0.0, -1.0]] {
            assert_eq!(bg_blackwell_observe(h, p.as_ptr(), 3), BgStatus::Ok);
            assert_eq!(bg_blackwell_theta(h, theta.as_mut_ptr(), 3), BgStatus::Ok);
            assert!((theta.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(theta.iter().all(|&x| x >= -1e-12));
        }
        bg_blackwell_free(h);
    }
}

#[test]
fn argument_errors_set_status_and_message() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(bg_blackwell_new(0, 2.0, 10, BgResponder::Proportional, &mut h), BgStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(last_error().contains("d ≥ 1"));
        assert_eq!(bg_blackwell_new(1, 2.0, 10, BgResponder::NsmSaddle, &mut h), BgStatus::InvalidArgument);
        assert_eq!(
            bg_blackwell_new(2, 2.0, 10, BgResponder::Proportional, ptr::null_mut()),
            BgStatus::NullPointer
        );
        assert_eq!(bg_blackwell_new(2, 2.0, 10, BgResponder::Proportional, &mut h), BgStatus::Ok);
        let mut theta = [0.0; 3];
        assert_eq!(bg_blackwell_theta(h, theta.as_mut_ptr(), 3), BgStatus::InvalidArgument);
        let nan = [f64::NAN, 0.0];
        assert_eq!(bg_blackwell_observe(h, nan.as_ptr(), 2), BgStatus::InvalidArgument);
        let short = [0.0];
        assert_eq!(bg_blackwell_observe(h, short.as_ptr(), 1), BgStatus::InvalidArgument);
        bg_blackwell_free(h);
        bg_blackwell_free(ptr::null_mut());
        assert_eq!(bg_blackwell_dim(ptr::null()), 0);
    }
}

#[test]
fn experiment_report_matches_library_run() {
    let json = r#"{"app":{"name":"monotone_sm","n":4,"k":2},"horizon":64,"seed":5,
                   "adversary":{"kind":"alternating","seed":1}}"#;
    let c = CString::new(json).unwrap();
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(bg_run_experiment(c.as_ptr(), &mut r), BgStatus::Ok);
        assert_eq!(bg_report_rounds(r), 64);
        let mut cum = vec![0.0; 64];
        assert_eq!(bg_report_cum_regret(r, cum.as_mut_ptr(), 64), BgStatus::Ok);
        let direct = blackgreedy::harness::run_experiment(
            &blackgreedy::harness::ExperimentConfig::from_json(json).unwrap(),
        )
        .unwrap();
        assert_eq!(cum[63], direct.report.gamma_regret);
        assert_eq!(bg_report_gamma_regret(r), direct.report.gamma_regret);
        let s = bg_report_json(r);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        bg_string_free(s);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["horizon"], 64);
        bg_report_free(r);
    }
}

#[test]
fn bad_config_is_a_config_error() {
    let c = CString::new(r#"{"app":{"name":"nsm","n":2,"m":3},"horizon":0,"adversary":{"kind":"iid"}}"#).unwrap();
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(bg_run_experiment(c.as_ptr(), &mut r), BgStatus::ConfigError);
        assert!(r.is_null());
        assert!(last_error().contains("horizon"));
        assert_eq!(bg_run_experiment(ptr::null(), &mut r), BgStatus::NullPointer);
        assert!(bg_report_gamma_regret(ptr::null()).is_nan());
    }
}

#[test]
fn slope_fit_through_the_abi() {
    let t = [1024.0, 2048.0, 4096.0, 8192.0];
    let r: Vec<f64> = t.iter().map(|x: &f64| 3.0 * x.powf(0.5)).collect();
    let mut s = 0.0;
    unsafe {
        assert_eq!(bg_fit_slope(t.as_ptr(), r.as_ptr(), 4, &mut s), BgStatus::Ok);
        assert!((s - 0.5).abs() < 1e-9);
        let neg = [-1.0, 2.0, 3.0, 4.0];
        assert_eq!(bg_fit_slope(t.as_ptr(), neg.as_ptr(), 4, &mut s), BgStatus::InvalidArgument);
        assert!(s.is_finite());
        assert_eq!(bg_fit_slope(t.as_ptr(), r.as_ptr(), 3, &mut s), BgStatus::InvalidArgument);
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(bg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("blackgreedy.h")
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).expect("build script writes the header");
    for name in [
        "bg_last_error_message",
        "bg_version",
        "bg_blackwell_new",
        "bg_blackwell_dim",
        "bg_blackwell_theta",
        "bg_blackwell_observe",
        "bg_blackwell_free",
        "bg_run_experiment",
        "bg_report_gamma_regret",
        "bg_report_rounds",
        "bg_report_cum_regret",
        "bg_report_json",
        "bg_report_free",
        "bg_string_free",
        "bg_fit_slope",
        "typedef struct BgBlackwell BgBlackwell",
        "BG_STATUS_CONTRACT_VIOLATION = 4",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include "blackgreedy.h"
int main(void) {
    BgBlackwell *h = NULL;
    if (bg_blackwell_new(2, 2.0, 10, BG_RESPONDER_PROPORTIONAL, &h) != BG_STATUS_OK) return 1;
    double p[2] = {-1.0, 1.0}, theta[2];
    if (bg_blackwell_observe(h, p, 2) != BG_STATUS_OK) return 2;
    if (bg_blackwell_theta(h, theta, 2) != BG_STATUS_OK) return 3;
    bg_blackwell_free(h);
    if (bg_blackwell_new(0, 2.0, 10, BG_RESPONDER_PROPORTIONAL, &h) != BG_STATUS_INVALID_ARGUMENT) return 4;
    printf("%.6f %.6f\n", theta[0], theta[1]);
    return theta[0] > theta[1] ? 0 : 5;
}
"#;

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn header_compiles_as_c_and_cpp() {
    if !have_cc() {
        eprintln!("no C compiler; skipping");
        return;
    }
    for (lang, std) in [("c", "-std=c11"), ("c++", "-std=c++17")] {
        let out = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, std])
            .arg(header())
            .output()
            .unwrap();
        assert!(out.status.success(), "{lang}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.parent().unwrap().join("libblackgreedy_ffi.a");
    if !have_cc() || !lib.exists() {
        eprintln!("no C compiler or static library at {}; skipping", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    let exe = dir.join("smoke");
    std::fs::write(&src, C_SMOKE).unwrap();
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}: {}", run.status, String::from_utf8_lossy(&run.stdout));
    std::fs::remove_dir_all(dir).ok();
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bg_ffi_smoke_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
