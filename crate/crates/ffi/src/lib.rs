//! C ABI over `blackgreedy`: opaque handles for a Blackwell learner and for experiment
//! reports, status codes, and a per-thread last-error message.
//!
//! Every function returns a [`BgStatus`] (or a plain value for infallible accessors) and
//! never unwinds across the boundary. Handles are created by `*_new`/`bg_run_experiment`
//! and must be released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use blackgreedy::harness::{self, ExperimentConfig, RunOutput};
use blackgreedy::{BlackwellLearner, Error, Responder};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    ContractViolation = 4,
    SolverError = 5,
    IoError = 6,
    Panic = 7,
}

/// Response oracle of a learner.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgResponder {
    /// `θ ∝ −w` (pure-form payoffs).
    Proportional = 0,
    /// Saddle-point response for lattice bi-greedy payoffs.
    NsmSaddle = 1,
}

/// Opaque full-information Blackwell learner.
pub struct BgBlackwell(BlackwellLearner);

/// Opaque result of an experiment run.
pub struct BgReport(RunOutput);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> BgStatus {
    if e.is_contract_violation() {
        return BgStatus::ContractViolation;
    }
    match e {
        Error::Config(_) | Error::Json(_) | Error::TooLargeToEnumerate { .. } => BgStatus::ConfigError,
        Error::Io(_) | Error::Csv(_) => BgStatus::IoError,
        Error::SaddleValuePositive { .. } | Error::LpInfeasible(_) | Error::InfeasibleTheta { .. } => {
            BgStatus::SolverError
        }
        _ => BgStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (BgStatus, String)>) -> BgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside blackgreedy");
            BgStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (BgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BgStatus, String) {
    (BgStatus::NullPointer, format!("{what} is null"))
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call
/// on the same thread; do not free.
#[no_mangle]
pub extern "C" fn bg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a learner over `d` coordinates with payoff diameter `payoff_diameter`;
/// `horizon = 0` selects anytime learning rates. `BG_RESPONDER_NSM_SADDLE` requires `d ≥ 2`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_blackwell_new(
    d: usize,
    payoff_diameter: f64,
    horizon: usize,
    responder: BgResponder,
    out: *mut *mut BgBlackwell,
) -> BgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if d == 0 || !(payoff_diameter > 0.0) || !payoff_diameter.is_finite() {
            return Err((BgStatus::InvalidArgument, "need d ≥ 1 and a positive finite diameter".into()));
        }
        let responder = match responder {
            BgResponder::Proportional => Responder::Proportional,
            BgResponder::NsmSaddle if d >= 2 => Responder::NsmSaddle { m: d },
            BgResponder::NsmSaddle => {
                return Err((BgStatus::InvalidArgument, "saddle responder needs d ≥ 2".into()))
            }
        };
        let horizon = (horizon > 0).then_some(horizon);
        let learner = BlackwellLearner::new(d, payoff_diameter, horizon, responder);
        *out = Box::into_raw(Box::new(BgBlackwell(learner)));
        Ok(())
    })
}

/// Number of coordinates of the learner, 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle from `bg_blackwell_new`.
#[no_mangle]
pub unsafe extern "C" fn bg_blackwell_dim(h: *const BgBlackwell) -> usize {
    h.as_ref().map_or(0, |h| h.0.dim())
}

/// Copies the current action `θ` into `out[0..len]`; `len` must equal the dimension.
///
/// # Safety
/// `h` must be a live handle; `out` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn bg_blackwell_theta(h: *const BgBlackwell, out: *mut f64, len: usize) -> BgStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let theta = h.0.theta().probs();
        if len != theta.len() {
            return Err((BgStatus::InvalidArgument, format!("expected length {}, got {len}", theta.len())));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(theta);
        Ok(())
    })
}

/// Feeds one payoff vector `payoff[0..len]` and updates the action.
///
/// # Safety
/// `h` must be a live handle; `payoff` must be valid for `len` reads.
#[no_mangle]
pub unsafe extern "C" fn bg_blackwell_observe(h: *mut BgBlackwell, payoff: *const f64, len: usize) -> BgStatus {
    guard(|| {
        let h = h.as_mut().ok_or_else(|| null("handle"))?;
        if payoff.is_null() {
            return Err(null("payoff"));
        }
        let p = std::slice::from_raw_parts(payoff, len);
        if p.iter().any(|x| !x.is_finite()) {
            return Err((BgStatus::InvalidArgument, "payoff must be finite".into()));
        }
        h.0.observe(p).map(|_| ()).map_err(lib_err)
    })
}

/// Releases a learner; null is a no-op.
///
/// # Safety
/// `h` must be null or a handle from `bg_blackwell_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_blackwell_free(h: *mut BgBlackwell) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Runs the experiment described by the JSON config (same schema as the CLI) without writing
/// any file, and returns its report.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn bg_run_experiment(config_json: *const c_char, out: *mut *mut BgReport) -> BgStatus {
    guard(|| {
        if config_json.is_null() {
            return Err(null("config_json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(config_json)
            .to_str()
            .map_err(|e| (BgStatus::ConfigError, format!("config is not UTF-8: {e}")))?;
        let cfg = ExperimentConfig::from_json(text).map_err(lib_err)?;
        let run = harness::run_experiment(&cfg).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(BgReport(run)));
        Ok(())
    })
}

/// Final γ-regret of the run, NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn bg_report_gamma_regret(r: *const BgReport) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.report.gamma_regret)
}

/// Number of rounds in the run, 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn bg_report_rounds(r: *const BgReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.rows.len())
}

/// Copies the cumulative γ-regret after every round into `out[0..len]`; `len` must equal
/// the number of rounds.
///
/// # Safety
/// `r` must be a live report handle; `out` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn bg_report_cum_regret(r: *const BgReport, out: *mut f64, len: usize) -> BgStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len != r.0.rows.len() {
            return Err((BgStatus::InvalidArgument, format!("expected length {}, got {len}", r.0.rows.len())));
        }
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (d, row) in dst.iter_mut().zip(&r.0.rows) {
            *d = row.cum_gamma_regret;
        }
        Ok(())
    })
}

/// Summary of the run as a JSON string owned by the caller (free with `bg_string_free`), or
/// null on failure.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn bg_report_json(r: *const BgReport) -> *mut c_char {
    let mut result = ptr::null_mut();
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let json = serde_json::to_string(&r.0.report).map_err(|e| (BgStatus::InvalidArgument, e.to_string()))?;
        result = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    });
    result
}

/// Releases a report; null is a no-op.
///
/// # Safety
/// `r` must be null or a report handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_report_free(r: *mut BgReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Releases a string returned by this library; null is a no-op.
///
/// # Safety
/// `s` must be null or a string from `bg_report_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Log-log least-squares slope of `regrets` against `horizons` (at least four points). On
/// nonpositive regrets returns `BG_STATUS_INVALID_ARGUMENT` and still writes the slope of the
/// data clamped at 1e-9.
///
/// # Safety
/// `horizons` and `regrets` must be valid for `len` reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn bg_fit_slope(horizons: *const f64, regrets: *const f64, len: usize, out: *mut f64) -> BgStatus {
    guard(|| {
        if horizons.is_null() || regrets.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let t = std::slice::from_raw_parts(horizons, len);
        let r = std::slice::from_raw_parts(regrets, len);
        let pts: Vec<(f64, f64)> = t.iter().copied().zip(r.iter().copied()).collect();
        match harness::fit_slope(&pts) {
            Ok(s) => {
                *out = s;
                Ok(())
            }
            Err(e) => {
                if let Error::DegenerateFit { clamped_slope: Some(s), .. } = &e {
                    *out = *s;
                }
                Err(lib_err(e))
            }
        }
    })
}
