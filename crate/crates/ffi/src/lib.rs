//! C ABI for `ipscore`.
//!
//! Objects cross the boundary as opaque handles created by `ips_*_new`-style
//! constructors and released with the matching `ips_*_free`. Every fallible
//! call returns an [`IpsStatus`]; on failure `ips_last_error` returns a
//! message for the calling thread. Strings returned by the library must be
//! released with [`ips_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ipscore::harness::{cmd_landscape, cmd_score, cmd_verify, landscape_csv, RunConfig};
use ipscore::ip_scoring::ReportValuer;
use ipscore::probability::{credal_equivalent, CredalSet};
use ipscore::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    SpaceMismatch = 4,
    TooManyGenerators = 5,
    Io = 6,
    Json = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// A credal set.
pub struct IpsCredalSet(CredalSet);

/// A scoring rule built from a run configuration.
pub struct IpsRule {
    config: RunConfig,
    valuer: Box<dyn ReportValuer>,
    n_outcomes: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> IpsStatus {
    match e {
        Error::Argument(_) => IpsStatus::InvalidArgument,
        Error::SpaceMismatch(_) => IpsStatus::SpaceMismatch,
        Error::TooManyGenerators { .. } => IpsStatus::TooManyGenerators,
        Error::Io(_) => IpsStatus::Io,
        Error::Json(_) => IpsStatus::Json,
    }
}

fn fail(status: IpsStatus, msg: impl Into<String>) -> IpsStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), IpsStatus>) -> IpsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IpsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(IpsStatus::Panic, "internal panic"),
    }
}

fn lib<T>(r: ipscore::Result<T>) -> Result<T, IpsStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, IpsStatus> {
    if s.is_null() {
        return Err(fail(IpsStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(IpsStatus::InvalidUtf8, "string is not valid UTF-8"))
}

unsafe fn read_ref<'a, T>(p: *const T) -> Result<&'a T, IpsStatus> {
    p.as_ref().ok_or_else(|| fail(IpsStatus::NullPointer, "null handle"))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), IpsStatus> {
    if out.is_null() {
        return Err(fail(IpsStatus::NullPointer, "null output pointer"));
    }
    out.write(v);
    Ok(())
}

fn to_c_string(s: String) -> Result<*mut c_char, IpsStatus> {
    CString::new(s).map(CString::into_raw).map_err(|_| fail(IpsStatus::InvalidArgument, "output contains a nul byte"))
}

fn parse_config(json: &str) -> Result<RunConfig, IpsStatus> {
    lib(RunConfig::from_json(json))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ips_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ips_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `{"outcomes": [...], "generators": [[...], ...]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ips_credal_set_from_json(json: *const c_char, out: *mut *mut IpsCredalSet) -> IpsStatus {
    guard(|| {
        let text = read_str(json)?;
        let set: CredalSet = serde_json::from_str(text).map_err(|e| fail(IpsStatus::Json, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(IpsCredalSet(set))))
    })
}

/// Binary interval `{Bern(lo), Bern(hi)}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ips_credal_set_interval(lo: f64, hi: f64, out: *mut *mut IpsCredalSet) -> IpsStatus {
    guard(|| {
        let set = lib(CredalSet::interval(lo, hi))?;
        write_out(out, Box::into_raw(Box::new(IpsCredalSet(set))))
    })
}

/// # Safety
/// `set` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ips_credal_set_free(set: *mut IpsCredalSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of outcomes and extreme points.
///
/// # Safety
/// `set` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ips_credal_set_shape(
    set: *const IpsCredalSet,
    n_outcomes: *mut usize,
    n_extremes: *mut usize,
) -> IpsStatus {
    guard(|| {
        let s = &read_ref(set)?.0;
        write_out(n_outcomes, s.outcome_count())?;
        write_out(n_extremes, s.extreme_points().len())
    })
}

/// Copies the extreme points, row-major, into `buf` of `len` doubles.
///
/// # Safety
/// `set` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ips_credal_set_extreme_points(
    set: *const IpsCredalSet,
    buf: *mut f64,
    len: usize,
) -> IpsStatus {
    guard(|| {
        let s = &read_ref(set)?.0;
        let ext = s.extreme_points();
        let need = ext.len() * s.outcome_count();
        if buf.is_null() {
            return Err(fail(IpsStatus::NullPointer, "null buffer"));
        }
        if len < need {
            return Err(fail(IpsStatus::BufferTooSmall, format!("need {need} doubles, got {len}")));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (row, e) in dst.chunks_mut(s.outcome_count()).zip(ext) {
            row.copy_from_slice(e.probs());
        }
        Ok(())
    })
}

/// Whether the two sets have the same convex hull.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ips_credal_equivalent(
    a: *const IpsCredalSet,
    b: *const IpsCredalSet,
    out: *mut bool,
) -> IpsStatus {
    guard(|| {
        let eq = lib(credal_equivalent(&read_ref(a)?.0, &read_ref(b)?.0))?;
        write_out(out, eq)
    })
}

/// Builds the rule a run configuration describes (JSON; `{}` gives the
/// defaults). The problem is sized to the configured belief.
///
/// # Safety
/// `config_json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ips_rule_from_config(config_json: *const c_char, out: *mut *mut IpsRule) -> IpsStatus {
    guard(|| {
        let config = parse_config(read_str(config_json)?)?;
        let n_outcomes = lib(config.belief())?.outcome_count();
        let valuer = lib(config.valuer(n_outcomes))?;
        write_out(out, Box::into_raw(Box::new(IpsRule { config, valuer, n_outcomes })))
    })
}

/// # Safety
/// `rule` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ips_rule_free(rule: *mut IpsRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// Forecaster value of `report` under `belief`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ips_rule_value(
    rule: *const IpsRule,
    belief: *const IpsCredalSet,
    report: *const IpsCredalSet,
    out: *mut f64,
) -> IpsStatus {
    guard(|| {
        let r = read_ref(rule)?;
        let (b, q) = (&read_ref(belief)?.0, &read_ref(report)?.0);
        for s in [b, q] {
            if s.outcome_count() != r.n_outcomes {
                return Err(fail(IpsStatus::SpaceMismatch, "set does not match the rule's outcome count"));
            }
        }
        write_out(out, lib(r.valuer.value(b, q))?)
    })
}

/// Score paid for `report` when `outcome` occurs. In randomized mode the
/// weights are drawn with the configured seed.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ips_rule_score(
    rule: *const IpsRule,
    report: *const IpsCredalSet,
    outcome: usize,
    out: *mut f64,
) -> IpsStatus {
    guard(|| {
        let r = read_ref(rule)?;
        let s = lib(cmd_score(&r.config, &read_ref(report)?.0, outcome))?;
        write_out(out, s.score)
    })
}

/// Runs properness verification for a run configuration and returns the
/// verdict JSON in `out_json`. `verdict_met` receives whether the mode's
/// expected verdict holds.
///
/// # Safety
/// `config_json` must be a nul-terminated string; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ips_verify(
    config_json: *const c_char,
    verdict_met: *mut bool,
    out_json: *mut *mut c_char,
) -> IpsStatus {
    guard(|| {
        let config = parse_config(read_str(config_json)?)?;
        let outcome = lib(cmd_verify(&config))?;
        let json = serde_json::to_string(&outcome).map_err(|e| fail(IpsStatus::Json, e.to_string()))?;
        write_out(verdict_met, outcome.verdict_met)?;
        write_out(out_json, to_c_string(json)?)
    })
}

/// Score landscape as CSV text (`q1,q2,value`). Also written to the
/// configured `out` path when one is set.
///
/// # Safety
/// `config_json` must be a nul-terminated string; `out_csv` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ips_landscape_csv(config_json: *const c_char, out_csv: *mut *mut c_char) -> IpsStatus {
    guard(|| {
        let config = parse_config(read_str(config_json)?)?;
        let landscape = lib(cmd_landscape(&config))?;
        write_out(out_csv, to_c_string(landscape_csv(&landscape))?)
    })
}
