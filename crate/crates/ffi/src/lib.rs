//! C ABI over `curvkit`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns a [`CkStatus`] and
//! records a message readable through [`ck_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use curvkit::catalog::lookup;
use curvkit::classifier::{aggregate, ClassificationReport, SamplingConfig};
use curvkit::dsl::{parse_metric_file, MetricSpec};
use curvkit::invariants::Tolerances;
use curvkit::output::to_json;
use curvkit::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Numeric = 5,
    UnknownEntry = 6,
    Panic = 7,
}

/// A parsed metric definition.
pub struct CkMetric {
    spec: MetricSpec,
}

/// A classification report with its JSON rendering.
pub struct CkReport {
    report: ClassificationReport,
    json: CString,
}

/// Sampling options. `k = 0` means `order − 2`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CkConfig {
    pub points: usize,
    pub seed: u64,
    pub order: usize,
    pub k: usize,
    pub tol_rel: f64,
    pub tol_abs: f64,
}

/// Aggregate verdicts; each field is 1 when the condition holds at every
/// evaluated point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CkVerdicts {
    pub constant_curvature: u8,
    pub symmetric: u8,
    pub two_symmetric: u8,
    pub semisymmetric: u8,
    pub ricci_flat: u8,
    pub generic: u8,
    pub lorentzian: u8,
    pub findings_pass: u8,
    pub points_evaluated: usize,
    pub points_skipped: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CkStatus {
    match e {
        _ if e.is_numeric() => CkStatus::Numeric,
        Error::Parse { .. } | Error::Component { .. } => CkStatus::Parse,
        Error::UnknownCatalogEntry(_) => CkStatus::UnknownEntry,
        _ => CkStatus::InvalidArgument,
    }
}

fn fail(status: CkStatus, msg: &str) -> CkStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> CkStatus) -> CkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == CkStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(CkStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, CkStatus> {
    if p.is_null() {
        return Err(fail(CkStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(CkStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn store_metric(spec: Result<MetricSpec, Error>, out: *mut *mut CkMetric) -> CkStatus {
    match spec {
        Ok(spec) => {
            // SAFETY: callers checked `out` for null.
            unsafe { *out = Box::into_raw(Box::new(CkMetric { spec })) };
            CkStatus::Ok
        }
        Err(e) => fail(status_of(&e), &e.to_string()),
    }
}

/// Defaults: 20 points, seed 42, order 4, tolerances 1e-8 / 1e-10.
#[no_mangle]
pub extern "C" fn ck_config_default() -> CkConfig {
    let d = SamplingConfig::default();
    CkConfig { points: d.points, seed: d.seed, order: d.order, k: 0, tol_rel: d.tol.rel, tol_abs: d.tol.abs }
}

/// Parses a metric file held in `text`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_metric_parse(text: *const c_char, out: *mut *mut CkMetric) -> CkStatus {
    guard(|| {
        if out.is_null() {
            return fail(CkStatus::NullPointer, "null output pointer");
        }
        match read_str(text) {
            Ok(s) => store_metric(parse_metric_file(s), out),
            Err(s) => s,
        }
    })
}

/// Looks up a built-in metric by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ck_metric_from_catalog(name: *const c_char, out: *mut *mut CkMetric) -> CkStatus {
    guard(|| {
        if out.is_null() {
            return fail(CkStatus::NullPointer, "null output pointer");
        }
        match read_str(name) {
            Ok(s) => store_metric(lookup(s).map(|e| e.spec), out),
            Err(s) => s,
        }
    })
}

/// Spacetime dimension, or 0 for a null handle.
///
/// # Safety
/// `metric` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ck_metric_dim(metric: *const CkMetric) -> usize {
    metric.as_ref().map_or(0, |m| m.spec.dim())
}

/// # Safety
/// `metric` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_metric_free(metric: *mut CkMetric) {
    if !metric.is_null() {
        drop(Box::from_raw(metric));
    }
}

/// Samples and classifies `metric`. A null `config` uses the defaults.
///
/// # Safety
/// `metric` must be a live handle, `config` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ck_classify(metric: *const CkMetric, config: *const CkConfig, out: *mut *mut CkReport) -> CkStatus {
    guard(|| {
        let Some(m) = metric.as_ref() else {
            return fail(CkStatus::NullPointer, "null metric handle");
        };
        if out.is_null() {
            return fail(CkStatus::NullPointer, "null output pointer");
        }
        let c = config.as_ref().copied().unwrap_or_else(|| ck_config_default());
        let cfg = SamplingConfig {
            points: c.points,
            seed: c.seed,
            order: c.order,
            k: (c.k > 0).then_some(c.k),
            tol: Tolerances { rel: c.tol_rel, abs: c.tol_abs },
        };
        match aggregate(&m.spec, &cfg) {
            Ok(report) => {
                let json = CString::new(to_json(&report)).unwrap_or_default();
                *out = Box::into_raw(Box::new(CkReport { report, json }));
                CkStatus::Ok
            }
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ck_report_verdicts(report: *const CkReport, out: *mut CkVerdicts) -> CkStatus {
    guard(|| {
        let (Some(r), false) = (report.as_ref(), out.is_null()) else {
            return fail(CkStatus::NullPointer, "null argument");
        };
        let a = &r.report.aggregate;
        *out = CkVerdicts {
            constant_curvature: a.constant_curvature.into(),
            symmetric: a.symmetric.into(),
            two_symmetric: a.two_symmetric.into(),
            semisymmetric: a.semisymmetric.into(),
            ricci_flat: a.ricci_flat.into(),
            generic: a.generic.into(),
            lorentzian: a.lorentzian.into(),
            findings_pass: r.report.findings_pass().into(),
            points_evaluated: a.points_evaluated,
            points_skipped: a.points_skipped,
        };
        CkStatus::Ok
    })
}

/// The report as JSON. The string is owned by the report and lives until
/// [`ck_report_free`].
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ck_report_json(report: *const CkReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ck_report_free(report: *mut CkReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next `ck_*` call on the same thread.
#[no_mangle]
pub extern "C" fn ck_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn ck_status_name(status: CkStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CkStatus::Ok => c"ok",
        CkStatus::NullPointer => c"null_pointer",
        CkStatus::InvalidUtf8 => c"invalid_utf8",
        CkStatus::Parse => c"parse",
        CkStatus::InvalidArgument => c"invalid_argument",
        CkStatus::Numeric => c"numeric",
        CkStatus::UnknownEntry => c"unknown_entry",
        CkStatus::Panic => c"panic",
    };
    s.as_ptr()
}
