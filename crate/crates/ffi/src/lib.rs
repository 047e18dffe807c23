// SPDX-License-Identifier: Apache-2.0

//! C interface to the stimresp checker.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `_free` function. Strings returned to C are NUL-terminated,
//! heap-allocated and released with [`stimresp_string_free`]. No function
//! unwinds across the boundary: a Rust panic is reported as
//! [`StimrespStatus::Panic`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Instant;

use stimresp::cli::report::Report;
use stimresp::explorer::CheckOptions;
use stimresp::lgs_corpus;
use stimresp::{check_all_with, parse_model, parse_requirements, reach, Model, SpecError, Status};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StimrespStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Syntax error in a model or requirement source.
    Parse = 3,
    /// Well-formed source that fails name resolution or type checking.
    Semantic = 4,
    /// The model's `main` rule produced conflicting updates.
    Crash = 5,
    IndexOutOfRange = 6,
    Panic = 7,
}

/// Outcome of one requirement.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StimrespVerdict {
    Pass = 0,
    Fail = 1,
    Crash = 2,
}

/// A parsed model together with the source it came from.
pub struct StimrespModel {
    model: Model,
    source: String,
}

/// The result of checking a requirement file against a model.
pub struct StimrespReport {
    report: Report,
}

fn guard(f: impl FnOnce() -> StimrespStatus) -> StimrespStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(StimrespStatus::Panic)
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, StimrespStatus> {
    if p.is_null() {
        return Err(StimrespStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| StimrespStatus::InvalidUtf8)
}

fn to_c(s: &str) -> *mut c_char {
    // Interior NULs cannot occur in our output; strip them defensively.
    CString::new(s.replace('\0', "")).unwrap().into_raw()
}

unsafe fn set_error(err: *mut *mut c_char, msg: &str) {
    if !err.is_null() {
        *err = to_c(msg);
    }
}

fn spec_status(e: &SpecError) -> StimrespStatus {
    if e.is_semantic() {
        StimrespStatus::Semantic
    } else {
        StimrespStatus::Parse
    }
}

/// Parses a model from NUL-terminated UTF-8 `source`.
///
/// On success `*out` receives a new handle. On a parse or type error `*err`
/// (if non-null) receives a message to be freed with `stimresp_string_free`.
///
/// # Safety
/// `source` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stimresp_model_parse(
    source: *const c_char,
    out: *mut *mut StimrespModel,
    err: *mut *mut c_char,
) -> StimrespStatus {
    guard(|| {
        if out.is_null() {
            return StimrespStatus::NullPointer;
        }
        let src = match read_str(source) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match parse_model(src) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(StimrespModel {
                    model,
                    source: src.to_owned(),
                }));
                StimrespStatus::Ok
            }
            Err(e) => {
                set_error(err, &e.to_string());
                spec_status(&e)
            }
        }
    })
}

fn bundled(source: &str) -> *mut StimrespModel {
    catch_unwind(|| {
        Box::into_raw(Box::new(StimrespModel {
            model: parse_model(source).expect("bundled model parses"),
            source: source.to_owned(),
        }))
    })
    .unwrap_or(ptr::null_mut())
}

/// The bundled landing-gear model with the extension sequence fixed.
#[no_mangle]
pub extern "C" fn stimresp_model_lgs_fixed() -> *mut StimrespModel {
    bundled(lgs_corpus::LGS_FIXED_SRC)
}

/// The bundled landing-gear model that stalls on an opening door.
#[no_mangle]
pub extern "C" fn stimresp_model_lgs_original() -> *mut StimrespModel {
    bundled(lgs_corpus::LGS_ORIGINAL_SRC)
}

/// The bundled requirement file for the landing-gear models. Static; do not free.
#[no_mangle]
pub extern "C" fn stimresp_lgs_requirements() -> *const c_char {
    static REQS: std::sync::OnceLock<CString> = std::sync::OnceLock::new();
    REQS.get_or_init(|| CString::new(lgs_corpus::LGS_REQS_SRC).unwrap())
        .as_ptr()
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stimresp_model_free(model: *mut StimrespModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of states reachable from the model's init states.
///
/// Returns `Crash` if some reachable step has conflicting updates.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stimresp_model_reach_count(
    model: *const StimrespModel,
    out: *mut usize,
) -> StimrespStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return StimrespStatus::NullPointer;
        }
        match reach(&(*model).model) {
            Ok(set) => {
                *out = set.len();
                StimrespStatus::Ok
            }
            Err(_) => StimrespStatus::Crash,
        }
    })
}

/// Checks every requirement in `requirements` from every reachable state.
///
/// `workers` above 1 checks start states on a thread pool; results do not
/// depend on it. A failing requirement is not an error: inspect the report.
///
/// # Safety
/// `model` must be a live handle, `requirements` a valid C string and `out`
/// writable. `err` may be null.
#[no_mangle]
pub unsafe extern "C" fn stimresp_check(
    model: *const StimrespModel,
    requirements: *const c_char,
    workers: usize,
    out: *mut *mut StimrespReport,
    err: *mut *mut c_char,
) -> StimrespStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return StimrespStatus::NullPointer;
        }
        let m = &*model;
        let src = match read_str(requirements) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let reqs = match parse_requirements(src, &m.model) {
            Ok(r) => r,
            Err(e) => {
                set_error(err, &e.to_string());
                return spec_status(&e);
            }
        };
        let t0 = Instant::now();
        let opts = CheckOptions {
            workers,
            ..CheckOptions::default()
        };
        let verdicts = check_all_with(&m.model, &reqs, &opts);
        let report = Report::new(&m.model, m.source.as_bytes(), &verdicts, t0.elapsed());
        *out = Box::into_raw(Box::new(StimrespReport { report }));
        StimrespStatus::Ok
    })
}

/// Number of verdicts in the report; 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stimresp_report_len(report: *const StimrespReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.verdicts.len())
}

/// Whether every requirement passed; false for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stimresp_report_passed(report: *const StimrespReport) -> bool {
    report.as_ref().is_some_and(|r| r.report.all_pass())
}

/// Verdict of the `index`-th requirement, in file order.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stimresp_report_verdict(
    report: *const StimrespReport,
    index: usize,
    out: *mut StimrespVerdict,
) -> StimrespStatus {
    if report.is_null() || out.is_null() {
        return StimrespStatus::NullPointer;
    }
    let report = &*report;
    match report.report.verdicts.get(index) {
        None => StimrespStatus::IndexOutOfRange,
        Some(v) => {
            *out = match v.status {
                Status::Pass => StimrespVerdict::Pass,
                Status::Fail => StimrespVerdict::Fail,
                Status::Crash => StimrespVerdict::Crash,
            };
            StimrespStatus::Ok
        }
    }
}

/// Name of the `index`-th requirement, or null if out of range.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stimresp_report_name(report: *const StimrespReport, index: usize) -> *mut c_char {
    report
        .as_ref()
        .and_then(|r| r.report.verdicts.get(index))
        .map_or(ptr::null_mut(), |v| to_c(&v.name))
}

/// The report in the CLI's JSON format, or null for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stimresp_report_to_json(report: *const StimrespReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| to_c(&r.report.to_json()))
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stimresp_report_free(report: *mut StimrespReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stimresp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version. Static; do not free.
#[no_mangle]
pub extern "C" fn stimresp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
