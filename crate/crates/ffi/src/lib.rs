//! C interface to the analyzer.
//!
//! Every function returns an [`MiStatus`]; on failure a message is kept
//! for the calling thread and can be read with [`mi_last_error`]. Strings
//! handed out by the library are released with [`mi_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use moment_invariants::algebra::Bindings;
use moment_invariants::corpus::{self, parse_bindings};
use moment_invariants::frontend::{load, FrontendError, ValidatedProgram};
use moment_invariants::invariants::{analyze_with, AnalysisRequest, InvariantReport};
use moment_invariants::validator::{check, CheckConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ModelError = 4,
    AnalysisError = 5,
    NotFound = 6,
    EvalError = 7,
    ValidationFailed = 8,
    Panic = 9,
}

/// A parsed and validated program.
pub struct MiProgram {
    name: String,
    vp: ValidatedProgram,
    bindings: Bindings,
}

/// Closed forms computed for one program.
pub struct MiReport {
    report: InvariantReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(MiStatus, String);

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MiStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MiStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(MiStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(MiStatus::InvalidUtf8, e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(MiStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(MiStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn frontend_failure(e: FrontendError) -> Failure {
    let status = match e {
        FrontendError::Parse(_) => MiStatus::ParseError,
        FrontendError::Model(_) => MiStatus::ModelError,
    };
    Failure(status, e.to_string())
}

/// Parses `a=1/2,b=3`; null or empty means no bindings.
unsafe fn bindings_arg(p: *const c_char) -> Result<Bindings, Failure> {
    if p.is_null() {
        return Ok(Bindings::new());
    }
    let s = text(p)?;
    let pairs = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.split_once('=').unwrap_or((t, "")));
    parse_bindings(pairs).map_err(|e| Failure(MiStatus::EvalError, e))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `source` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_program_parse(source: *const c_char, out: *mut *mut MiProgram) -> MiStatus {
    guard(|| {
        let src = text(source)?;
        let vp = load(src).map_err(frontend_failure)?;
        let prog = MiProgram { name: "program".into(), vp, bindings: Bindings::new() };
        put(out, Box::into_raw(Box::new(prog)))
    })
}

/// Loads a bundled benchmark program, with its default parameter values.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_program_from_corpus(name: *const c_char, out: *mut *mut MiProgram) -> MiStatus {
    guard(|| {
        let name = text(name)?;
        let p = corpus::find(name).ok_or_else(|| Failure(MiStatus::NotFound, format!("no corpus program `{name}`")))?;
        let vp = p.load().map_err(frontend_failure)?;
        let prog = MiProgram { name: p.name.into(), vp, bindings: p.default_bindings() };
        put(out, Box::into_raw(Box::new(prog)))
    })
}

/// # Safety
/// `prog` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mi_program_free(prog: *mut MiProgram) {
    if !prog.is_null() {
        drop(Box::from_raw(prog));
    }
}

/// Raw moments up to order `k`, plus central moments and variances when
/// the flags are set.
///
/// # Safety
/// `prog` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_analyze(
    prog: *const MiProgram,
    k: u32,
    central: bool,
    variance: bool,
    out: *mut *mut MiReport,
) -> MiStatus {
    guard(|| {
        let prog = deref(prog)?;
        let req = AnalysisRequest { central, variance, ..AnalysisRequest::moments(k) };
        let report = analyze_with(&prog.vp, &prog.name, &req)
            .map_err(|e| Failure(MiStatus::AnalysisError, e.to_string()))?;
        put(out, Box::into_raw(Box::new(MiReport { report })))
    })
}

/// # Safety
/// `rep` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mi_report_free(rep: *mut MiReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// # Safety
/// `rep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_report_to_json(rep: *const MiReport, out: *mut *mut c_char) -> MiStatus {
    guard(|| put(out, owned(deref(rep)?.report.to_json())))
}

/// # Safety
/// `rep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_report_to_text(rep: *const MiReport, out: *mut *mut c_char) -> MiStatus {
    guard(|| put(out, owned(deref(rep)?.report.to_text())))
}

/// # Safety
/// `rep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_report_moment_count(rep: *const MiReport, out: *mut usize) -> MiStatus {
    guard(|| put(out, deref(rep)?.report.moments.len()))
}

/// Label of moment `index`, such as `E[x^2(n)]`.
///
/// # Safety
/// `rep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_report_moment_label(
    rep: *const MiReport,
    index: usize,
    out: *mut *mut c_char,
) -> MiStatus {
    guard(|| {
        let m = moment(deref(rep)?, index)?;
        put(out, owned(m.label()))
    })
}

fn moment(rep: &MiReport, index: usize) -> Result<&moment_invariants::invariants::MomentInvariant, Failure> {
    rep.report
        .moments
        .get(index)
        .ok_or_else(|| Failure(MiStatus::NotFound, format!("no moment at index {index}")))
}

/// Exact value of moment `index` at iteration `n`, written as a rational
/// string. `bindings` is `name=value` pairs separated by commas, or null.
///
/// # Safety
/// `rep` must be a live handle, `bindings` null or NUL-terminated, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_report_eval(
    rep: *const MiReport,
    index: usize,
    n: u64,
    bindings: *const c_char,
    out: *mut *mut c_char,
) -> MiStatus {
    guard(|| {
        let m = moment(deref(rep)?, index)?;
        let b = bindings_arg(bindings)?;
        let v = m.form.eval(n, &b).map_err(|e| Failure(MiStatus::EvalError, e.to_string()))?;
        put(out, owned(v.to_string()))
    })
}

/// Confirms the report by exact enumeration or simulation. The JSON
/// validation report is written to `out` either way; the status is
/// `VALIDATION_FAILED` when some comparison fails. Null `bindings` uses
/// the program's defaults.
///
/// # Safety
/// Handles must be live, `bindings` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_check(
    prog: *const MiProgram,
    rep: *const MiReport,
    bindings: *const c_char,
    runs: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> MiStatus {
    guard(|| {
        let prog = deref(prog)?;
        let rep = deref(rep)?;
        let mut b = prog.bindings.clone();
        b.extend(bindings_arg(bindings)?);
        let cfg = CheckConfig { runs, seed, ..CheckConfig::default() };
        let mc = check(&rep.report, &prog.vp, &b, &cfg);
        put(out, owned(mc.to_json()))?;
        match (&mc.error, mc.pass) {
            (Some(e), _) => Err(Failure(MiStatus::EvalError, e.clone())),
            (None, false) => Err(Failure(MiStatus::ValidationFailed, "validation failed".into())),
            (None, true) => Ok(()),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
