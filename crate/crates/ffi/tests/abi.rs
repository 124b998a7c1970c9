use std::ffi::{c_char, CStr, CString};
use std::ptr;

use moment_invariants_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { mi_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(mi_last_error()) }.to_str().unwrap().to_string()
}

fn parse(src: &str) -> Result<*mut MiProgram, MiStatus> {
    let c = CString::new(src).unwrap();
    let mut prog = ptr::null_mut();
    match unsafe { mi_program_parse(c.as_ptr(), &mut prog) } {
        MiStatus::Ok => Ok(prog),
        s => Err(s),
    }
}

fn analyze(prog: *const MiProgram, k: u32, variance: bool) -> *mut MiReport {
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { mi_analyze(prog, k, false, variance, &mut rep) }, MiStatus::Ok, "{}", last_error());
    rep
}

fn labels(rep: *const MiReport) -> Vec<String> {
    let mut count = 0usize;
    assert_eq!(unsafe { mi_report_moment_count(rep, &mut count) }, MiStatus::Ok);
    (0..count)
        .map(|i| {
            let mut s = ptr::null_mut();
            assert_eq!(unsafe { mi_report_moment_label(rep, i, &mut s) }, MiStatus::Ok);
            take(s)
        })
        .collect()
}

#[test]
fn binomial_round_trip() {
    let prog = parse("x := 0\nwhile true:\n    x := x + 1 [p] x\n").unwrap();
    let rep = analyze(prog, 2, true);
    let names = labels(rep);
    let i = names.iter().position(|l| l == "E[x^2(n)]").unwrap();
    let bindings = CString::new("p=1/2").unwrap();
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { mi_report_eval(rep, i, 4, bindings.as_ptr(), &mut v) }, MiStatus::Ok);
    // n²p² + np(1-p) at n = 4, p = 1/2
    assert_eq!(take(v), "5");

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { mi_report_to_text(rep, &mut text) }, MiStatus::Ok);
    assert!(take(text).contains("E[x(n)] = p*n"));
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { mi_report_to_json(rep, &mut json) }, MiStatus::Ok);
    assert!(take(json).starts_with('{'));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { mi_check(prog, rep, bindings.as_ptr(), 1000, 1, &mut out) }, MiStatus::Ok);
    assert!(take(out).contains("\"method\": \"exact\""));

    unsafe {
        mi_report_free(rep);
        mi_program_free(prog);
    }
}

#[test]
fn corpus_program_with_defaults() {
    let name = CString::new("StutteringA").unwrap();
    let mut prog = ptr::null_mut();
    assert_eq!(unsafe { mi_program_from_corpus(name.as_ptr(), &mut prog) }, MiStatus::Ok);
    let rep = analyze(prog, 1, false);
    let mut out = ptr::null_mut();
    let status = unsafe { mi_check(prog, rep, ptr::null(), 5000, 3, &mut out) };
    assert_eq!(status, MiStatus::Ok, "{}", last_error());
    assert!(take(out).contains("monte_carlo"));
    unsafe {
        mi_report_free(rep);
        mi_program_free(prog);
    }

    let missing = CString::new("Nope").unwrap();
    let mut prog = ptr::null_mut();
    assert_eq!(unsafe { mi_program_from_corpus(missing.as_ptr(), &mut prog) }, MiStatus::NotFound);
    assert!(prog.is_null());
}

#[test]
fn error_codes() {
    assert_eq!(parse("x := 1\nwhile true:\n    x := x +\n").unwrap_err(), MiStatus::ParseError);
    assert!(last_error().contains("ParseError"));
    assert_eq!(parse("x := 1\nwhile true:\n    x := x*x\n").unwrap_err(), MiStatus::ModelError);
    assert!(last_error().contains("NonlinearSelf"));

    let mut prog = ptr::null_mut();
    assert_eq!(unsafe { mi_program_parse(ptr::null(), &mut prog) }, MiStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { mi_program_parse(bad.as_ptr().cast(), &mut prog) }, MiStatus::InvalidUtf8);

    let prog = parse("x := 0\nwhile true:\n    x := x + 1 [p] x\n").unwrap();
    assert!(last_error().is_empty());
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { mi_analyze(prog, 0, false, false, &mut rep) }, MiStatus::AnalysisError);
    assert_eq!(unsafe { mi_analyze(ptr::null(), 1, false, false, &mut rep) }, MiStatus::NullPointer);
    assert_eq!(unsafe { mi_analyze(prog, 1, false, false, ptr::null_mut()) }, MiStatus::NullPointer);

    let rep = analyze(prog, 1, false);
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { mi_report_eval(rep, 0, 3, ptr::null(), &mut v) }, MiStatus::EvalError);
    assert!(last_error().contains('p'));
    assert_eq!(unsafe { mi_report_eval(rep, 99, 3, ptr::null(), &mut v) }, MiStatus::NotFound);

    // no default for p
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { mi_check(prog, rep, ptr::null(), 100, 1, &mut out) }, MiStatus::EvalError);
    take(out);

    unsafe {
        mi_report_free(rep);
        mi_program_free(prog);
        mi_report_free(ptr::null_mut());
        mi_program_free(ptr::null_mut());
        mi_string_free(ptr::null_mut());
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(mi_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/moment_invariants.h")).unwrap();
    for f in [
        "mi_version", "mi_last_error", "mi_program_parse", "mi_program_from_corpus", "mi_program_free", "mi_analyze",
        "mi_report_free", "mi_report_to_json", "mi_report_to_text", "mi_report_moment_count",
        "mi_report_moment_label", "mi_report_eval", "mi_check", "mi_string_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("MI_STATUS_OK = 0"));
    assert!(header.contains("typedef struct MiProgram MiProgram;"));
}

/// Compiles a C caller against the header, when a C compiler is present.
#[test]
fn header_compiles_as_c() {
    let Ok(cc) = std::process::Command::new("cc").arg("--version").output() else { return };
    if !cc.status.success() {
        return;
    }
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = dir.join("mi_smoke.c");
    std::fs::write(
        &src,
        r#"#include "moment_invariants.h"
int run(void) {
    MiProgram *prog = NULL;
    MiReport *rep = NULL;
    char *text = NULL;
    size_t count = 0;
    if (mi_program_parse("x := 0\nwhile true:\n    x := x + 1\n", &prog) != MI_STATUS_OK) return 1;
    if (mi_analyze(prog, 2, false, true, &rep) != MI_STATUS_OK) return 2;
    mi_report_moment_count(rep, &count);
    mi_report_eval(rep, 0, 3, NULL, &text);
    mi_string_free(text);
    mi_report_free(rep);
    mi_program_free(prog);
    return mi_last_error()[0] != 0 || mi_version() == NULL;
}
"#,
    )
    .unwrap();
    let out = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
