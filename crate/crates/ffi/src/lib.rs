//! C ABI over the fpcheck solver.
//!
//! Programs and reports are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an [`FpcError`];
//! the message of the last failure on the calling thread is available from
//! [`fpc_last_error`]. Strings returned to the caller are released with
//! [`fpc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use fpcheck::float::{FloatFormat, FloatValue};
use fpcheck::frontend::{parse_program, Program};
use fpcheck::pipeline::{select_suspect, solve_program, PipelineError, SolveResult, Status};
use fpcheck::report::RunReport;
use fpcheck::search::{SolverConfig, Strategy};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpcError {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The program text was rejected; see `fpc_last_error`.
    Parse = 3,
    InvalidArgument = 4,
    /// The solver detected an inconsistency; please report it.
    Internal = 5,
    Panic = 6,
}

/// Answer of a solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpcOutcome {
    Sat = 0,
    Unsat = 1,
    NotFound = 2,
    Unknown = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpcStrategy {
    Std = 0,
    Fpc = 1,
    Fp3s = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FpcSolveOptions {
    pub strategy: FpcStrategy,
    pub unroll: u32,
    /// Wall-clock budget; must be positive.
    pub timeout_ms: u64,
    /// Node budget; 0 means unlimited.
    pub node_limit: u64,
    /// Annotation index, or -1 to use the only annotation of the program.
    pub suspect: i64,
}

/// A parsed binary32 program.
pub struct FpcProgram {
    source: String,
    program: Program,
}

/// The outcome of a solve.
pub struct FpcReport {
    result: SolveResult,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn guard(f: impl FnOnce() -> Result<(), (FpcError, String)>) -> FpcError {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpcError::Ok,
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside fpcheck");
            FpcError::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, (FpcError, String)> {
    if s.is_null() {
        return Err((FpcError::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (FpcError::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn null(what: &str) -> (FpcError, String) {
    (FpcError::NullArgument, format!("{what} is null"))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fpc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn fpc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a program in the annotated language. On success `*out` owns a new
/// handle.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpc_program_parse(source: *const c_char, out: *mut *mut FpcProgram) -> FpcError {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let src = text(source, "source")?;
        let program = parse_program(src, FloatFormat::BINARY32).map_err(|e| (FpcError::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(FpcProgram { source: src.to_string(), program }));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from `fpc_program_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fpc_program_free(p: *mut FpcProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of declared inputs.
///
/// # Safety
/// `p` must be a live program handle.
#[no_mangle]
pub unsafe extern "C" fn fpc_program_input_count(p: *const FpcProgram) -> usize {
    p.as_ref().map_or(0, |p| p.program.inputs.len())
}

/// Number of `@suspect` annotations.
///
/// # Safety
/// `p` must be a live program handle.
#[no_mangle]
pub unsafe extern "C" fn fpc_program_suspect_count(p: *const FpcProgram) -> usize {
    p.as_ref().map_or(0, |p| p.program.suspects().len())
}

/// Defaults: fpc, 10 unrollings, 180 s, no node limit, the only annotation.
#[no_mangle]
pub extern "C" fn fpc_solve_options_default() -> FpcSolveOptions {
    let d = SolverConfig::default();
    FpcSolveOptions {
        strategy: FpcStrategy::Fpc,
        unroll: d.unroll_k,
        timeout_ms: d.timeout.as_millis() as u64,
        node_limit: 0,
        suspect: -1,
    }
}

/// Searches for inputs reaching an annotation. `options` may be null for
/// the defaults. On success `*out` owns a new report handle.
///
/// # Safety
/// `p` must be a live program handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fpc_solve(
    p: *const FpcProgram,
    options: *const FpcSolveOptions,
    out: *mut *mut FpcReport,
) -> FpcError {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = p.as_ref().ok_or_else(|| null("program"))?;
        let o = options.as_ref().copied().unwrap_or_else(|| fpc_solve_options_default());
        if o.timeout_ms == 0 {
            return Err((FpcError::InvalidArgument, "timeout_ms must be positive".into()));
        }
        let requested = match o.suspect {
            -1 => None,
            n => Some(u32::try_from(n).map_err(|_| (FpcError::InvalidArgument, format!("bad annotation index {n}")))?),
        };
        let id = select_suspect(&p.program, requested).map_err(|e| (FpcError::InvalidArgument, e.to_string()))?;
        let cfg = SolverConfig {
            strategy: match o.strategy {
                FpcStrategy::Std => Strategy::Std,
                FpcStrategy::Fpc => Strategy::Fpc,
                FpcStrategy::Fp3s => Strategy::Fp3s,
            },
            unroll_k: o.unroll,
            timeout: Duration::from_millis(o.timeout_ms),
            node_limit: (o.node_limit > 0).then_some(o.node_limit),
            ..SolverConfig::default()
        };
        let result = solve_program(&p.program, id, &cfg).map_err(|e| match e {
            PipelineError::Frontend(e) => (FpcError::InvalidArgument, e.to_string()),
            PipelineError::Search(e) => (FpcError::Internal, e.to_string()),
        })?;
        let json = RunReport::from_result(&result, &p.source).to_json();
        let json = CString::new(json).map_err(|_| (FpcError::Internal, "report contains NUL".to_string()))?;
        *out = Box::into_raw(Box::new(FpcReport { result, json }));
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle from `fpc_solve` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fpc_report_free(r: *mut FpcReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn fpc_report_outcome(r: *const FpcReport) -> FpcOutcome {
    match r.as_ref().map(|r| &r.result.status) {
        Some(Status::Sat(_)) => FpcOutcome::Sat,
        Some(Status::Unsat) => FpcOutcome::Unsat,
        Some(Status::NotFound) => FpcOutcome::NotFound,
        Some(Status::Unknown(_)) | None => FpcOutcome::Unknown,
    }
}

/// Whether the witness was re-run on the program and reached the interval.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn fpc_report_verified(r: *const FpcReport) -> bool {
    r.as_ref().is_some_and(|r| r.result.verified)
}

/// Bit pattern of the witness value for input `name`. Fails unless the
/// outcome is `Sat` and `name` is an input.
///
/// # Safety
/// `r` must be a live report handle, `name` a NUL-terminated string and
/// `bits` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fpc_report_witness_bits(r: *const FpcReport, name: *const c_char, bits: *mut u32) -> FpcError {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let name = text(name, "name")?;
        if bits.is_null() {
            return Err(null("bits"));
        }
        let Status::Sat(w) = &r.result.status else {
            return Err((FpcError::InvalidArgument, "report has no witness".into()));
        };
        let v: &FloatValue = w
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| (FpcError::InvalidArgument, format!("no input named `{name}`")))?;
        *bits = v.bits();
        Ok(())
    })
}

/// The report as JSON. The caller releases it with `fpc_string_free`.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn fpc_report_json(r: *const FpcReport) -> *mut c_char {
    match r.as_ref() {
        Some(r) => r.json.clone().into_raw(),
        None => {
            set_error("report is null");
            ptr::null_mut()
        }
    }
}
