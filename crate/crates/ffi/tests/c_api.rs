use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use fpcheck_ffi::*;

const SQUARE: &str = "input x in [0, 4];\ny = x * x;\n@suspect y in [9, 9];\n";
const NO_ROOT: &str = "input x in [0, 4];\ny = x * x;\n@suspect y in [2, 2];\n";

fn parse(src: &str) -> *mut FpcProgram {
    let c = CString::new(src).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { fpc_program_parse(c.as_ptr(), &mut p) }, FpcError::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let e = fpc_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_str().unwrap().to_string()
}

#[test]
fn solve_and_read_witness() {
    let p = parse(SQUARE);
    assert_eq!(unsafe { fpc_program_input_count(p) }, 1);
    assert_eq!(unsafe { fpc_program_suspect_count(p) }, 1);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { fpc_solve(p, ptr::null(), &mut r) }, FpcError::Ok);
    assert_eq!(unsafe { fpc_report_outcome(r) }, FpcOutcome::Sat);
    assert!(unsafe { fpc_report_verified(r) });
    let name = CString::new("x").unwrap();
    let mut bits = 0u32;
    assert_eq!(unsafe { fpc_report_witness_bits(r, name.as_ptr(), &mut bits) }, FpcError::Ok);
    assert_eq!(f32::from_bits(bits), 3.0);

    let json = unsafe { fpc_report_json(r) };
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_string();
    unsafe { fpc_string_free(json) };
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["status"], "sat");
    assert_eq!(doc["witness"]["x"]["hex"], "0x40400000");

    unsafe {
        fpc_report_free(r);
        fpc_program_free(p);
    }
}

#[test]
fn refutation_with_explicit_options() {
    let p = parse(NO_ROOT);
    let mut o = fpc_solve_options_default();
    o.strategy = FpcStrategy::Std;
    o.suspect = 0;
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { fpc_solve(p, &o, &mut r) }, FpcError::Ok);
    assert_eq!(unsafe { fpc_report_outcome(r) }, FpcOutcome::Unsat);
    let name = CString::new("x").unwrap();
    let mut bits = 0;
    assert_eq!(unsafe { fpc_report_witness_bits(r, name.as_ptr(), &mut bits) }, FpcError::InvalidArgument);
    assert!(last_error().contains("no witness"));
    unsafe {
        fpc_report_free(r);
        fpc_program_free(p);
    }
}

#[test]
fn errors_are_reported_per_thread() {
    let bad = CString::new("input x in [0, 1];\ny = x +;\n").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { fpc_program_parse(bad.as_ptr(), &mut p) }, FpcError::Parse);
    assert!(p.is_null());
    assert!(last_error().contains("2:"), "{}", last_error());
    std::thread::spawn(|| assert!(fpc_last_error().is_null())).join().unwrap();

    assert_eq!(unsafe { fpc_program_parse(ptr::null(), &mut p) }, FpcError::NullArgument);
    let prog = parse(SQUARE);
    assert!(fpc_last_error().is_null());
    let mut r = ptr::null_mut();
    let mut o = fpc_solve_options_default();
    o.suspect = 7;
    assert_eq!(unsafe { fpc_solve(prog, &o, &mut r) }, FpcError::InvalidArgument);
    assert!(r.is_null());
    o.suspect = 0;
    o.timeout_ms = 0;
    assert_eq!(unsafe { fpc_solve(prog, &o, &mut r) }, FpcError::InvalidArgument);
    unsafe { fpc_program_free(prog) };
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/fpcheck.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["fpc_program_parse", "fpc_solve", "fpc_report_json", "fpc_string_free", "fpc_last_error"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    // Only checked where a C compiler is around.
    if let Ok(out) =
        Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"]).arg(&header).output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
