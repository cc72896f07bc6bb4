use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use ompc_ffi::*;

const SAMPLE: &str = r#"{
  "vertices": 6,
  "edges": [[0, 1, 1.0], [0, 3, 1.0], [3, 4, 1.0], [1, 2, 1.0], [3, 5, 1.0]],
  "bounds": [3, 3, 3, 3, 3, 3],
  "demands": [[1, 4], [2, 5]]
}"#;

const CHAIN: &str = r#"{
  "m": 3, "k": 2,
  "variables": [
    {"id": "a", "column": [[0, 1.0]]},
    {"id": "b", "column": [[0, 1.0], [1, 1.0]]},
    {"id": "c", "column": [[1, 1.0], [2, 1.0]]},
    {"id": "d", "column": [[2, 1.0]]}
  ],
  "covering": [
    {"coeffs": {"a": 1.0, "b": 1.0}},
    {"coeffs": {"b": 1.0, "c": 1.0}},
    {"coeffs": {"c": 1.0, "d": 1.0}}
  ]
}"#;

fn last_error() -> String {
    let p = ompc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solver_runs_the_stream_to_exhaustion() {
    let json = CString::new(CHAIN).unwrap();
    let mut solver = ptr::null_mut();
    unsafe {
        assert_eq!(ompc_solver_new(json.as_ptr(), 1.5, 2.0, &mut solver), OmpcStatus::Ok);
        let mut size = 0usize;
        for _ in 0..3 {
            assert_eq!(ompc_solver_arrive_next(solver, &mut size), OmpcStatus::Ok);
            assert_eq!(size, 1);
        }
        assert_eq!(ompc_solver_arrive_next(solver, &mut size), OmpcStatus::Exhausted);
        let mut steps = 0usize;
        assert_eq!(ompc_solver_steps(solver, &mut steps), OmpcStatus::Ok);
        assert_eq!(steps, 3);
        let (mut load, mut viol) = (0.0, 0.0);
        assert_eq!(ompc_solver_max_load(solver, &mut load), OmpcStatus::Ok);
        assert_eq!(ompc_solver_max_violation(solver, &mut viol), OmpcStatus::Ok);
        assert!(load <= 4.42 && viol >= 1.0);
        ompc_solver_free(solver);
    }
}

#[test]
fn steiner_serves_the_sample_instance() {
    let json = CString::new(SAMPLE).unwrap();
    let mut engine = ptr::null_mut();
    unsafe {
        assert_eq!(ompc_steiner_new(json.as_ptr(), 5.0, 1.5, 2.0, false, &mut engine), OmpcStatus::Ok);
        let mut edges = 0usize;
        assert_eq!(ompc_steiner_serve_next(engine, &mut edges), OmpcStatus::Ok);
        assert_eq!(edges, 3);
        assert_eq!(ompc_steiner_serve_next(engine, ptr::null_mut()), OmpcStatus::Ok);
        assert_eq!(ompc_steiner_serve_next(engine, &mut edges), OmpcStatus::Exhausted);
        let (mut weight, mut load, mut connected) = (0.0, 0.0, false);
        assert_eq!(ompc_steiner_weight(engine, &mut weight), OmpcStatus::Ok);
        assert_eq!(ompc_steiner_max_packing_load(engine, &mut load), OmpcStatus::Ok);
        assert_eq!(ompc_steiner_connected(engine, &mut connected), OmpcStatus::Ok);
        assert_eq!(weight, 6.0);
        assert!(connected);
        assert!((load - 4.0 / 3.0).abs() < 1e-12);
        ompc_steiner_free(engine);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let bad = CString::new("{\"vertices\": 2,").unwrap();
    let mut engine = ptr::null_mut();
    unsafe {
        assert_eq!(ompc_steiner_new(bad.as_ptr(), 1.0, 1.5, 2.0, false, &mut engine), OmpcStatus::Parse);
        assert!(engine.is_null());
        assert!(last_error().contains("<ffi>"));

        let json = CString::new(CHAIN).unwrap();
        let mut solver = ptr::null_mut();
        assert_eq!(ompc_solver_new(json.as_ptr(), 3.0, 2.0, &mut solver), OmpcStatus::InvalidInstance);
        assert_eq!(ompc_solver_new(ptr::null(), 1.5, 2.0, &mut solver), OmpcStatus::NullArgument);
        assert_eq!(ompc_solver_arrive_next(ptr::null_mut(), ptr::null_mut()), OmpcStatus::NullArgument);
        ompc_solver_free(ptr::null_mut());
        ompc_steiner_free(ptr::null_mut());
    }
}

#[test]
fn unroutable_demand_reports_infeasible() {
    // Path 0-1-2 where the middle vertex has degree bound 1.
    let json = CString::new(r#"{"vertices": 3, "edges": [[0,1,1.0],[1,2,1.0]], "bounds": [1,1,1], "demands": [[0,2]]}"#).unwrap();
    let mut engine = ptr::null_mut();
    unsafe {
        assert_eq!(ompc_steiner_new(json.as_ptr(), 10.0, 1.5, 2.0, true, &mut engine), OmpcStatus::Ok);
        assert_eq!(ompc_steiner_serve_next(engine, ptr::null_mut()), OmpcStatus::Infeasible);
        ompc_steiner_free(engine);
    }
}

#[test]
fn header_is_current_and_compiles() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/ompc.h")).unwrap();
    for name in ["ompc_solver_new", "ompc_steiner_serve_next", "ompc_last_error", "OMPC_STATUS_INFEASIBLE"] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", "-"])
        .arg("-I")
        .arg(dir.join("include"))
        .stdin(std::process::Stdio::piped())
        .spawn()
        .and_then(|mut child| {
            use std::io::Write;
            child.stdin.take().unwrap().write_all(b"#include \"ompc.h\"\nint main(void) { return ompc_last_error() != 0; }\n")?;
            child.wait_with_output()
        })
    else {
        eprintln!("no C compiler available; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
