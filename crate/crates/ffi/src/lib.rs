//! C ABI over the online packing/covering solver and the online Steiner
//! forest engine.
//!
//! Handles are opaque and owned by the caller until passed to the matching
//! `*_free`. Every fallible call returns an [`OmpcStatus`]; on failure the
//! message is available through [`ompc_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::mem::ManuallyDrop;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr::{self, NonNull};

use ompc::io;
use ompc::ompc::{violation_profile, CoveringConstraint, OnlineSolver, PotentialParams, SparsePackingSystem};
use ompc::oracles::{ExactOracle, PathOracleKind};
use ompc::steiner::{Demand, SteinerEngine, WeightedGraph};
use ompc::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmpcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInstance = 4,
    /// No feasible answer exists for the arriving constraint or demand.
    Infeasible = 5,
    /// The instance stream has no further constraints or demands.
    Exhausted = 6,
    Internal = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: OmpcStatus, msg: impl Into<String>) -> OmpcStatus {
    set_error(msg);
    status
}

fn status_of(err: &Error) -> OmpcStatus {
    match err {
        Error::Parse { .. } => OmpcStatus::Parse,
        Error::InfeasibleStep { .. } | Error::Infeasible | Error::Unservable { .. } => OmpcStatus::Infeasible,
        Error::StreamEnd => OmpcStatus::Exhausted,
        Error::Instance(_) | Error::Certificate(_) | Error::OracleCapacity { .. } | Error::Capacity { .. } => {
            OmpcStatus::InvalidInstance
        }
        _ => OmpcStatus::Internal,
    }
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), OmpcStatus>) -> OmpcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OmpcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(OmpcStatus::Internal, "panic inside the library"),
    }
}

fn lib_err(e: Error) -> OmpcStatus {
    let status = status_of(&e);
    fail(status, e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, OmpcStatus> {
    if p.is_null() {
        return Err(fail(OmpcStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(OmpcStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn handle<'a, T>(p: *mut T) -> Result<&'a mut T, OmpcStatus> {
    p.as_mut().ok_or_else(|| fail(OmpcStatus::NullArgument, "null handle"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), OmpcStatus> {
    if out.is_null() {
        return Err(fail(OmpcStatus::NullArgument, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

fn params(rho: f64, gamma: f64) -> Result<PotentialParams, OmpcStatus> {
    PotentialParams::new(rho, gamma).map_err(lib_err)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ompc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Online packing/covering solver with its instance.
pub struct OmpcSolver {
    solver: OnlineSolver<SparsePackingSystem, ExactOracle>,
    stream: Vec<CoveringConstraint>,
    next: usize,
}

/// Builds a solver from an instance JSON document (variables, covering
/// stream, optional certificate). Constraints are fed with
/// [`ompc_solver_arrive_next`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ompc_solver_new(
    json: *const c_char,
    rho: f64,
    gamma: f64,
    out: *mut *mut OmpcSolver,
) -> OmpcStatus {
    guard(|| {
        let text = read_str(json)?;
        let params = params(rho, gamma)?;
        let inst = io::parse_ompc(text, "<ffi>").map_err(lib_err)?;
        let boxed = Box::new(OmpcSolver {
            solver: OnlineSolver::new(inst.system, ExactOracle::default(), params),
            stream: inst.covering,
            next: 0,
        });
        put(out, Box::into_raw(boxed))
    })
}

/// Answers the next covering constraint of the instance stream and writes
/// the size of the chosen set. Returns `Exhausted` at the end of the stream.
///
/// # Safety
/// `solver` must come from [`ompc_solver_new`]; `set_size` may be null.
#[no_mangle]
pub unsafe extern "C" fn ompc_solver_arrive_next(solver: *mut OmpcSolver, set_size: *mut usize) -> OmpcStatus {
    guard(|| {
        let h = handle(solver)?;
        let Some(c) = h.stream.get(h.next) else {
            return Err(fail(OmpcStatus::Exhausted, "covering stream exhausted"));
        };
        let arrival = h.solver.arrive(c).map_err(lib_err)?;
        h.next += 1;
        if !set_size.is_null() {
            set_size.write(arrival.set.len());
        }
        Ok(())
    })
}

/// Number of constraints answered so far.
///
/// # Safety
/// `solver` must come from [`ompc_solver_new`].
#[no_mangle]
pub unsafe extern "C" fn ompc_solver_steps(solver: *const OmpcSolver, out: *mut usize) -> OmpcStatus {
    guard(|| put(out, handle(solver.cast_mut())?.solver.state().step()))
}

/// Largest accumulated scaled load over all packing rows.
///
/// # Safety
/// `solver` must come from [`ompc_solver_new`].
#[no_mangle]
pub unsafe extern "C" fn ompc_solver_max_load(solver: *const OmpcSolver, out: *mut f64) -> OmpcStatus {
    guard(|| put(out, handle(solver.cast_mut())?.solver.state().max_load()))
}

/// Largest packing row value of the committed assignment.
///
/// # Safety
/// `solver` must come from [`ompc_solver_new`].
#[no_mangle]
pub unsafe extern "C" fn ompc_solver_max_violation(solver: *const OmpcSolver, out: *mut f64) -> OmpcStatus {
    guard(|| {
        let h = handle(solver.cast_mut())?;
        let profile = violation_profile(h.solver.state(), h.solver.system()).map_err(lib_err)?;
        put(out, profile.into_iter().fold(0.0, f64::max))
    })
}

/// Releases a solver. Null is ignored.
///
/// # Safety
/// `solver` must come from [`ompc_solver_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ompc_solver_free(solver: *mut OmpcSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Online Steiner forest engine at a fixed weight guess.
pub struct OmpcSteiner {
    // Borrows `graph`; dropped first in `Drop`.
    engine: ManuallyDrop<SteinerEngine<'static, PathOracleKind>>,
    graph: NonNull<WeightedGraph>,
    demands: Vec<Demand>,
}

impl Drop for OmpcSteiner {
    fn drop(&mut self) {
        // SAFETY: the engine is the only borrower of the graph allocation,
        // and it is gone before the allocation is reclaimed.
        unsafe {
            ManuallyDrop::drop(&mut self.engine);
            drop(Box::from_raw(self.graph.as_ptr()));
        }
    }
}

/// Builds a Steiner engine from an instance JSON document (vertices, edges,
/// degree bounds, demands) at the given weight guess. `exact_oracle`
/// selects exact path enumeration instead of the label-setting search.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ompc_steiner_new(
    json: *const c_char,
    w_guess: f64,
    rho: f64,
    gamma: f64,
    exact_oracle: bool,
    out: *mut *mut OmpcSteiner,
) -> OmpcStatus {
    guard(|| {
        let text = read_str(json)?;
        let params = params(rho, gamma)?;
        let inst = io::parse_steiner(text, "<ffi>").map_err(lib_err)?;
        let demands = inst.demands.as_slice().to_vec();
        let graph = NonNull::from(Box::leak(Box::new(inst.graph)));
        let kind = if exact_oracle {
            PathOracleKind::Exact
        } else {
            PathOracleKind::Surrogate
        };
        // SAFETY: the allocation lives until `OmpcSteiner` drops, after the engine.
        let g: &'static WeightedGraph = &*graph.as_ptr();
        let engine = match SteinerEngine::new(g, w_guess, kind, params) {
            Ok(e) => e,
            Err(e) => {
                drop(Box::from_raw(graph.as_ptr()));
                return Err(lib_err(e));
            }
        };
        let boxed = Box::new(OmpcSteiner {
            engine: ManuallyDrop::new(engine),
            graph,
            demands,
        });
        put(out, Box::into_raw(boxed))
    })
}

/// Serves the next demand of the instance and writes the number of edges
/// bought for it. Returns `Exhausted` after the last demand.
///
/// # Safety
/// `steiner` must come from [`ompc_steiner_new`]; `edges` may be null.
#[no_mangle]
pub unsafe extern "C" fn ompc_steiner_serve_next(steiner: *mut OmpcSteiner, edges: *mut usize) -> OmpcStatus {
    guard(|| {
        let h = handle(steiner)?;
        let Some(&d) = h.demands.get(h.engine.served()) else {
            return Err(fail(OmpcStatus::Exhausted, "demand stream exhausted"));
        };
        let aug = h.engine.serve(d).map_err(lib_err)?;
        if !edges.is_null() {
            edges.write(aug.edges.len());
        }
        Ok(())
    })
}

/// Total weight bought so far (edges counted once per demand using them).
///
/// # Safety
/// `steiner` must come from [`ompc_steiner_new`].
#[no_mangle]
pub unsafe extern "C" fn ompc_steiner_weight(steiner: *const OmpcSteiner, out: *mut f64) -> OmpcStatus {
    guard(|| put(out, handle(steiner.cast_mut())?.engine.solution().weight()))
}

/// Largest packing load: degree rows over their bounds and the weight row
/// over the guess.
///
/// # Safety
/// `steiner` must come from [`ompc_steiner_new`].
#[no_mangle]
pub unsafe extern "C" fn ompc_steiner_max_packing_load(steiner: *const OmpcSteiner, out: *mut f64) -> OmpcStatus {
    guard(|| {
        let h = handle(steiner.cast_mut())?;
        let loads = h.engine.solution().packing_loads(h.engine.graph(), h.engine.w_guess());
        put(out, loads.into_iter().fold(0.0, f64::max))
    })
}

/// Whether every demand served so far is connected by bought edges.
///
/// # Safety
/// `steiner` must come from [`ompc_steiner_new`].
#[no_mangle]
pub unsafe extern "C" fn ompc_steiner_connected(steiner: *const OmpcSteiner, out: *mut bool) -> OmpcStatus {
    guard(|| {
        let h = handle(steiner.cast_mut())?;
        let served = &h.demands[..h.engine.served()];
        put(out, h.engine.solution().connects(h.engine.graph(), served))
    })
}

/// Releases an engine. Null is ignored.
///
/// # Safety
/// `steiner` must come from [`ompc_steiner_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ompc_steiner_free(steiner: *mut OmpcSteiner) {
    if !steiner.is_null() {
        drop(Box::from_raw(steiner));
    }
}
