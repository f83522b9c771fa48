//! C ABI over [`bgk_ndg::harness::Simulation`].
//!
//! Every function returns a [`BgkStatus`]; on failure the message is kept in a
//! thread-local slot readable through [`bgk_last_error`]. Handles are opaque
//! and owned by the caller until passed to [`bgk_solver_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bgk_ndg::harness::config::{build_case, parse_config_text};
use bgk_ndg::harness::Simulation;
use bgk_ndg::BgkError;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BgkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Realizability = 3,
    Boundary = 4,
    Config = 5,
    Io = 6,
    MeshMismatch = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Opaque solver handle.
pub struct BgkSolver {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &BgkError) -> BgkStatus {
    match e.kind() {
        "invalid-argument" => BgkStatus::InvalidArgument,
        "realizability" => BgkStatus::Realizability,
        "boundary" => BgkStatus::Boundary,
        "config" => BgkStatus::Config,
        "io" => BgkStatus::Io,
        "mesh-mismatch" => BgkStatus::MeshMismatch,
        _ => BgkStatus::InvalidArgument,
    }
}

struct Fail(BgkStatus, String);

impl From<BgkError> for Fail {
    fn from(e: BgkError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> BgkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BgkStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BgkStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(BgkStatus::NullPointer, format!("{what} is null"))
}

unsafe fn solver<'a>(s: *mut BgkSolver) -> Result<&'a mut BgkSolver, Fail> {
    s.as_mut().ok_or_else(|| null("solver"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Fail(BgkStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Creates a solver for the built-in case `case_name` with optional `key = value`
/// overrides in `config` (may be null). Writes the handle to `*out`.
///
/// # Safety
/// `case_name` and `config` must be null or NUL-terminated strings; `out` must be
/// valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bgk_solver_new(
    case_name: *const c_char,
    config: *const c_char,
    out: *mut *mut BgkSolver,
) -> BgkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let name = text(case_name, "case")?.ok_or_else(|| null("case"))?;
        let mut kv = vec![("case".to_string(), name.to_string())];
        if let Some(cfg) = text(config, "config")? {
            kv.extend(parse_config_text(cfg)?);
        }
        let (spec, _) = build_case(&kv)?;
        let sim = Simulation::new(spec)?;
        *out = Box::into_raw(Box::new(BgkSolver { sim }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `s` must come from [`bgk_solver_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bgk_solver_free(s: *mut BgkSolver) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// One stable step, clamped to the final time. `dt_taken` may be null.
///
/// # Safety
/// `s` must be a live handle; `dt_taken` null or writable.
#[no_mangle]
pub unsafe extern "C" fn bgk_solver_step(s: *mut BgkSolver, dt_taken: *mut f64) -> BgkStatus {
    guard(|| {
        let dt = solver(s)?.sim.step()?;
        if let Some(d) = dt_taken.as_mut() {
            *d = dt;
        }
        Ok(())
    })
}

/// Steps until `t` (or the final time of the case, if earlier).
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bgk_solver_advance_to(s: *mut BgkSolver, t: f64) -> BgkStatus {
    guard(|| Ok(solver(s)?.sim.advance_to(t)?))
}

/// # Safety
/// `s` must be a live handle; `t` writable.
#[no_mangle]
pub unsafe extern "C" fn bgk_solver_time(s: *mut BgkSolver, t: *mut f64) -> BgkStatus {
    guard(|| {
        let now = solver(s)?.sim.time();
        *t.as_mut().ok_or_else(|| null("t"))? = now;
        Ok(())
    })
}

/// Number of spatial nodes, the length of each profile array.
///
/// # Safety
/// `s` must be a live handle; `n` writable.
#[no_mangle]
pub unsafe extern "C" fn bgk_solver_node_count(s: *mut BgkSolver, n: *mut usize) -> BgkStatus {
    guard(|| {
        let count = solver(s)?.sim.node_count();
        *n.as_mut().ok_or_else(|| null("n"))? = count;
        Ok(())
    })
}

/// Copies nodal x, ρ, u and T into caller buffers of length `len`
/// (at least the node count). Any buffer may be null to skip it.
///
/// # Safety
/// `s` must be a live handle; each non-null buffer must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bgk_solver_profile(
    s: *mut BgkSolver,
    x: *mut f64,
    rho: *mut f64,
    u: *mut f64,
    temperature: *mut f64,
    len: usize,
) -> BgkStatus {
    guard(|| {
        let p = solver(s)?.sim.profile()?;
        if len < p.len() {
            return Err(Fail(
                BgkStatus::BufferTooSmall,
                format!("buffer holds {len} values, need {}", p.len()),
            ));
        }
        for (dst, src) in [(x, &p.x), (rho, &p.rho), (u, &p.u), (temperature, &p.t)] {
            if !dst.is_null() {
                std::slice::from_raw_parts_mut(dst, src.len()).copy_from_slice(src);
            }
        }
        Ok(())
    })
}

/// Current `max_x |ε⟨m g⟩|` per moment, written to `out[0..3]`.
///
/// # Safety
/// `s` must be a live handle; `out` must hold 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn bgk_solver_conservation_defect(s: *mut BgkSolver, out: *mut f64) -> BgkStatus {
    guard(|| {
        let c = solver(s)?.sim.conservation_defect();
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&c);
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn bgk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bgk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
