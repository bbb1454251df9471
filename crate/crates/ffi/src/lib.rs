//! C ABI over `jordan-core`.
//!
//! Systems and families are opaque handles created by `*_new_*` functions and
//! released with the matching `*_free`. Every call returns a [`JordanStatus`];
//! on failure [`jordan_last_error`] describes the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jordan_core::fieldfn::Point;
use jordan_core::solutions::{fixture, FamilyConfig, FamilyKind, GridSpec, Variant};
use jordan_core::systems::catalog;
use jordan_core::verify::verify_family;
use jordan_core::{Error, SolveError};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JordanStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    Numeric = 3,
    Precondition = 4,
    BufferTooSmall = 5,
    Breaking = 6,
    OutOfSupport = 7,
    Panic = 8,
}

/// Characteristic variant of a solution family.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JordanVariant {
    Paper = 0,
    Rederived = 1,
}

/// Opaque quasilinear system.
pub struct JordanSystem(jordan_core::systems::JordanSystem);

/// Opaque exact-solution family with its initial data.
pub struct JordanFamily(FamilyConfig);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(JordanStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Solve(SolveError::Breaking { .. }) => JordanStatus::Breaking,
            Error::Solve(SolveError::OutOfSupport { .. } | SolveError::NoBracket { .. }) => JordanStatus::OutOfSupport,
            _ => match e.exit_code() {
                2 => JordanStatus::InvalidInput,
                4 => JordanStatus::Precondition,
                _ => JordanStatus::Numeric,
            },
        };
        Failure(status, e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        Error::from(e).into()
    }
}

impl From<jordan_core::EvalError> for Failure {
    fn from(e: jordan_core::EvalError) -> Self {
        Error::from(e).into()
    }
}

fn fail(status: JordanStatus, msg: &str) -> Failure {
    Failure(status, msg.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> JordanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            JordanStatus::Ok
        }
        Ok(Err(Failure(s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            JordanStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(fail(JordanStatus::NullArgument, &format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(JordanStatus::InvalidInput, &format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| fail(JordanStatus::NullArgument, &format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(JordanStatus::NullArgument, &format!("{what} is null")))
}

unsafe fn input<'a>(u: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if u.is_null() {
        return Err(fail(JordanStatus::NullArgument, "u is null"));
    }
    Ok(std::slice::from_raw_parts(u, len))
}

unsafe fn write_out(values: &[f64], dst: *mut f64, cap: usize) -> Result<(), Failure> {
    if dst.is_null() {
        return Err(fail(JordanStatus::NullArgument, "output buffer is null"));
    }
    if cap < values.len() {
        return Err(fail(JordanStatus::BufferTooSmall, &format!("need {} values, buffer holds {cap}", values.len())));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), dst, values.len());
    Ok(())
}

fn point(sys: &jordan_core::systems::JordanSystem, u: &[f64]) -> Result<Point, Failure> {
    if u.len() != sys.n() {
        return Err(fail(JordanStatus::InvalidInput, &format!("expected {} field values, got {}", sys.n(), u.len())));
    }
    Ok(Point::from_u(u))
}

/// Message for the last failed call on this thread; empty after a success.
///
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn jordan_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse a system descriptor (JSON).
///
/// # Safety
/// `json` must be a NUL-terminated string and the output pointer valid.
#[no_mangle]
pub unsafe extern "C" fn jordan_system_from_json(json: *const c_char, out_sys: *mut *mut JordanSystem) -> JordanStatus {
    guard(|| {
        let dst = out(out_sys, "out")?;
        let sys = jordan_core::systems::JordanSystem::from_json(text(json, "json")?)?;
        *dst = Box::into_raw(Box::new(JordanSystem(sys)));
        Ok(())
    })
}

/// Look up a catalog system: `canonical`, `wdvv-t`, `wdvv-s`, `hard-rod`, `counterexample`.
///
/// # Safety
/// `name` must be a NUL-terminated string and the output pointer valid.
#[no_mangle]
pub unsafe extern "C" fn jordan_system_catalog(name: *const c_char, out_sys: *mut *mut JordanSystem) -> JordanStatus {
    guard(|| {
        let dst = out(out_sys, "out")?;
        let name = text(name, "name")?;
        let sys = catalog::by_name(name).ok_or_else(|| fail(JordanStatus::InvalidInput, &format!("unknown catalog system '{name}'")))?;
        *dst = Box::into_raw(Box::new(JordanSystem(sys)));
        Ok(())
    })
}

/// # Safety
/// `sys` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jordan_system_free(sys: *mut JordanSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of field components.
///
/// # Safety
/// `sys` must be a live handle and `n` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jordan_system_dim(sys: *const JordanSystem, n: *mut usize) -> JordanStatus {
    guard(|| {
        *out(n, "n")? = handle(sys, "sys")?.0.n();
        Ok(())
    })
}

/// Linear-degeneracy row at `u` (length `n`), written to `row`.
///
/// # Safety
/// `u` must hold `len` values and `row` at least `cap`.
#[no_mangle]
pub unsafe extern "C" fn jordan_system_lindeg(
    sys: *const JordanSystem,
    u: *const f64,
    len: usize,
    row: *mut f64,
    cap: usize,
) -> JordanStatus {
    guard(|| {
        let s = &handle(sys, "sys")?.0;
        let p = point(s, input(u, len)?)?;
        write_out(&s.lindeg_residual(&p)?, row, cap)
    })
}

/// Characteristic polynomial coefficients `c₁..cₙ` of `det(λ − A) = λⁿ + c₁λⁿ⁻¹ + … + cₙ`.
///
/// # Safety
/// `u` must hold `len` values and `coeffs` at least `cap`.
#[no_mangle]
pub unsafe extern "C" fn jordan_system_char_poly(
    sys: *const JordanSystem,
    u: *const f64,
    len: usize,
    coeffs: *mut f64,
    cap: usize,
) -> JordanStatus {
    guard(|| {
        let s = &handle(sys, "sys")?.0;
        let p = point(s, input(u, len)?)?;
        write_out(&s.char_poly(&p)?, coeffs, cap)
    })
}

/// Block eigenvalues at `u`, one per Jordan block.
///
/// # Safety
/// `u` must hold `len` values and `values` at least `cap`.
#[no_mangle]
pub unsafe extern "C" fn jordan_system_eigenvalues(
    sys: *const JordanSystem,
    u: *const f64,
    len: usize,
    values: *mut f64,
    cap: usize,
) -> JordanStatus {
    guard(|| {
        let s = &handle(sys, "sys")?.0;
        let p = point(s, input(u, len)?)?;
        write_out(&s.eigenvalues(&p)?, values, cap)
    })
}

/// Parse a family descriptor (JSON), integrating its closure ODE if present.
///
/// # Safety
/// `json` must be a NUL-terminated string and the output pointer valid.
#[no_mangle]
pub unsafe extern "C" fn jordan_family_from_json(json: *const c_char, out_fam: *mut *mut JordanFamily) -> JordanStatus {
    guard(|| {
        let dst = out(out_fam, "out")?;
        let (fc, _) = FamilyConfig::from_json(text(json, "json")?)?;
        *dst = Box::into_raw(Box::new(JordanFamily(fc)));
        Ok(())
    })
}

/// Built-in fixture: `canonical2`, `wdvv-t`, `wdvv-s`, `hardrod1`, `hardrod2`.
///
/// # Safety
/// `name` must be a NUL-terminated string and the output pointer valid.
#[no_mangle]
pub unsafe extern "C" fn jordan_family_fixture(
    name: *const c_char,
    variant: JordanVariant,
    out_fam: *mut *mut JordanFamily,
) -> JordanStatus {
    guard(|| {
        let dst = out(out_fam, "out")?;
        let name = text(name, "name")?;
        let kind = FamilyKind::from_name(name).ok_or_else(|| fail(JordanStatus::InvalidInput, &format!("unknown family '{name}'")))?;
        let v = match variant {
            JordanVariant::Paper => Variant::Paper,
            JordanVariant::Rederived => Variant::Rederived,
        };
        let (fc, _) = fixture(kind, v)?;
        *dst = Box::into_raw(Box::new(JordanFamily(fc)));
        Ok(())
    })
}

/// # Safety
/// `fam` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jordan_family_free(fam: *mut JordanFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// Number of field components.
///
/// # Safety
/// `fam` must be a live handle and `n` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jordan_family_dim(fam: *const JordanFamily, n: *mut usize) -> JordanStatus {
    guard(|| {
        *out(n, "n")? = handle(fam, "fam")?.0.n();
        Ok(())
    })
}

/// Characteristic label σ through `(x, t)`.
///
/// # Safety
/// `fam` must be a live handle and `sigma` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jordan_family_solve_sigma(fam: *const JordanFamily, x: f64, t: f64, sigma: *mut f64) -> JordanStatus {
    guard(|| {
        let dst = out(sigma, "sigma")?;
        *dst = handle(fam, "fam")?.0.solve_sigma(x, t)?;
        Ok(())
    })
}

/// Exact solution `u(x, t)`.
///
/// # Safety
/// `fam` must be a live handle and `u` must hold at least `cap` values.
#[no_mangle]
pub unsafe extern "C" fn jordan_family_eval(fam: *const JordanFamily, x: f64, t: f64, u: *mut f64, cap: usize) -> JordanStatus {
    guard(|| {
        let v = handle(fam, "fam")?.0.eval_solution(x, t)?;
        write_out(&v, u, cap)
    })
}

/// Finite-difference verification report as JSON; release with [`jordan_string_free`].
///
/// The step ladder is `h, h/2, …` with `levels` entries.
///
/// # Safety
/// `fam` must be a live handle and `json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jordan_family_verify(
    fam: *const JordanFamily,
    x0: f64,
    x1: f64,
    nx: usize,
    t0: f64,
    t1: f64,
    nt: usize,
    h: f64,
    levels: usize,
    json: *mut *mut c_char,
) -> JordanStatus {
    guard(|| {
        let dst = out(json, "json")?;
        let fc = &handle(fam, "fam")?.0;
        if levels == 0 || !(h > 0.0) {
            return Err(fail(JordanStatus::InvalidInput, "h must be positive and levels at least 1"));
        }
        let ladder: Vec<f64> = (0..levels).map(|k| h / 2f64.powi(k as i32)).collect();
        let grid = GridSpec { x0, x1, nx, t0, t1, nt };
        let rep = verify_family(fc, &grid, &ladder)?;
        let s = serde_json::to_string(&rep).map_err(|e| fail(JordanStatus::Numeric, &e.to_string()))?;
        *dst = CString::new(s).map_err(|e| fail(JordanStatus::Numeric, &e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jordan_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
