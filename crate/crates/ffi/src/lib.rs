//! C interface to `carnot-core`.
//!
//! Objects are opaque handles created by `*_parse` / `*_load` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`CarnotStatus`]; on failure the message is available from
//! [`carnot_last_error`]. Strings returned through `out` parameters are owned
//! by the caller and must be released with [`carnot_string_free`].
//!
//! Points cross the boundary as comma separated rationals, e.g. `"1,-1/2,0"`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use carnot_core::carnot_map::{carnot_differential, frame_decompose, CarnotMapJet};
use carnot_core::coords::{carnot_chart, is_carnot};
use carnot_core::io::{self, fmt_point, parse_point, Structure};
use carnot_core::nilgroup::NilpotentGroup;
use carnot_core::{Error, Q};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CarnotStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Shape = 4,
    Weights = 5,
    Singular = 6,
    Truncation = 7,
    Precondition = 8,
    Domain = 9,
    Internal = 10,
    Panic = 11,
}

impl From<&Error> for CarnotStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) => Self::Parse,
            Error::Shape(_) => Self::Shape,
            Error::Weights(_) => Self::Weights,
            Error::Singular(_) => Self::Singular,
            Error::Truncation(_) => Self::Truncation,
            Error::Precondition(_) => Self::Precondition,
            Error::Domain(_) => Self::Domain,
            Error::Internal(_) => Self::Internal,
        }
    }
}

/// A parsed Carnot structure with its validation report.
pub struct CarnotStructure(Structure);

/// A Carnot manifold map between two structures.
pub struct CarnotMap(CarnotMapJet);

/// A graded nilpotent group in exponential coordinates.
pub struct CarnotGroup(NilpotentGroup<Q>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CarnotStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|l| *l.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CarnotStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|l| *l.borrow_mut() = None);
            CarnotStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("panic inside carnot-core");
            CarnotStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(CarnotStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(CarnotStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(CarnotStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(CarnotStatus::NullPointer, "out is null".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(CarnotStatus::NullPointer, "out is null".into()));
    }
    *out = CString::new(s).map_err(|e| Failure(CarnotStatus::Internal, e.to_string()))?.into_raw();
    Ok(())
}

fn point(s: &str, n: usize) -> Result<Vec<Q>, Failure> {
    let x = parse_point(s)?;
    if x.len() != n {
        return Err(Error::Shape(format!("point has {} coordinates, expected {n}", x.len())).into());
    }
    Ok(x)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn carnot_last_error() -> *const c_char {
    LAST_ERROR.with(|l| l.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn carnot_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a structure document. Validation problems do not fail the call;
/// they are reported by [`carnot_structure_report`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn carnot_structure_parse(json: *const c_char, out: *mut *mut CarnotStructure) -> CarnotStatus {
    guard(|| {
        let s = io::parse_structure_str(str_arg(json, "json")?, None)?;
        put(out, CarnotStructure(s))
    })
}

/// Loads a structure from a file, falling back to the bundled fixtures.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn carnot_structure_load(path: *const c_char, out: *mut *mut CarnotStructure) -> CarnotStatus {
    guard(|| {
        let s = io::parse_structure(str_arg(path, "path")?, None)?;
        put(out, CarnotStructure(s))
    })
}

/// # Safety
/// `s` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn carnot_structure_free(s: *mut CarnotStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Dimension of the manifold, 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn carnot_structure_dim(s: *const CarnotStructure) -> usize {
    s.as_ref().map_or(0, |s| s.0.frame.n())
}

/// Validation report as JSON, plus the Carnot coordinate check at the
/// basepoint. `ok` receives 1 when there are no violations.
///
/// # Safety
/// `s` must be a live handle; `ok` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn carnot_structure_report(s: *const CarnotStructure, ok: *mut i32, out: *mut *mut c_char) -> CarnotStatus {
    guard(|| {
        let s = &handle(s, "structure")?.0;
        let mut rep = s.report.clone();
        if rep.is_ok() {
            let (eps, pushed) = carnot_chart(&s.frame)?;
            rep.merge(is_carnot(&pushed, &eps.algebra));
        }
        if !ok.is_null() {
            *ok = rep.is_ok() as i32;
        }
        let json = serde_json::to_string(&rep).map_err(|e| Failure(CarnotStatus::Internal, e.to_string()))?;
        put_string(out, json)
    })
}

/// Tangent group at `point_str`.
///
/// # Safety
/// `s` must be a live handle, `point_str` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn carnot_structure_tangent_group(
    s: *const CarnotStructure,
    point_str: *const c_char,
    out: *mut *mut CarnotGroup,
) -> CarnotStatus {
    guard(|| {
        let s = &handle(s, "structure")?.0;
        let a = point(str_arg(point_str, "point")?, s.frame.n())?;
        put(out, CarnotGroup(NilpotentGroup::new(s.frame.tangent_algebra_at(&a)?)))
    })
}

/// # Safety
/// `g` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn carnot_group_free(g: *mut CarnotGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// `x·y`.
///
/// # Safety
/// `g` must be a live handle, `x` and `y` NUL-terminated strings and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn carnot_group_mul(g: *const CarnotGroup, x: *const c_char, y: *const c_char, out: *mut *mut c_char) -> CarnotStatus {
    guard(|| {
        let g = &handle(g, "group")?.0;
        let x = point(str_arg(x, "x")?, g.n())?;
        let y = point(str_arg(y, "y")?, g.n())?;
        put_string(out, fmt_point(&g.mul(&x, &y)))
    })
}

/// `x^{-1}`.
///
/// # Safety
/// `g` must be a live handle, `x` a NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn carnot_group_inverse(g: *const CarnotGroup, x: *const c_char, out: *mut *mut c_char) -> CarnotStatus {
    guard(|| {
        let g = &handle(g, "group")?.0;
        let x = point(str_arg(x, "x")?, g.n())?;
        put_string(out, fmt_point(&g.inverse(&x)))
    })
}

/// Loads a map file. Structure references resolve relative to the map file,
/// then against the bundled fixtures.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn carnot_map_load(path: *const c_char, out: *mut *mut CarnotMap) -> CarnotStatus {
    guard(|| {
        let m = io::parse_map(str_arg(path, "path")?, None)?;
        put(out, CarnotMap(m))
    })
}

/// # Safety
/// `m` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn carnot_map_free(m: *mut CarnotMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// 1 when the map sends `H_w` into `H'_w` at its basepoint, 0 otherwise.
///
/// # Safety
/// `m` must be a live handle and `ok` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn carnot_map_is_carnot(m: *const CarnotMap, ok: *mut i32) -> CarnotStatus {
    guard(|| {
        let m = &handle(m, "map")?.0;
        let (_, rep) = frame_decompose(m)?;
        if ok.is_null() {
            return Err(Failure(CarnotStatus::NullPointer, "ok is null".into()));
        }
        *ok = rep.is_ok() as i32;
        Ok(())
    })
}

/// Carnot differential at `point_str` as a JSON array of rows of rationals.
///
/// # Safety
/// `m` must be a live handle, `point_str` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn carnot_map_differential(m: *const CarnotMap, point_str: *const c_char, out: *mut *mut c_char) -> CarnotStatus {
    guard(|| {
        let m = &handle(m, "map")?.0;
        let a = point(str_arg(point_str, "point")?, m.source.n())?;
        let d = carnot_differential(&m.with_base(a)?)?;
        let json = serde_json::to_string(&d.matrix.to_strings()).map_err(|e| Failure(CarnotStatus::Internal, e.to_string()))?;
        put_string(out, json)
    })
}
