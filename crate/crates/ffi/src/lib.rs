//! C interface to `wsupport`.
//!
//! Objects are opaque handles created by `ws_*_new` functions and released
//! with the matching `ws_*_free`. Every fallible call returns a
//! [`WsStatus`]; on failure `ws_last_error()` describes the cause. Strings
//! returned by the library are freed with [`ws_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wsupport::catalog::{self, CatalogEntry, Params};
use wsupport::rootsys::{generate_group, CoxeterGroup, Family, RootSystem};
use wsupport::verify::{run_scenario, VerifyConfig};
use wsupport::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Utf8 = 3,
    GroupTooLarge = 4,
    SingularPoint = 5,
    /// Any other library error; see `ws_last_error`.
    Domain = 6,
    Panic = 7,
}

/// A root system with its chosen simple system.
pub struct WsRootSystem(RootSystem);

/// A finite reflection group stored as an explicit element list.
pub struct WsGroup(CoxeterGroup);

/// A catalog operator together with its regularization.
pub struct WsOperator(CatalogEntry);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> WsStatus {
    match e {
        Error::GroupTooLarge { .. } => WsStatus::GroupTooLarge,
        Error::SingularPoint { .. } | Error::SingularGridPoint { .. } => WsStatus::SingularPoint,
        e if e.is_usage() => WsStatus::InvalidArgument,
        Error::DimensionMismatch { .. } => WsStatus::InvalidArgument,
        _ => WsStatus::Domain,
    }
}

fn fail(status: WsStatus, msg: impl Into<String>) -> WsStatus {
    set_error(msg.into());
    status
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), WsStatus>) -> WsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(WsStatus::Panic, "internal panic"),
    }
}

fn lib<T>(r: wsupport::Result<T>) -> Result<T, WsStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, WsStatus> {
    if p.is_null() {
        return Err(fail(WsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(WsStatus::Utf8, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], WsStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(WsStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, WsStatus> {
    p.as_mut().ok_or_else(|| fail(WsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, WsStatus> {
    p.as_ref().ok_or_else(|| fail(WsStatus::NullPointer, format!("{what} is null")))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ws_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ws_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string returned by the library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library.
#[no_mangle]
pub unsafe extern "C" fn ws_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build the root system of `family` ("A", "B", "C", "D", "BC", "I2") and
/// `rank` (for I2 the dihedral order).
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_root_system_new(family: *const c_char, rank: usize, out: *mut *mut WsRootSystem) -> WsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let fam: Family = lib(str_arg(family, "family")?.parse())?;
        let rs = lib(RootSystem::build(fam, rank))?;
        *out = Box::into_raw(Box::new(WsRootSystem(rs)));
        Ok(())
    })
}

/// Build a root system from a label such as "A2", "BC1" or "I2(5)".
///
/// # Safety
/// `label` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_root_system_from_label(label: *const c_char, out: *mut *mut WsRootSystem) -> WsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let rs = lib(catalog::root_system_from_label(str_arg(label, "label")?))?;
        *out = Box::into_raw(Box::new(WsRootSystem(rs)));
        Ok(())
    })
}

/// # Safety
/// `rs` must be null or a handle from `ws_root_system_new`.
#[no_mangle]
pub unsafe extern "C" fn ws_root_system_free(rs: *mut WsRootSystem) {
    if !rs.is_null() {
        drop(Box::from_raw(rs));
    }
}

/// Dimension of the ambient space; 0 for a null handle.
///
/// # Safety
/// `rs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_root_system_ambient_dim(rs: *const WsRootSystem) -> usize {
    rs.as_ref().map_or(0, |r| r.0.ambient_dim())
}

/// Number of roots; 0 for a null handle.
///
/// # Safety
/// `rs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_root_system_len(rs: *const WsRootSystem) -> usize {
    rs.as_ref().map_or(0, |r| r.0.len())
}

/// Copy root `index` into `out`, which holds `len` doubles (at least the
/// ambient dimension).
///
/// # Safety
/// `rs` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ws_root_system_root(rs: *const WsRootSystem, index: usize, out: *mut f64, len: usize) -> WsStatus {
    guard(|| {
        let rs = handle(rs, "root system")?;
        let root = lib(rs.0.root(index))?;
        if out.is_null() {
            return Err(fail(WsStatus::NullPointer, "out is null"));
        }
        if len < root.len() {
            return Err(fail(WsStatus::InvalidArgument, format!("buffer holds {len} values, need {}", root.len())));
        }
        std::slice::from_raw_parts_mut(out, root.len()).copy_from_slice(root);
        Ok(())
    })
}

/// Enumerate the reflection group of `rs`, failing with
/// `GroupTooLarge` beyond `cap` elements.
///
/// # Safety
/// `rs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_group_new(rs: *const WsRootSystem, cap: usize, out: *mut *mut WsGroup) -> WsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let rs = handle(rs, "root system")?;
        let g = lib(generate_group(&rs.0, cap))?;
        *out = Box::into_raw(Box::new(WsGroup(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from `ws_group_new`.
#[no_mangle]
pub unsafe extern "C" fn ws_group_free(g: *mut WsGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Group order; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_group_order(g: *const WsGroup) -> usize {
    g.as_ref().map_or(0, |g| g.0.order())
}

/// Build catalog operator `name` on the root system labelled `label` (null
/// for the operator's default), with `nparams` named parameters.
///
/// # Safety
/// Strings must be NUL-terminated; `keys` and `values` must hold `nparams`
/// entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_operator_new(
    name: *const c_char,
    label: *const c_char,
    keys: *const *const c_char,
    values: *const f64,
    nparams: usize,
    out: *mut *mut WsOperator,
) -> WsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let name = str_arg(name, "name")?;
        let rs = if label.is_null() { None } else { Some(lib(catalog::root_system_from_label(str_arg(label, "label")?))?) };
        let mut params = Params::new();
        if nparams > 0 {
            if keys.is_null() {
                return Err(fail(WsStatus::NullPointer, "keys is null"));
            }
            let vals = slice_arg(values, nparams, "values")?;
            for (k, v) in std::slice::from_raw_parts(keys, nparams).iter().zip(vals) {
                params.insert(str_arg(*k, "parameter name")?.to_string(), *v);
            }
        }
        let entry = lib(catalog::build_entry(name, rs.as_ref(), &params))?;
        *out = Box::into_raw(Box::new(WsOperator(entry)));
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle from `ws_operator_new`.
#[no_mangle]
pub unsafe extern "C" fn ws_operator_free(op: *mut WsOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Number of variables the operator acts on; 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_operator_dim(op: *const WsOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.op.dim())
}

/// Principal symbol at `(x, lambda)`, both of length `n`. With
/// `regularized` nonzero the canonical regularization is used.
///
/// # Safety
/// `op` must be a live handle; `x` and `lambda` must hold `n` doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_operator_symbol(
    op: *const WsOperator,
    regularized: bool,
    x: *const f64,
    lambda: *const f64,
    n: usize,
    out: *mut f64,
) -> WsStatus {
    guard(|| {
        let op = handle(op, "operator")?;
        let out = out_arg(out, "out")?;
        let d = if regularized { &op.0.regularized } else { &op.0.op };
        if n != d.dim() {
            return Err(fail(WsStatus::InvalidArgument, format!("operator acts on {} variables, got {n}", d.dim())));
        }
        *out = lib(d.principal_symbol(slice_arg(x, n, "x")?, slice_arg(lambda, n, "lambda")?))?;
        Ok(())
    })
}

/// Run the factorization check of the regularized operator; writes
/// `min |P|` and returns `Domain` if the check fails.
///
/// # Safety
/// `op` must be a live handle; `min_abs_p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_operator_check_factorization(
    op: *const WsOperator,
    samples: usize,
    seed: u64,
    min_abs_p: *mut f64,
) -> WsStatus {
    guard(|| {
        let op = handle(op, "operator")?;
        let out = out_arg(min_abs_p, "min_abs_p")?;
        let r = lib(op.0.regularized.check_factorization(samples, seed, 1e-12))?;
        *out = r.min_abs_p;
        if r.passed {
            Ok(())
        } else {
            Err(fail(WsStatus::Domain, "factorization check failed"))
        }
    })
}

/// Run a verification scenario with default settings and `seed`. The JSON
/// report is written to `*json` (free with `ws_string_free`) and `*passed`
/// receives the verdict.
///
/// # Safety
/// `name` must be NUL-terminated; `json` and `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_verify_scenario(name: *const c_char, seed: u64, json: *mut *mut c_char, passed: *mut bool) -> WsStatus {
    guard(|| {
        let json = out_arg(json, "json")?;
        let passed = out_arg(passed, "passed")?;
        let name = str_arg(name, "name")?;
        let config = VerifyConfig { seed, ..VerifyConfig::default() };
        let r = lib(run_scenario(name, &config))?;
        let text = lib(serde_json::to_string(&r).map_err(Error::from))?;
        *json = CString::new(text).map_err(|_| fail(WsStatus::Domain, "report contains NUL"))?.into_raw();
        *passed = r.passed;
        Ok(())
    })
}
