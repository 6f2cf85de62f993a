//! C interface to veerkit.
//!
//! Objects are opaque handles created by `vk_*_new`/`vk_*_from_*` and freed by
//! the matching `vk_*_free`. Every fallible call returns a `VkStatus`; the
//! message of the last failure on the calling thread is available from
//! `vk_last_error`. Strings returned through out-parameters are owned by the
//! caller and must be released with `vk_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;
use veerkit::order::{CuspName, OrderOracle};
use veerkit::report::{self, exit_code};
use veerkit::{Colour, Error, Veering};

/// Status codes. The values 0 to 4 agree with the exit codes of the `veerkit`
/// command line tool.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VkStatus {
    Ok = 0,
    CheckFailed = 1,
    ParseError = 2,
    DepthExhausted = 3,
    InsufficientContinent = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VkColour {
    Red = 0,
    Blue = 1,
}

/// A veering triangulation.
pub struct VkVeering {
    inner: Arc<Veering>,
}

/// A circular-order oracle over a growing continent.
pub struct VkOrder {
    inner: OrderOracle,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> VkStatus {
    match exit_code(err) {
        2 => VkStatus::ParseError,
        3 => VkStatus::DepthExhausted,
        4 => VkStatus::InsufficientContinent,
        _ => VkStatus::CheckFailed,
    }
}

fn fail(err: &Error) -> VkStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn guard(f: impl FnOnce() -> VkStatus) -> VkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside veerkit");
            VkStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, VkStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(VkStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        VkStatus::InvalidUtf8
    })
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> VkStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            VkStatus::Ok
        }
        Err(_) => {
            set_error("output contains a nul byte");
            VkStatus::Panic
        }
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn vk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn vk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a taut signature and runs the structure checks.
///
/// # Safety
/// `sig` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vk_veering_from_sig(sig: *const c_char, out: *mut *mut VkVeering) -> VkStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return VkStatus::NullPointer;
        }
        let sig = match str_arg(sig) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match Veering::from_sig(sig) {
            Ok(v) => {
                *out = Box::into_raw(Box::new(VkVeering { inner: Arc::new(v) }));
                VkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `v` must be null or a handle from `vk_veering_from_sig`.
#[no_mangle]
pub unsafe extern "C" fn vk_veering_free(v: *mut VkVeering) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// # Safety
/// `v` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn vk_veering_tet_count(v: *const VkVeering) -> usize {
    v.as_ref().map_or(0, |v| v.inner.tet_count())
}

/// # Safety
/// `v` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn vk_veering_edge_count(v: *const VkVeering) -> usize {
    v.as_ref().map_or(0, |v| v.inner.colour.len())
}

/// # Safety
/// `v` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vk_veering_edge_colour(v: *const VkVeering, edge: usize, out: *mut VkColour) -> VkStatus {
    let (Some(v), false) = (v.as_ref(), out.is_null()) else {
        set_error("null argument");
        return VkStatus::NullPointer;
    };
    match v.inner.colour.get(edge) {
        Some(Colour::Red) => *out = VkColour::Red,
        Some(Colour::Blue) => *out = VkColour::Blue,
        None => {
            set_error("edge index out of range");
            return VkStatus::OutOfRange;
        }
    }
    VkStatus::Ok
}

/// JSON check report for a signature. Returns `CheckFailed` with the report
/// still written when a structure check fails.
///
/// # Safety
/// `sig` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vk_check_json(sig: *const c_char, out: *mut *mut c_char) -> VkStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return VkStatus::NullPointer;
        }
        let sig = match str_arg(sig) {
            Ok(s) => s,
            Err(st) => return st,
        };
        match report::check_signature(sig) {
            Ok(r) => {
                let st = put_string(out, serde_json::to_string(&r).expect("report serialises"));
                if st != VkStatus::Ok {
                    st
                } else if r.passes() {
                    VkStatus::Ok
                } else {
                    set_error("structure check failed");
                    VkStatus::CheckFailed
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// Rebuilds the triangulation from link-space rectangles and writes the
/// result as JSON. A negative `radius` grows the ball until it suffices.
///
/// # Safety
/// `v` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vk_roundtrip_json(v: *const VkVeering, radius: i32, max_depth: usize, out: *mut *mut c_char) -> VkStatus {
    guard(|| {
        let (Some(v), false) = (v.as_ref(), out.is_null()) else {
            set_error("null argument");
            return VkStatus::NullPointer;
        };
        let r = usize::try_from(radius).ok();
        match report::roundtrip(v.inner.clone(), r, max_depth) {
            Ok(res) => {
                let st = put_string(out, serde_json::to_string(&res).expect("result serialises"));
                if st != VkStatus::Ok {
                    st
                } else if res.pass {
                    VkStatus::Ok
                } else {
                    set_error("reconstruction is not isomorphic to the input");
                    VkStatus::CheckFailed
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `v` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vk_order_new(v: *const VkVeering, max_depth: usize, out: *mut *mut VkOrder) -> VkStatus {
    guard(|| {
        let (Some(v), false) = (v.as_ref(), out.is_null()) else {
            set_error("null argument");
            return VkStatus::NullPointer;
        };
        match OrderOracle::new(v.inner.clone(), max_depth) {
            Ok(o) => {
                *out = Box::into_raw(Box::new(VkOrder { inner: o }));
                VkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `o` must be null or a handle from `vk_order_new`.
#[no_mangle]
pub unsafe extern "C" fn vk_order_free(o: *mut VkOrder) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Circular order of three cusps given by path names `t<k>.v<j>[/g<f>...]`.
///
/// # Safety
/// `o` must be a valid handle, the names nul-terminated strings and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vk_order_triple(
    o: *mut VkOrder,
    a: *const c_char,
    b: *const c_char,
    c: *const c_char,
    out: *mut i8,
) -> VkStatus {
    guard(|| {
        let (Some(o), false) = (o.as_mut(), out.is_null()) else {
            set_error("null argument");
            return VkStatus::NullPointer;
        };
        let mut names = Vec::new();
        for p in [a, b, c] {
            let s = match str_arg(p) {
                Ok(s) => s,
                Err(st) => return st,
            };
            match s.parse::<CuspName>() {
                Ok(n) => names.push(n),
                Err(e) => return fail(&e),
            }
        }
        match o.inner.order(&names[0], &names[1], &names[2]) {
            Ok(s) => {
                *out = s;
                VkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Lifted tetrahedra developed so far by an order oracle.
///
/// # Safety
/// `o` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn vk_order_witness_size(o: *const VkOrder) -> usize {
    o.as_ref().map_or(0, |o| o.inner.c.tet_count())
}
