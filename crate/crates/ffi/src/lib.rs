//! C ABI over the digred reductions.
//!
//! Structures, digraphs and built reductions are opaque handles owned by the
//! caller and released with their `_free` function. Every fallible call
//! returns a [`DigredStatus`]; on failure the message is available from
//! [`digred_last_error`]. Strings handed out by the library are released
//! with [`digred_string_free`].
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the access implied by the
//! signature. Handles must not be used after being freed. Null handles and
//! null output pointers are reported as [`DigredStatus::NullPointer`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use digred::dbuild::{build_d, DMeta};
use digred::forward::forward_instance;
use digred::reverse::{reverse_instance, Shortcut};
use digred::singleton::{merge_instance, merge_template, BlockInfo};
use digred::solver::hom_exists;
use digred::text::{parse_digraph, parse_structure, serialize_digraph, serialize_structure};
use digred::{Digraph, Error, Role, Structure};

/// Result of a call. Decisions use `Ok` for YES and `No` for NO.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DigredStatus {
    Ok = 0,
    No = 1,
    NullPointer = -1,
    InvalidUtf8 = -2,
    Parse = -3,
    Precondition = -4,
    Panic = -5,
}

/// A relational structure (template or instance).
pub struct DigredStructure(Structure);

/// A digraph.
pub struct DigredDigraph(Digraph);

/// `D(A)` for a template, with everything needed to reverse instances.
pub struct DigredReduction(DMeta);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DigredStats {
    pub vertices: usize,
    pub edges: usize,
    pub height: usize,
    /// 1 if the counts match the closed-form formulas.
    pub matches: u8,
}

/// Which way `digred_reverse` produced its instance.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DigredShortcut {
    FixedNo = 0,
    FixedYes = 1,
    Assembled = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> DigredStatus {
    let status = match e {
        Error::Syntax { .. }
        | Error::UnknownElement { .. }
        | Error::UnknownVertex { .. }
        | Error::DuplicateName(_)
        | Error::ArityMismatch { .. }
        | Error::IndexOutOfRange { .. } => DigredStatus::Parse,
        _ => DigredStatus::Precondition,
    };
    set_error(e.to_string());
    status
}

fn guard(body: impl FnOnce() -> DigredStatus) -> DigredStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            DigredStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, DigredStatus> {
    if p.is_null() {
        set_error("null string");
        return Err(DigredStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not UTF-8");
        DigredStatus::InvalidUtf8
    })
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, DigredStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle");
        DigredStatus::NullPointer
    })
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> DigredStatus {
    *out = Box::into_raw(Box::new(value));
    DigredStatus::Ok
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> DigredStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            DigredStatus::Ok
        }
        Err(_) => {
            set_error("output contains a NUL byte");
            DigredStatus::Precondition
        }
    }
}

macro_rules! check_out {
    ($out:expr) => {
        if $out.is_null() {
            set_error("null output pointer");
            return DigredStatus::NullPointer;
        }
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failure on this thread, or null. Free with
/// [`digred_string_free`].
#[no_mangle]
pub extern "C" fn digred_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        Some(c) => c.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn digred_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static version string.
#[no_mangle]
pub extern "C" fn digred_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses the structure text format.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn digred_structure_parse(
    src: *const c_char,
    out: *mut *mut DigredStructure,
) -> DigredStatus {
    guard(|| {
        check_out!(out);
        let t = tri!(text(src));
        match parse_structure(t) {
            Ok(s) => put(out, DigredStructure(s)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn digred_structure_free(s: *mut DigredStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn digred_structure_serialize(
    s: *const DigredStructure,
    out: *mut *mut c_char,
) -> DigredStatus {
    guard(|| {
        check_out!(out);
        let s = tri!(handle(s));
        put_string(out, serialize_structure(&s.0))
    })
}

/// Number of elements.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn digred_structure_size(s: *const DigredStructure) -> usize {
    s.as_ref().map_or(0, |s| s.0.size())
}

/// Parses the digraph text format.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn digred_digraph_parse(
    src: *const c_char,
    out: *mut *mut DigredDigraph,
) -> DigredStatus {
    guard(|| {
        check_out!(out);
        let t = tri!(text(src));
        match parse_digraph(t) {
            Ok(g) => put(out, DigredDigraph(g)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn digred_digraph_free(g: *mut DigredDigraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn digred_digraph_serialize(
    g: *const DigredDigraph,
    out: *mut *mut c_char,
) -> DigredStatus {
    guard(|| {
        check_out!(out);
        let g = tri!(handle(g));
        put_string(out, serialize_digraph(&g.0))
    })
}

/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn digred_digraph_vertex_count(g: *const DigredDigraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// Builds `D(A)`, merging the relations of `template` first.
///
/// # Safety
/// `template` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn digred_reduction_new(
    template: *const DigredStructure,
    out: *mut *mut DigredReduction,
) -> DigredStatus {
    guard(|| {
        check_out!(out);
        let a = tri!(handle(template));
        let built =
            a.0.clone()
                .with_role(Role::Template)
                .and_then(|a| merge_template(&a))
                .and_then(|(m, _)| build_d(&m));
        match built {
            Ok(m) => put(out, DigredReduction(m)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn digred_reduction_free(r: *mut DigredReduction) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn digred_reduction_stats(
    r: *const DigredReduction,
    out: *mut DigredStats,
) -> DigredStatus {
    guard(|| {
        check_out!(out);
        let r = tri!(handle(r));
        let s = r.0.stats();
        *out = DigredStats {
            vertices: s.vertices,
            edges: s.edges,
            height: s.height,
            matches: u8::from(s.matches()),
        };
        DigredStatus::Ok
    })
}

/// A copy of the digraph `D(A)`.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn digred_reduction_digraph(
    r: *const DigredReduction,
    out: *mut *mut DigredDigraph,
) -> DigredStatus {
    guard(|| {
        check_out!(out);
        let r = tri!(handle(r));
        put(out, DigredDigraph(r.0.digraph().clone()))
    })
}

/// Instance of `CSP(A)` to instance of `CSP(D(A))`.
///
/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn digred_forward(
    instance: *const DigredStructure,
    out: *mut *mut DigredDigraph,
) -> DigredStatus {
    guard(|| {
        check_out!(out);
        let x = tri!(handle(instance));
        let g =
            x.0.clone()
                .with_role(Role::Instance)
                .and_then(|x| BlockInfo::new(x.arities()).and_then(|b| merge_instance(&x, &b)))
                .and_then(|m| {
                    let k = m.single_relation()?.arity;
                    forward_instance(&m, k)
                });
        match g {
            Ok(g) => put(out, DigredDigraph(g)),
            Err(e) => fail(e),
        }
    })
}

/// Instance of `CSP(D(A))` to instance of the merged `CSP(A)`.
/// `shortcut` may be null.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn digred_reverse(
    r: *const DigredReduction,
    g: *const DigredDigraph,
    out: *mut *mut DigredStructure,
    shortcut: *mut DigredShortcut,
) -> DigredStatus {
    guard(|| {
        check_out!(out);
        let r = tri!(handle(r));
        let g = tri!(handle(g));
        match reverse_instance(&g.0, &r.0) {
            Ok(o) => {
                if !shortcut.is_null() {
                    *shortcut = match o.shortcut {
                        Shortcut::FixedNo => DigredShortcut::FixedNo,
                        Shortcut::FixedYes => DigredShortcut::FixedYes,
                        Shortcut::Assembled => DigredShortcut::Assembled,
                    };
                }
                put(out, DigredStructure(o.instance))
            }
            Err(e) => fail(e),
        }
    })
}

/// `Ok` if `instance` maps to `template`, `No` if not.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn digred_solve(
    instance: *const DigredStructure,
    template: *const DigredStructure,
) -> DigredStatus {
    guard(|| {
        let x = tri!(handle(instance));
        let a = tri!(handle(template));
        match hom_exists(&x.0, &a.0) {
            Ok(true) => DigredStatus::Ok,
            Ok(false) => DigredStatus::No,
            Err(e) => fail(e),
        }
    })
}

/// `Ok` if `g` maps to `D(A)`, `No` if not.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn digred_solve_digraph(
    g: *const DigredDigraph,
    r: *const DigredReduction,
) -> DigredStatus {
    guard(|| {
        let g = tri!(handle(g));
        let r = tri!(handle(r));
        match hom_exists(&g.0.to_structure(), &r.0.digraph().to_structure()) {
            Ok(true) => DigredStatus::Ok,
            Ok(false) => DigredStatus::No,
            Err(e) => fail(e),
        }
    })
}
