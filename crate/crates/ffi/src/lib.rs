//! C ABI over `gnnlogic`.
//!
//! Objects are opaque handles released with their `*_free` function.
//! Every fallible call returns an [`AcrStatus`]; on failure the message is
//! available from [`acr_last_error`] on the same thread. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`acr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gnnlogic::bisim::{self, GlobalMode};
use gnnlogic::gml::{self, Formula};
use gnnlogic::gnn::{self, AcrGnn};
use gnnlogic::graph::{self, FeaturedGraph};
use gnnlogic::{compiler, gadget, homcount, order, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    OutOfRange = 5,
    CapExceeded = 6,
    Precondition = 7,
    Internal = 8,
}

/// Global counting mode for [`acr_bisimilar`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcrGlobalMode {
    None = 0,
    Exact = 1,
    Capped = 2,
}

pub struct AcrGraph(FeaturedGraph);
pub struct AcrNet(AcrGnn);
pub struct AcrFormula(Formula);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> AcrStatus {
    match e {
        Error::Parse { .. } | Error::Syntax { .. } => AcrStatus::Parse,
        Error::InvalidParameter(_) | Error::ModeMismatch(_) | Error::DimensionMismatch(_) => AcrStatus::InvalidArgument,
        Error::VertexOutOfRange { .. } => AcrStatus::OutOfRange,
        Error::CapExceeded(_) => AcrStatus::CapExceeded,
        Error::Precondition(_) | Error::NotGadget { .. } => AcrStatus::Precondition,
        Error::Internal(_) | Error::Io(_) => AcrStatus::Internal,
    }
}

struct Fail(AcrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AcrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AcrStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside gnnlogic".into());
            AcrStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(AcrStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(AcrStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(AcrStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(AcrStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    put(out, Box::into_raw(Box::new(value)))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(AcrStatus::Internal, "string contains nul".into()))?;
    put(out, c.into_raw())
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn acr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn acr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a graph in the FGR text format.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_graph_parse(src: *const c_char, out: *mut *mut AcrGraph) -> AcrStatus {
    guard(|| put_box(out, AcrGraph(graph::read_graph(text(src, "source")?)?)))
}

/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_graph_write(g: *const AcrGraph, out: *mut *mut c_char) -> AcrStatus {
    guard(|| put_string(out, graph::write_graph(&borrow(g, "graph")?.0)))
}

/// # Safety
/// `g` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn acr_graph_free(g: *mut AcrGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_graph_num_vertices(g: *const AcrGraph, out: *mut usize) -> AcrStatus {
    guard(|| put(out, borrow(g, "graph")?.0.n()))
}

/// The strict linear order on `n` vertices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acr_graph_order(n: usize, out: *mut *mut AcrGraph) -> AcrStatus {
    guard(|| put_box(out, AcrGraph(graph::make_strict_linear_order(n)?)))
}

/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_gadgetise(g: *const AcrGraph, out: *mut *mut AcrGraph) -> AcrStatus {
    guard(|| put_box(out, AcrGraph(gadget::gadgetise(&borrow(g, "graph")?.0)?)))
}

/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_is_strict_linear_order(g: *const AcrGraph, out: *mut bool) -> AcrStatus {
    guard(|| put(out, order::is_strict_linear_order(&borrow(g, "graph")?.0)?))
}

/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_count_p2(g: *const AcrGraph, out: *mut u64) -> AcrStatus {
    guard(|| put(out, homcount::count_p2(&borrow(g, "graph")?.0)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acr_net_linear_order(out: *mut *mut AcrNet) -> AcrStatus {
    guard(|| put_box(out, AcrNet(gnn::build_linear_order_gnn())))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acr_net_gadget_order(out: *mut *mut AcrNet) -> AcrStatus {
    guard(|| put_box(out, AcrNet(gnn::build_gadget_order_gnn())))
}

/// Parses a network in the versioned text format.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_net_parse(src: *const c_char, out: *mut *mut AcrNet) -> AcrStatus {
    guard(|| put_box(out, AcrNet(gnn::read_network(text(src, "source")?)?)))
}

/// # Safety
/// `net` must be a live network handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_net_write(net: *const AcrNet, out: *mut *mut c_char) -> AcrStatus {
    guard(|| put_string(out, gnn::write_network(&borrow(net, "network")?.0)))
}

/// # Safety
/// `net` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn acr_net_free(net: *mut AcrNet) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Classifies vertex `v`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_net_run(net: *const AcrNet, g: *const AcrGraph, v: usize, out: *mut bool) -> AcrStatus {
    guard(|| put(out, gnn::run(&borrow(net, "network")?.0, &borrow(g, "graph")?.0, v)?))
}

/// Classifies every vertex into `out[0..len]`; `len` must equal the
/// vertex count.
///
/// # Safety
/// Handles must be live and `out` must point to `len` writable bools.
#[no_mangle]
pub unsafe extern "C" fn acr_net_run_all(net: *const AcrNet, g: *const AcrGraph, out: *mut bool, len: usize) -> AcrStatus {
    guard(|| {
        let g = &borrow(g, "graph")?.0;
        if len != g.n() {
            return Err(Fail(AcrStatus::InvalidArgument, format!("buffer holds {len} entries, graph has {}", g.n())));
        }
        if out.is_null() {
            return Err(Fail(AcrStatus::NullPointer, "output buffer is null".into()));
        }
        let bits = gnn::run_all(&borrow(net, "network")?.0, g)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&bits);
        Ok(())
    })
}

/// # Safety
/// `src` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_formula_parse(src: *const c_char, out: *mut *mut AcrFormula) -> AcrStatus {
    guard(|| put_box(out, AcrFormula(gml::parse(text(src, "source")?)?)))
}

/// # Safety
/// `f` must be a live formula handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_formula_print(f: *const AcrFormula, out: *mut *mut c_char) -> AcrStatus {
    guard(|| put_string(out, gml::print(&borrow(f, "formula")?.0)))
}

/// # Safety
/// `f` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn acr_formula_free(f: *mut AcrFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_formula_eval(f: *const AcrFormula, g: *const AcrGraph, v: usize, out: *mut bool) -> AcrStatus {
    guard(|| put(out, gml::evaluate(&borrow(f, "formula")?.0, &borrow(g, "graph")?.0, v)?))
}

/// Compiles a formula for graphs with feature dimension `d`.
///
/// # Safety
/// `f` must be a live formula handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn acr_formula_compile(f: *const AcrFormula, d: usize, out: *mut *mut AcrNet) -> AcrStatus {
    guard(|| put_box(out, AcrNet(compiler::compile(&borrow(f, "formula")?.0, d)?)))
}

/// `(L,c)` graded bisimilarity with global counting. `mode` is an
/// [`AcrGlobalMode`] value; `q` is read only in `Capped` mode.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn acr_bisimilar(
    g1: *const AcrGraph,
    v1: usize,
    g2: *const AcrGraph,
    v2: usize,
    l: usize,
    c: usize,
    mode: u32,
    q: usize,
    out: *mut bool,
) -> AcrStatus {
    guard(|| {
        let mode = match mode {
            m if m == AcrGlobalMode::None as u32 => GlobalMode::None,
            m if m == AcrGlobalMode::Exact as u32 => GlobalMode::Exact,
            m if m == AcrGlobalMode::Capped as u32 => GlobalMode::Capped(q),
            m => return Err(Fail(AcrStatus::InvalidArgument, format!("unknown global mode {m}"))),
        };
        put(out, bisim::bisimilar(&borrow(g1, "graph")?.0, v1, &borrow(g2, "graph")?.0, v2, l, c, mode)?)
    })
}
