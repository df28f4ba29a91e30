//! C ABI for the robplab workbench: opaque handles over graphs and
//! branching programs, status codes, and a thread-local last-error message.
//!
//! Ownership: every `*_new`/`*_parse`/constructor output must be released
//! with the matching `*_free`; strings returned through `char **` must be
//! released with `rl_string_free`. Handles are not thread-safe to mutate,
//! but all operations here treat them read-only.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use robplab::bounds::{certificate_from_nrobp, f_const, nrobp_size_lower_bound};
use robplab::bp::{build_frontier_obdd, Nrobp};
use robplab::cnf::phi;
use robplab::error::Error;
use robplab::family::family_graph;
use robplab::graph::Graph;
use robplab::io;
use robplab::mw::{exact_mw, heuristic_mw_upper, Permutation};
use robplab::transform::uniformize;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    /// A parameter violated a precondition.
    InvalidArgument = 1,
    /// A configured resource limit was exceeded.
    ResourceLimit = 2,
    /// A certificate or property check failed.
    VerificationFailed = 3,
    /// Malformed input text.
    ParseError = 4,
    /// A required pointer was null.
    NullPointer = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).expect("interior nuls removed");
    });
}

fn status_of(e: &Error) -> RlStatus {
    match e {
        Error::SizeLimit { .. } => RlStatus::ResourceLimit,
        Error::Parse { .. } => RlStatus::ParseError,
        Error::CertificateInvalid(_) => RlStatus::VerificationFailed,
        _ => RlStatus::InvalidArgument,
    }
}

fn fail(e: &Error) -> RlStatus {
    set_error(&e.to_string());
    status_of(e)
}

/// Message describing the most recent failure on this thread. Valid until
/// the next failing call; never null.
#[no_mangle]
pub extern "C" fn rl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Opaque undirected graph handle.
pub struct RlGraph(Graph);

/// Opaque branching-program handle.
pub struct RlProgram(Nrobp);

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, RlStatus> {
    if text.is_null() {
        set_error("null input string");
        return Err(RlStatus::NullPointer);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("input is not valid UTF-8");
        RlStatus::ParseError
    })
}

fn give<T>(out: *mut *mut T, value: T) -> RlStatus {
    if out.is_null() {
        set_error("null output pointer");
        return RlStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    RlStatus::Ok
}

fn give_string(out: *mut *mut c_char, text: String) -> RlStatus {
    if out.is_null() {
        set_error("null output pointer");
        return RlStatus::NullPointer;
    }
    let cleaned: String = text.chars().filter(|&c| c != '\0').collect();
    let c = CString::new(cleaned).expect("interior nuls removed");
    unsafe { *out = c.into_raw() };
    RlStatus::Ok
}

/// Release a string returned through a `char **` output.
///
/// # Safety
/// `s` must come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn rl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a PACE-format (`p tw ...`) graph.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_parse(text: *const c_char, out: *mut *mut RlGraph) -> RlStatus {
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match io::parse_gr(text) {
        Ok(g) => give(out, RlGraph(g)),
        Err(e) => fail(&e),
    }
}

/// Build the hard-family instance for treewidth target `k >= 3` and tree
/// height `r`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_family(k: u32, r: u32, out: *mut *mut RlGraph) -> RlStatus {
    match family_graph(k, r) {
        Ok(fam) => give(out, RlGraph(fam.product.graph().clone())),
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `g` must be a live graph handle (or null, which is ignored).
#[no_mangle]
pub unsafe extern "C" fn rl_graph_free(g: *mut RlGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_vertex_count(g: *const RlGraph) -> u32 {
    g.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_edge_count(g: *const RlGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_max_degree(g: *const RlGraph) -> u32 {
    g.as_ref().map_or(0, |g| g.0.max_degree())
}

/// Write the graph in PACE format.
///
/// # Safety
/// `g` must be a live graph handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_graph_write(g: *const RlGraph, out: *mut *mut c_char) -> RlStatus {
    let Some(g) = g.as_ref() else {
        set_error("null graph handle");
        return RlStatus::NullPointer;
    };
    give_string(out, io::write_gr(&g.0))
}

/// Write the monotone 2-CNF of the graph in DIMACS format. Fails on graphs
/// with isolated vertices.
///
/// # Safety
/// `g` must be a live graph handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_phi_dimacs(g: *const RlGraph, out: *mut *mut c_char) -> RlStatus {
    let Some(g) = g.as_ref() else {
        set_error("null graph handle");
        return RlStatus::NullPointer;
    };
    match phi(&g.0) {
        Ok(f) => give_string(out, io::write_dimacs(&f)),
        Err(e) => fail(&e),
    }
}

/// Exact matching width by subset dynamic programming; `limit` caps the
/// vertex count (22 is the conventional default).
///
/// # Safety
/// `g` must be a live graph handle; `out_width` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_exact_mw(
    g: *const RlGraph,
    limit: u32,
    out_width: *mut u32,
) -> RlStatus {
    let Some(g) = g.as_ref() else {
        set_error("null graph handle");
        return RlStatus::NullPointer;
    };
    if out_width.is_null() {
        set_error("null output pointer");
        return RlStatus::NullPointer;
    }
    match exact_mw(&g.0, limit) {
        Ok(r) => {
            *out_width = r.width;
            RlStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Upper bound on the matching width by seeded local search.
///
/// # Safety
/// `g` must be a live graph handle; `out_width` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_heuristic_mw(
    g: *const RlGraph,
    budget: u64,
    seed: u64,
    out_width: *mut u32,
) -> RlStatus {
    let Some(g) = g.as_ref() else {
        set_error("null graph handle");
        return RlStatus::NullPointer;
    };
    if out_width.is_null() {
        set_error("null output pointer");
        return RlStatus::NullPointer;
    }
    *out_width = heuristic_mw_upper(&g.0, budget, seed).width;
    RlStatus::Ok
}

/// The constant `f(x) = -(x+1)/log2(1 - 2^-x)`; NaN for `x = 0`.
#[no_mangle]
pub extern "C" fn rl_f_const(x: u32) -> f64 {
    if x == 0 {
        f64::NAN
    } else {
        f_const(x)
    }
}

/// The size bound `2^(mw / f(max_degree))` for programs computing the
/// graph's monotone 2-CNF.
///
/// # Safety
/// `g` must be a live graph handle; `out_bound` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_nrobp_lower_bound(
    g: *const RlGraph,
    mw: u32,
    out_bound: *mut f64,
) -> RlStatus {
    let Some(g) = g.as_ref() else {
        set_error("null graph handle");
        return RlStatus::NullPointer;
    };
    if out_bound.is_null() {
        set_error("null output pointer");
        return RlStatus::NullPointer;
    }
    if mw > 0 && g.0.edge_count() == 0 {
        set_error("positive matching width is impossible for an edgeless graph");
        return RlStatus::InvalidArgument;
    }
    *out_bound = nrobp_size_lower_bound(&g.0, mw);
    RlStatus::Ok
}

/// Build the frontier OBDD of the graph's monotone 2-CNF along the identity
/// variable order.
///
/// # Safety
/// `g` must be a live graph handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_build_obdd(g: *const RlGraph, out: *mut *mut RlProgram) -> RlStatus {
    let Some(g) = g.as_ref() else {
        set_error("null graph handle");
        return RlStatus::NullPointer;
    };
    match build_frontier_obdd(&g.0, &Permutation::identity(g.0.vertex_count())) {
        Ok(z) => give(out, RlProgram(z)),
        Err(e) => fail(&e),
    }
}

/// Parse a branching program in the `nrobp` text format.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_program_parse(
    text: *const c_char,
    out: *mut *mut RlProgram,
) -> RlStatus {
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match io::parse_bp(text) {
        Ok(z) => give(out, RlProgram(z)),
        Err(e) => fail(&e),
    }
}

/// Write the program in the `nrobp` text format.
///
/// # Safety
/// `z` must be a live program handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_program_write(z: *const RlProgram, out: *mut *mut c_char) -> RlStatus {
    let Some(z) = z.as_ref() else {
        set_error("null program handle");
        return RlStatus::NullPointer;
    };
    give_string(out, io::write_bp(&z.0))
}

/// # Safety
/// `z` must be a live program handle (or null, which is ignored).
#[no_mangle]
pub unsafe extern "C" fn rl_program_free(z: *mut RlProgram) {
    if !z.is_null() {
        drop(Box::from_raw(z));
    }
}

/// # Safety
/// `z` must be a live program handle.
#[no_mangle]
pub unsafe extern "C" fn rl_program_node_count(z: *const RlProgram) -> u32 {
    z.as_ref().map_or(0, |z| z.0.node_count())
}

/// # Safety
/// `z` must be a live program handle.
#[no_mangle]
pub unsafe extern "C" fn rl_program_edge_count(z: *const RlProgram) -> usize {
    z.as_ref().map_or(0, |z| z.0.edge_count())
}

/// # Safety
/// `z` must be a live program handle.
#[no_mangle]
pub unsafe extern "C" fn rl_program_var_count(z: *const RlProgram) -> u32 {
    z.as_ref().map_or(0, |z| z.0.num_vars())
}

/// 1 when no root-leaf path repeats a variable, else 0.
///
/// # Safety
/// `z` must be a live program handle.
#[no_mangle]
pub unsafe extern "C" fn rl_program_is_read_once(z: *const RlProgram) -> i32 {
    z.as_ref().map_or(0, |z| z.0.check_read_once() as i32)
}

/// 1 when every node sees one variable set and root-leaf paths mention every
/// variable, else 0.
///
/// # Safety
/// `z` must be a live program handle.
#[no_mangle]
pub unsafe extern "C" fn rl_program_is_uniform(z: *const RlProgram) -> i32 {
    z.as_ref().map_or(0, |z| z.0.check_uniform() as i32)
}

/// Clean the program and eliminate irregular edges until it is uniform.
///
/// # Safety
/// `z` must be a live program handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_uniformize(z: *const RlProgram, out: *mut *mut RlProgram) -> RlStatus {
    let Some(z) = z.as_ref() else {
        set_error("null program handle");
        return RlStatus::NullPointer;
    };
    give(out, RlProgram(uniformize(&z.0).program))
}

/// Number of sets in the t-cover certificate extracted from the program,
/// after verifying it against the graph's vertex covers. `vc_limit` caps the
/// brute-force cover enumeration (20 is the conventional default).
///
/// # Safety
/// `z` and `g` must be live handles; `out_sets` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rl_certificate_set_count(
    z: *const RlProgram,
    g: *const RlGraph,
    t: u32,
    vc_limit: u32,
    out_sets: *mut usize,
) -> RlStatus {
    let (Some(z), Some(g)) = (z.as_ref(), g.as_ref()) else {
        set_error("null handle");
        return RlStatus::NullPointer;
    };
    if out_sets.is_null() {
        set_error("null output pointer");
        return RlStatus::NullPointer;
    }
    match certificate_from_nrobp(&z.0, &g.0, t, vc_limit) {
        Ok(cert) => {
            *out_sets = cert.family.len();
            RlStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_lifecycle_and_mw() {
        unsafe {
            let text = CString::new("p tw 4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n").unwrap();
            let mut g: *mut RlGraph = std::ptr::null_mut();
            assert!(rl_graph_parse(text.as_ptr(), &mut g) == RlStatus::Ok);
            assert_eq!(rl_graph_vertex_count(g), 4);
            assert_eq!(rl_graph_edge_count(g), 6);
            assert_eq!(rl_graph_max_degree(g), 3);
            let mut width = 0;
            assert!(rl_exact_mw(g, 22, &mut width) == RlStatus::Ok);
            assert_eq!(width, 2);
            let mut bound = 0.0;
            assert!(rl_nrobp_lower_bound(g, width, &mut bound) == RlStatus::Ok);
            assert!(bound > 1.0);
            rl_graph_free(g);
        }
    }

    #[test]
    fn error_paths_set_messages() {
        unsafe {
            let mut g: *mut RlGraph = std::ptr::null_mut();
            let bad = CString::new("not a graph").unwrap();
            assert!(rl_graph_parse(bad.as_ptr(), &mut g) == RlStatus::ParseError);
            let msg = CStr::from_ptr(rl_last_error_message());
            assert!(!msg.to_bytes().is_empty());

            assert!(rl_graph_family(2, 1, &mut g) == RlStatus::InvalidArgument);
            assert!(rl_f_const(0).is_nan());
        }
    }

    #[test]
    fn obdd_pipeline_via_ffi() {
        unsafe {
            let mut g: *mut RlGraph = std::ptr::null_mut();
            assert!(rl_graph_family(3, 1, &mut g) == RlStatus::Ok);
            let mut z: *mut RlProgram = std::ptr::null_mut();
            assert!(rl_build_obdd(g, &mut z) == RlStatus::Ok);
            assert!(rl_program_is_read_once(z) == 1);
            assert!(rl_program_is_uniform(z) == 1);
            let mut sets = 0usize;
            assert!(rl_certificate_set_count(z, g, 1, 20, &mut sets) == RlStatus::Ok);
            assert!(sets >= 1);
            let mut text: *mut c_char = std::ptr::null_mut();
            assert!(rl_program_write(z, &mut text) == RlStatus::Ok);
            let mut z2: *mut RlProgram = std::ptr::null_mut();
            assert!(rl_program_parse(text, &mut z2) == RlStatus::Ok);
            assert_eq!(rl_program_node_count(z), rl_program_node_count(z2));
            rl_string_free(text);
            rl_program_free(z);
            rl_program_free(z2);
            rl_graph_free(g);
        }
    }
}
