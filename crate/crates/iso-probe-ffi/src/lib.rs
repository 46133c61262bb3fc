//! C ABI for the isomorphism tester.
//!
//! Handles are opaque pointers created and freed by this library; every
//! fallible call returns an [`IsoProbeStatus`] and leaves a message
//! retrievable with [`iso_probe_last_error`] on failure. The generated
//! header lives in `include/iso_probe.h`.
//!
//! Vertices are 0-based across this interface; the DIMACS text format keeps
//! its conventional 1-based numbering.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::ptr;

use iso_probe::graph::Graph;
use iso_probe::selector::SelectorKind;
use iso_probe::solver::{random_iso, SolverConfig, Verdict};

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_last_error(msg: impl std::fmt::Display) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.extend_from_slice(msg.to_string().as_bytes());
    });
}

/// Result codes of all fallible calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoProbeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidParameter = 4,
    BufferTooSmall = 5,
    InternalError = 6,
}

/// Verdict discriminant, mirroring the solver's four outcomes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoProbeVerdictKind {
    Isomorphic = 0,
    NonIsomorphicCertified = 1,
    ProbablyNonIsomorphic = 2,
    Inconclusive = 3,
}

/// Cell selection rule used by walks.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsoProbeSelector {
    FirstLargest = 0,
    Smallest = 1,
}

/// Solver counters of one run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IsoProbeStats {
    pub walks: u64,
    pub nodes_visited: u64,
    pub leaves_full: u64,
    pub leaves_path_only: u64,
    pub leaves_fake: u64,
    pub automorphisms_found: u64,
    pub collisions: u32,
    /// 1 when the run sampled the unpruned trees at any point.
    pub full_phase_entered: u8,
}

/// Opaque parsed graph.
pub struct IsoProbeGraph {
    inner: Graph,
}

/// Opaque solver options; create with `iso_probe_options_new`.
pub struct IsoProbeOptions {
    inner: SolverConfig,
}

/// Opaque verdict of one solver run.
pub struct IsoProbeVerdict {
    inner: Verdict,
}

/// Parses a NUL-terminated DIMACS text into a new graph handle.
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to writable
/// storage for one pointer. On success `*out` owns the graph and must be
/// released with [`iso_probe_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn iso_probe_graph_parse(
    text: *const c_char,
    out: *mut *mut IsoProbeGraph,
) -> IsoProbeStatus {
    if text.is_null() || out.is_null() {
        set_last_error("null pointer argument");
        return IsoProbeStatus::NullPointer;
    }
    let bytes = CStr::from_ptr(text);
    let Ok(s) = bytes.to_str() else {
        set_last_error("input is not valid UTF-8");
        return IsoProbeStatus::InvalidUtf8;
    };
    match Graph::parse_dimacs(s) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(IsoProbeGraph { inner: g }));
            IsoProbeStatus::Ok
        }
        Err(e) => {
            set_last_error(e);
            *out = ptr::null_mut();
            IsoProbeStatus::ParseError
        }
    }
}

/// Releases a graph handle; `g` may be null.
///
/// # Safety
/// `g` must be null or a pointer returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_graph_free(g: *mut IsoProbeGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count; 0 for null handles.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_graph_vertex_count(g: *const IsoProbeGraph) -> u64 {
    g.as_ref().map_or(0, |g| g.inner.n() as u64)
}

/// Edge count; 0 for null handles.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_graph_edge_count(g: *const IsoProbeGraph) -> u64 {
    g.as_ref().map_or(0, |g| g.inner.edge_count() as u64)
}

/// Serializes a graph to DIMACS. Writes at most `cap` bytes including the
/// terminating NUL and stores the required size (excluding NUL) in
/// `*needed`. Call with `buf == NULL` or a too-small `cap` to query the
/// size; that case returns `BufferTooSmall`.
///
/// # Safety
/// `g` must be a live handle, `needed` writable, and `buf` must point to
/// `cap` writable bytes when non-null.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_graph_to_dimacs(
    g: *const IsoProbeGraph,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> IsoProbeStatus {
    let Some(g) = g.as_ref() else {
        set_last_error("null graph handle");
        return IsoProbeStatus::NullPointer;
    };
    let text = g.inner.to_dimacs();
    if !needed.is_null() {
        *needed = text.len();
    }
    if buf.is_null() || cap < text.len() + 1 {
        set_last_error("output buffer too small");
        return IsoProbeStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
    *buf.add(text.len()) = 0;
    IsoProbeStatus::Ok
}

/// New options handle with the stock configuration.
#[no_mangle]
pub extern "C" fn iso_probe_options_new() -> *mut IsoProbeOptions {
    Box::into_raw(Box::new(IsoProbeOptions {
        inner: SolverConfig::default(),
    }))
}

/// Releases an options handle; `o` may be null.
///
/// # Safety
/// `o` must be null or a pointer returned by `iso_probe_options_new`.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_options_free(o: *mut IsoProbeOptions) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

unsafe fn with_options(
    o: *mut IsoProbeOptions,
    f: impl FnOnce(&mut SolverConfig),
) -> IsoProbeStatus {
    match o.as_mut() {
        Some(o) => {
            f(&mut o.inner);
            IsoProbeStatus::Ok
        }
        None => {
            set_last_error("null options handle");
            IsoProbeStatus::NullPointer
        }
    }
}

/// Sets the one-sided error bound; must lie in (0, 1).
///
/// # Safety
/// `o` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_options_set_epsilon(
    o: *mut IsoProbeOptions,
    epsilon: f64,
) -> IsoProbeStatus {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        set_last_error(format!("epsilon must lie in (0, 1), got {epsilon}"));
        return IsoProbeStatus::InvalidParameter;
    }
    with_options(o, |c| c.epsilon = epsilon)
}

/// # Safety
/// `o` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_options_set_seed(
    o: *mut IsoProbeOptions,
    seed: u64,
) -> IsoProbeStatus {
    with_options(o, |c| c.seed = seed)
}

/// Sets the deviation extension (extra pops refined past a mismatch).
///
/// # Safety
/// `o` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_options_set_deviation_extension(
    o: *mut IsoProbeOptions,
    k: u32,
) -> IsoProbeStatus {
    with_options(o, |c| c.k = k)
}

/// # Safety
/// `o` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_options_set_selector(
    o: *mut IsoProbeOptions,
    selector: IsoProbeSelector,
) -> IsoProbeStatus {
    with_options(o, |c| {
        c.selector = match selector {
            IsoProbeSelector::FirstLargest => SelectorKind::FirstLargest,
            IsoProbeSelector::Smallest => SelectorKind::Smallest,
        }
    })
}

/// # Safety
/// `o` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_options_set_use_deviation_phase(
    o: *mut IsoProbeOptions,
    enabled: bool,
) -> IsoProbeStatus {
    with_options(o, |c| c.use_deviation_phase = enabled)
}

/// # Safety
/// `o` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_options_set_use_blueprint(
    o: *mut IsoProbeOptions,
    enabled: bool,
) -> IsoProbeStatus {
    with_options(o, |c| c.use_blueprint = enabled)
}

/// # Safety
/// `o` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_options_set_full_leaf_budget(
    o: *mut IsoProbeOptions,
    budget: u64,
) -> IsoProbeStatus {
    with_options(o, |c| c.full_leaf_budget = budget as usize)
}

/// # Safety
/// `o` must be a live options handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_options_set_max_walks(
    o: *mut IsoProbeOptions,
    max_walks: u64,
) -> IsoProbeStatus {
    with_options(o, |c| c.max_walks = max_walks)
}

/// Runs the solver on two graphs. `options` may be null for defaults. On
/// success `*out` owns the verdict and must be released with
/// [`iso_probe_verdict_free`].
///
/// # Safety
/// `g1` and `g2` must be live graph handles, `options` null or a live
/// options handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_test(
    g1: *const IsoProbeGraph,
    g2: *const IsoProbeGraph,
    options: *const IsoProbeOptions,
    out: *mut *mut IsoProbeVerdict,
) -> IsoProbeStatus {
    if out.is_null() {
        set_last_error("null out pointer");
        return IsoProbeStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let (Some(g1), Some(g2)) = (g1.as_ref(), g2.as_ref()) else {
        set_last_error("null graph handle");
        return IsoProbeStatus::NullPointer;
    };
    let cfg = match options.as_ref() {
        Some(o) => o.inner.clone(),
        None => SolverConfig::default(),
    };
    match random_iso(&g1.inner, &g2.inner, &cfg) {
        Ok(v) => {
            *out = Box::into_raw(Box::new(IsoProbeVerdict { inner: v }));
            IsoProbeStatus::Ok
        }
        Err(e) => {
            set_last_error(e);
            IsoProbeStatus::InvalidParameter
        }
    }
}

/// Releases a verdict handle; `v` may be null.
///
/// # Safety
/// `v` must be null or a pointer returned by `iso_probe_test`.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_verdict_free(v: *mut IsoProbeVerdict) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// The verdict discriminant; null handles read as `Inconclusive`.
///
/// # Safety
/// `v` must be null or a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_verdict_kind(v: *const IsoProbeVerdict) -> IsoProbeVerdictKind {
    match v.as_ref().map(|v| &v.inner) {
        Some(Verdict::Isomorphic { .. }) => IsoProbeVerdictKind::Isomorphic,
        Some(Verdict::NonIsomorphicCertified { .. }) => IsoProbeVerdictKind::NonIsomorphicCertified,
        Some(Verdict::ProbablyNonIsomorphic { .. }) => IsoProbeVerdictKind::ProbablyNonIsomorphic,
        Some(Verdict::Inconclusive { .. }) | None => IsoProbeVerdictKind::Inconclusive,
    }
}

/// The error bound of a probabilistic rejection; 0 for every other kind.
///
/// # Safety
/// `v` must be null or a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_verdict_error_bound(v: *const IsoProbeVerdict) -> f64 {
    match v.as_ref().map(|v| &v.inner) {
        Some(Verdict::ProbablyNonIsomorphic { error_bound, .. }) => *error_bound,
        _ => 0.0,
    }
}

/// Number of entries the witness needs; 0 unless the verdict is
/// `Isomorphic`.
///
/// # Safety
/// `v` must be null or a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_verdict_witness_len(v: *const IsoProbeVerdict) -> usize {
    match v.as_ref().map(|v| &v.inner) {
        Some(Verdict::Isomorphic { witness, .. }) => witness.len(),
        _ => 0,
    }
}

/// Copies the witness image array (0-based: vertex `i` of the first graph
/// maps to `buf[i]` in the second) into `buf`.
///
/// # Safety
/// `v` must be a live verdict handle and `buf` must point to `cap`
/// writable `uint32_t` slots.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_verdict_witness(
    v: *const IsoProbeVerdict,
    buf: *mut u32,
    cap: usize,
) -> IsoProbeStatus {
    let Some(v) = v.as_ref() else {
        set_last_error("null verdict handle");
        return IsoProbeStatus::NullPointer;
    };
    let Verdict::Isomorphic { witness, .. } = &v.inner else {
        set_last_error("verdict carries no witness");
        return IsoProbeStatus::InvalidParameter;
    };
    if buf.is_null() || cap < witness.len() {
        set_last_error("witness buffer too small");
        return IsoProbeStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(witness.images().as_ptr(), buf, witness.len());
    IsoProbeStatus::Ok
}

/// Copies the run counters into `*out`.
///
/// # Safety
/// `v` must be a live verdict handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_verdict_stats(
    v: *const IsoProbeVerdict,
    out: *mut IsoProbeStats,
) -> IsoProbeStatus {
    let (Some(v), Some(out)) = (v.as_ref(), out.as_mut()) else {
        set_last_error("null pointer argument");
        return IsoProbeStatus::NullPointer;
    };
    let s = v.inner.stats();
    *out = IsoProbeStats {
        walks: s.walks,
        nodes_visited: s.nodes_visited,
        leaves_full: s.leaves_full,
        leaves_path_only: s.leaves_path_only,
        leaves_fake: s.leaves_fake,
        automorphisms_found: s.automorphisms_found,
        collisions: s.collisions,
        full_phase_entered: u8::from(s.full_phase_entered),
    };
    IsoProbeStatus::Ok
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`) and returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn iso_probe_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = e.len().min(cap - 1);
            ptr::copy_nonoverlapping(e.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    const K3: &str = "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n";
    const C6: &str = "p edge 6 6\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 6\ne 1 6\n";
    const TWO_C3: &str = "p edge 6 6\ne 1 2\ne 2 3\ne 1 3\ne 4 5\ne 5 6\ne 4 6\n";

    unsafe fn parse(text: &str) -> *mut IsoProbeGraph {
        let c = CString::new(text).unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(
            iso_probe_graph_parse(c.as_ptr(), &mut g),
            IsoProbeStatus::Ok
        );
        assert!(!g.is_null());
        g
    }

    #[test]
    fn parse_query_roundtrip() {
        unsafe {
            let g = parse(K3);
            assert_eq!(iso_probe_graph_vertex_count(g), 3);
            assert_eq!(iso_probe_graph_edge_count(g), 3);
            let mut needed = 0usize;
            assert_eq!(
                iso_probe_graph_to_dimacs(g, ptr::null_mut(), 0, &mut needed),
                IsoProbeStatus::BufferTooSmall
            );
            let mut buf = vec![0i8; needed + 1];
            assert_eq!(
                iso_probe_graph_to_dimacs(
                    g,
                    buf.as_mut_ptr() as *mut c_char,
                    buf.len(),
                    &mut needed
                ),
                IsoProbeStatus::Ok
            );
            let text = CStr::from_ptr(buf.as_ptr() as *const c_char)
                .to_str()
                .unwrap();
            // Serialization is canonical: edges in lexicographic order.
            assert_eq!(text, "p edge 3 3\ne 1 2\ne 1 3\ne 2 3\n");
            iso_probe_graph_free(g);
        }
    }

    #[test]
    fn parse_error_reports_message() {
        unsafe {
            let c = CString::new("p edge 2 1\ne 1 1\n").unwrap();
            let mut g = ptr::null_mut();
            assert_eq!(
                iso_probe_graph_parse(c.as_ptr(), &mut g),
                IsoProbeStatus::ParseError
            );
            assert!(g.is_null());
            let mut msg = vec![0i8; 256];
            let len = iso_probe_last_error(msg.as_mut_ptr() as *mut c_char, msg.len());
            assert!(len > 0);
            let text = CStr::from_ptr(msg.as_ptr() as *const c_char)
                .to_str()
                .unwrap();
            assert!(text.contains("self-loop"), "{text}");
        }
    }

    #[test]
    fn isomorphic_run_exposes_witness_and_stats() {
        unsafe {
            let g1 = parse(K3);
            let g2 = parse(K3);
            let mut verdict = ptr::null_mut();
            assert_eq!(
                iso_probe_test(g1, g2, ptr::null(), &mut verdict),
                IsoProbeStatus::Ok
            );
            assert_eq!(
                iso_probe_verdict_kind(verdict),
                IsoProbeVerdictKind::Isomorphic
            );
            let len = iso_probe_verdict_witness_len(verdict);
            assert_eq!(len, 3);
            let mut images = vec![0u32; len];
            assert_eq!(
                iso_probe_verdict_witness(verdict, images.as_mut_ptr(), len),
                IsoProbeStatus::Ok
            );
            let mut sorted = images.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, vec![0, 1, 2]);
            let mut stats = IsoProbeStats::default();
            assert_eq!(
                iso_probe_verdict_stats(verdict, &mut stats),
                IsoProbeStatus::Ok
            );
            assert!(stats.walks >= 1);
            iso_probe_verdict_free(verdict);
            iso_probe_graph_free(g1);
            iso_probe_graph_free(g2);
        }
    }

    #[test]
    fn options_steer_the_run() {
        unsafe {
            let g1 = parse(C6);
            let g2 = parse(TWO_C3);
            let opts = iso_probe_options_new();
            assert_eq!(
                iso_probe_options_set_epsilon(opts, 0.001),
                IsoProbeStatus::Ok
            );
            assert_eq!(
                iso_probe_options_set_epsilon(opts, 2.0),
                IsoProbeStatus::InvalidParameter
            );
            assert_eq!(iso_probe_options_set_seed(opts, 42), IsoProbeStatus::Ok);
            assert_eq!(
                iso_probe_options_set_selector(opts, IsoProbeSelector::Smallest),
                IsoProbeStatus::Ok
            );
            let mut verdict = ptr::null_mut();
            assert_eq!(
                iso_probe_test(g1, g2, opts, &mut verdict),
                IsoProbeStatus::Ok
            );
            let kind = iso_probe_verdict_kind(verdict);
            assert!(
                kind == IsoProbeVerdictKind::ProbablyNonIsomorphic
                    || kind == IsoProbeVerdictKind::NonIsomorphicCertified
            );
            if kind == IsoProbeVerdictKind::ProbablyNonIsomorphic {
                let bound = iso_probe_verdict_error_bound(verdict);
                assert!(bound > 0.0 && bound <= 0.001);
            }
            assert_eq!(
                iso_probe_verdict_witness(verdict, ptr::null_mut(), 0),
                IsoProbeStatus::InvalidParameter
            );
            iso_probe_verdict_free(verdict);
            iso_probe_options_free(opts);
            iso_probe_graph_free(g1);
            iso_probe_graph_free(g2);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut out = ptr::null_mut();
            assert_eq!(
                iso_probe_graph_parse(ptr::null(), &mut out),
                IsoProbeStatus::NullPointer
            );
            assert_eq!(
                iso_probe_test(
                    ptr::null(),
                    ptr::null(),
                    ptr::null(),
                    &mut out as *mut _ as *mut *mut IsoProbeVerdict
                ),
                IsoProbeStatus::NullPointer
            );
            assert_eq!(
                iso_probe_verdict_kind(ptr::null()),
                IsoProbeVerdictKind::Inconclusive
            );
            assert_eq!(iso_probe_graph_vertex_count(ptr::null()), 0);
            iso_probe_graph_free(ptr::null_mut());
            iso_probe_options_free(ptr::null_mut());
            iso_probe_verdict_free(ptr::null_mut());
        }
    }

    #[test]
    fn runs_are_deterministic_across_the_abi() {
        unsafe {
            let g1 = parse(C6);
            let g2 = parse(C6);
            let mut walks = Vec::new();
            for _ in 0..2 {
                let opts = iso_probe_options_new();
                iso_probe_options_set_seed(opts, 7);
                let mut verdict = ptr::null_mut();
                assert_eq!(
                    iso_probe_test(g1, g2, opts, &mut verdict),
                    IsoProbeStatus::Ok
                );
                assert_eq!(
                    iso_probe_verdict_kind(verdict),
                    IsoProbeVerdictKind::Isomorphic
                );
                let mut stats = IsoProbeStats::default();
                iso_probe_verdict_stats(verdict, &mut stats);
                walks.push(stats.walks);
                iso_probe_verdict_free(verdict);
                iso_probe_options_free(opts);
            }
            assert_eq!(walks[0], walks[1]);
            iso_probe_graph_free(g1);
            iso_probe_graph_free(g2);
        }
    }
}
