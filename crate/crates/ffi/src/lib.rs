//! C ABI over the `ergm` crate.
//!
//! Every fallible function returns an [`ErgmStatus`]. On failure the message
//! is available from [`ergm_last_error`] until the next failing call on the
//! same thread. Handles are opaque and owned by the caller, who releases them
//! with the matching `*_free` function. Panics never cross the boundary; they
//! surface as `ERGM_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use ergm::dynamics::{conditional_prob, CachePolicy, ChainState};
use ergm::landscape::{analyze, solve_example_tergm, LandscapeOptions, Regime};
use ergm::rng::stream;
use ergm::{ErgmError, Graph, ModelParams, TemplateGraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgmStatus {
    Ok = 0,
    NullPointer = 1,
    /// Out-of-range vertex, self-loop, bad probability, bad template or model, size mismatch.
    InvalidArgument = 2,
    /// Malformed snapshot bytes.
    Snapshot = 3,
    Io = 4,
    /// A fixed-point system had no qualifying solution.
    NoSolution = 5,
    /// The output buffer is too small; the required length was still written.
    BufferTooSmall = 6,
    /// Panic or other unexpected failure.
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgmRegime {
    High = 0,
    Low = 1,
    Critical = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgmLocalMax {
    pub p: f64,
    pub value: f64,
    pub second: f64,
    pub is_global: bool,
    pub is_degenerate: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgmLandscape {
    pub regime: ErgmRegime,
    /// Total number of local maxima, which may exceed the buffer passed in.
    pub num_maxima: usize,
    /// Unique global maximiser, or NaN.
    pub p_star: f64,
    /// Endpoint supremum when `L'` has one sign on the interior, or NaN.
    pub endpoint_supremum: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgmTergmSolution {
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
}

/// Opaque simple graph on `n` labelled vertices.
pub struct ErgmGraph(Graph);

/// Opaque model: vertex count, coefficients and templates.
pub struct ErgmModel(ModelParams);

/// Opaque Glauber chain with its own random stream.
pub struct ErgmChain(ChainState);

struct Failure {
    status: ErgmStatus,
    message: String,
}

impl From<ErgmError> for Failure {
    fn from(e: ErgmError) -> Self {
        let status = match &e {
            ErgmError::Snapshot(_) => ErgmStatus::Snapshot,
            ErgmError::Io(_) => ErgmStatus::Io,
            ErgmError::FixedPoint(_) => ErgmStatus::NoSolution,
            ErgmError::Observer { .. } => ErgmStatus::Internal,
            _ => ErgmStatus::InvalidArgument,
        };
        Failure { status, message: e.to_string() }
    }
}

impl From<ergm::SnapshotError> for Failure {
    fn from(e: ergm::SnapshotError) -> Self {
        ErgmError::from(e).into()
    }
}

fn fail(status: ErgmStatus, message: impl Into<String>) -> Failure {
    Failure { status, message: message.into() }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ErgmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ErgmStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(&e.message);
            e.status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(&format!("internal error: {msg}"));
            ErgmStatus::Internal
        }
    }
}

unsafe fn get<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| fail(ErgmStatus::NullPointer, format!("{what} is null")))
}

unsafe fn get_mut<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut().ok_or_else(|| fail(ErgmStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(ErgmStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_opt<T>(out: *mut T, value: T) {
    if !out.is_null() {
        out.write(value);
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(fail(ErgmStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(ErgmStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(fail(ErgmStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the last failing call on this thread; empty when none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ergm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ergm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- graphs ----

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_new_empty(n: usize, out: *mut *mut ErgmGraph) -> ErgmStatus {
    guard(|| {
        let g = Graph::new_empty(n)?;
        put(out, boxed(ErgmGraph(g)), "out")
    })
}

/// `pairs` holds `2 * num_edges` vertex indices.
///
/// # Safety
/// `pairs` must point to `2 * num_edges` readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_from_edges(
    n: usize,
    pairs: *const usize,
    num_edges: usize,
    out: *mut *mut ErgmGraph,
) -> ErgmStatus {
    guard(|| {
        let len = num_edges
            .checked_mul(2)
            .ok_or_else(|| fail(ErgmStatus::InvalidArgument, "num_edges overflows"))?;
        let flat = slice_arg(pairs, len, "pairs")?;
        let edges: Vec<(usize, usize)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let g = Graph::from_edges(n, &edges)?;
        put(out, boxed(ErgmGraph(g)), "out")
    })
}

/// Erdős–Rényi `G(n, p)` drawn from stream `stream_id` of `seed`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_gnp(
    n: usize,
    p: f64,
    seed: u64,
    stream_id: u64,
    out: *mut *mut ErgmGraph,
) -> ErgmStatus {
    guard(|| {
        let g = Graph::sample_gnp(n, p, &mut stream(seed, stream_id))?;
        put(out, boxed(ErgmGraph(g)), "out")
    })
}

/// # Safety
/// `g` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_clone(g: *const ErgmGraph, out: *mut *mut ErgmGraph) -> ErgmStatus {
    guard(|| {
        let g = get(g, "graph")?;
        put(out, boxed(ErgmGraph(g.0.clone())), "out")
    })
}

/// Null is accepted.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_free(g: *mut ErgmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_n(g: *const ErgmGraph, out: *mut usize) -> ErgmStatus {
    guard(|| put(out, get(g, "graph")?.0.n(), "out"))
}

/// # Safety
/// `g` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_edge_count(g: *const ErgmGraph, out: *mut usize) -> ErgmStatus {
    guard(|| put(out, get(g, "graph")?.0.edge_count(), "out"))
}

/// # Safety
/// `g` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_degree(g: *const ErgmGraph, u: usize, out: *mut usize) -> ErgmStatus {
    guard(|| {
        let g = &get(g, "graph")?.0;
        g.check_vertex(u)?;
        put(out, g.degree(u), "out")
    })
}

/// # Safety
/// `g` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_has_edge(g: *const ErgmGraph, u: usize, v: usize, out: *mut bool) -> ErgmStatus {
    guard(|| {
        let g = &get(g, "graph")?.0;
        let e = g.edge(u, v)?;
        put(out, g.contains(e), "out")
    })
}

/// `changed` may be null.
///
/// # Safety
/// `g` must be a live handle or null; `changed` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_set_edge(
    g: *mut ErgmGraph,
    u: usize,
    v: usize,
    present: bool,
    changed: *mut bool,
) -> ErgmStatus {
    guard(|| {
        let g = &mut get_mut(g, "graph")?.0;
        let e = g.edge(u, v)?;
        let c = g.set_edge(e, present);
        put_opt(changed, c);
        Ok(())
    })
}

/// Encodes the graph as an `ERGX` snapshot. Pass a null `buf` to query the
/// length. When `cap` is too small nothing is copied, `*len` is set, and
/// `ERGM_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes of writes; `len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_to_snapshot(
    g: *const ErgmGraph,
    buf: *mut u8,
    cap: usize,
    len: *mut usize,
) -> ErgmStatus {
    guard(|| {
        let bytes = get(g, "graph")?.0.to_snapshot();
        put(len, bytes.len(), "len")?;
        if buf.is_null() {
            return Ok(());
        }
        if cap < bytes.len() {
            return Err(fail(
                ErgmStatus::BufferTooSmall,
                format!("snapshot needs {} bytes, buffer has {cap}", bytes.len()),
            ));
        }
        std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        Ok(())
    })
}

/// # Safety
/// `bytes` must point to `len` readable bytes; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_from_snapshot(
    bytes: *const u8,
    len: usize,
    out: *mut *mut ErgmGraph,
) -> ErgmStatus {
    guard(|| {
        let b = slice_arg(bytes, len, "bytes")?;
        let g = Graph::from_snapshot(b)?;
        put(out, boxed(ErgmGraph(g)), "out")
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_read_snapshot(path: *const c_char, out: *mut *mut ErgmGraph) -> ErgmStatus {
    guard(|| {
        let p = str_arg(path, "path")?;
        let bytes = std::fs::read(Path::new(p)).map_err(ErgmError::from)?;
        let g = Graph::from_snapshot(&bytes)?;
        put(out, boxed(ErgmGraph(g)), "out")
    })
}

/// # Safety
/// `g` must be a live handle or null; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ergm_graph_write_snapshot(g: *const ErgmGraph, path: *const c_char) -> ErgmStatus {
    guard(|| {
        let g = &get(g, "graph")?.0;
        let p = str_arg(path, "path")?;
        std::fs::write(Path::new(p), g.to_snapshot()).map_err(ErgmError::from)?;
        Ok(())
    })
}

/// Homomorphism density `t(H, X)` of a template given as `edge`, `triangle`,
/// `two_star`, `k_star:K`, `cycle:K`, or an edge list like `0-1,1-2`.
///
/// # Safety
/// `g` must be a live handle or null; `template_spec` must be NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_hom_density(
    g: *const ErgmGraph,
    template_spec: *const c_char,
    out: *mut f64,
) -> ErgmStatus {
    guard(|| {
        let g = &get(g, "graph")?.0;
        let h = TemplateGraph::parse(str_arg(template_spec, "template_spec")?)?;
        put(out, ergm::counts::hom_density(&h, g), "out")
    })
}

// ---- models ----

/// `beta[0]` multiplies the edge density; `beta[i]` for `i ≥ 1` multiplies
/// template `templates[i - 1]`, so `num_templates` must be `beta_len - 1`.
///
/// # Safety
/// `beta` must hold `beta_len` values, `templates` `num_templates` NUL-terminated strings; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_model_new(
    n: usize,
    beta: *const f64,
    beta_len: usize,
    templates: *const *const c_char,
    num_templates: usize,
    out: *mut *mut ErgmModel,
) -> ErgmStatus {
    guard(|| {
        let beta = slice_arg(beta, beta_len, "beta")?.to_vec();
        let specs = slice_arg(templates, num_templates, "templates")?;
        let extra = specs
            .iter()
            .map(|&s| Ok(TemplateGraph::parse(str_arg(s, "template")?)?))
            .collect::<Result<Vec<_>, Failure>>()?;
        let m = ModelParams::with_templates(n, beta, extra)?;
        put(out, boxed(ErgmModel(m)), "out")
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_model_edge_triangle(
    n: usize,
    beta0: f64,
    beta1: f64,
    out: *mut *mut ErgmModel,
) -> ErgmStatus {
    guard(|| {
        let m = ModelParams::edge_triangle(n, beta0, beta1)?;
        put(out, boxed(ErgmModel(m)), "out")
    })
}

/// Null is accepted.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ergm_model_free(m: *mut ErgmModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_model_n(m: *const ErgmModel, out: *mut usize) -> ErgmStatus {
    guard(|| put(out, get(m, "model")?.0.n(), "out"))
}

fn check_sizes(m: &ModelParams, g: &Graph) -> Result<(), Failure> {
    if m.n() != g.n() {
        return Err(ErgmError::SizeMismatch { left: m.n(), right: g.n() }.into());
    }
    Ok(())
}

/// `P(X_uv = 1 | rest)` under the model.
///
/// # Safety
/// Handles must be live or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_conditional_prob(
    m: *const ErgmModel,
    g: *const ErgmGraph,
    u: usize,
    v: usize,
    out: *mut f64,
) -> ErgmStatus {
    guard(|| {
        let m = &get(m, "model")?.0;
        let g = &get(g, "graph")?.0;
        check_sizes(m, g)?;
        let e = g.edge(u, v)?;
        put(out, conditional_prob(m, g, e), "out")
    })
}

/// # Safety
/// Handles must be live or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_hamiltonian(m: *const ErgmModel, g: *const ErgmGraph, out: *mut f64) -> ErgmStatus {
    guard(|| {
        let m = &get(m, "model")?.0;
        let g = &get(g, "graph")?.0;
        check_sizes(m, g)?;
        put(out, m.hamiltonian(g), "out")
    })
}

/// Analyses the scalar landscape with default options. Up to `cap` maxima
/// are copied into `maxima` (which may be null when `cap` is 0).
///
/// # Safety
/// `m` must be a live handle or null; `summary` must be valid for writes; `maxima` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_landscape_analyze(
    m: *const ErgmModel,
    summary: *mut ErgmLandscape,
    maxima: *mut ErgmLocalMax,
    cap: usize,
) -> ErgmStatus {
    guard(|| {
        let m = &get(m, "model")?.0;
        if summary.is_null() || (cap > 0 && maxima.is_null()) {
            return Err(fail(ErgmStatus::NullPointer, "output pointer is null"));
        }
        let r = analyze(m, &LandscapeOptions::default());
        for (i, lm) in r.maxima.iter().take(cap).enumerate() {
            maxima.add(i).write(ErgmLocalMax {
                p: lm.p,
                value: lm.value,
                second: lm.second,
                is_global: lm.is_global,
                is_degenerate: lm.is_degenerate,
            });
        }
        summary.write(ErgmLandscape {
            regime: match r.regime {
                Regime::High => ErgmRegime::High,
                Regime::Low => ErgmRegime::Low,
                Regime::Critical => ErgmRegime::Critical,
            },
            num_maxima: r.maxima.len(),
            p_star: r.unique_global().unwrap_or(f64::NAN),
            endpoint_supremum: r.endpoint_supremum.unwrap_or(f64::NAN),
        });
        Ok(())
    })
}

/// Fixed points `p1`, `p2`, `q` of the edge + triangle cavity construction.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_solve_tergm(beta0: f64, beta1: f64, out: *mut ErgmTergmSolution) -> ErgmStatus {
    guard(|| {
        let s = solve_example_tergm(beta0, beta1)?;
        put(out, ErgmTergmSolution { p1: s.p1, p2: s.p2, q: s.q }, "out")
    })
}

// ---- chains ----

/// Starts a chain at a copy of `g`. The model and graph handles remain owned
/// by the caller.
///
/// # Safety
/// Handles must be live or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_chain_new(
    m: *const ErgmModel,
    g: *const ErgmGraph,
    seed: u64,
    stream_id: u64,
    out: *mut *mut ErgmChain,
) -> ErgmStatus {
    guard(|| {
        let m = &get(m, "model")?.0;
        let g = &get(g, "graph")?.0;
        let c = ChainState::new(m.clone(), g.clone(), seed, stream_id, CachePolicy::Auto)?;
        put(out, boxed(ErgmChain(c)), "out")
    })
}

/// Null is accepted.
///
/// # Safety
/// `c` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ergm_chain_free(c: *mut ErgmChain) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// One Glauber update. The resampled pair and its new state are written to
/// the optional outputs.
///
/// # Safety
/// `c` must be a live handle or null; outputs must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_chain_step(
    c: *mut ErgmChain,
    u: *mut usize,
    v: *mut usize,
    present: *mut bool,
) -> ErgmStatus {
    guard(|| {
        let c = &mut get_mut(c, "chain")?.0;
        let e = c.step();
        let (a, b) = e.endpoints();
        put_opt(u, a);
        put_opt(v, b);
        put_opt(present, c.graph().contains(e));
        Ok(())
    })
}

/// # Safety
/// `c` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ergm_chain_run(c: *mut ErgmChain, steps: u64) -> ErgmStatus {
    guard(|| {
        get_mut(c, "chain")?.0.run(steps);
        Ok(())
    })
}

/// # Safety
/// `c` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_chain_steps(c: *const ErgmChain, out: *mut u64) -> ErgmStatus {
    guard(|| put(out, get(c, "chain")?.0.steps(), "out"))
}

/// Copies the current state into a new graph handle.
///
/// # Safety
/// `c` must be a live handle or null; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergm_chain_graph(c: *const ErgmChain, out: *mut *mut ErgmGraph) -> ErgmStatus {
    guard(|| {
        let g = get(c, "chain")?.0.graph().clone();
        put(out, boxed(ErgmGraph(g)), "out")
    })
}
