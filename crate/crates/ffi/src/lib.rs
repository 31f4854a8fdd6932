//! C ABI over the `interchange` engine.
//!
//! Graphs, permutation states and exact chains are opaque heap handles owned
//! by the caller and released with the matching `*_free`. Every fallible call
//! returns an [`IcStatus`]; on failure [`ic_last_error_message`] describes
//! the error for the calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use interchange::graph::{sample_graph, SamplerKind};
use interchange::measure::{
    estimate_log_partition, estimate_weighted_prob, estimate_weighted_time_integral, WeightedEstimate,
};
use interchange::oracle::ExactChain;
use interchange::permutation::{DeltaKind, DeltaRecord};
use interchange::{rng, theory, Error, ErrorCategory, MonteCarlo, PermutationState, RegularGraph};

/// Status codes. The non-zero engine categories match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcStatus {
    Ok = 0,
    Config = 2,
    Precondition = 3,
    Resource = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Graph sampler selector for [`ic_graph_sample`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcSampler {
    Auto = 0,
    Rejection = 1,
    Incremental = 2,
}

/// Opaque regular graph.
pub struct IcGraph(Arc<RegularGraph>);

/// Opaque permutation state with incremental cycle bookkeeping.
pub struct IcState(PermutationState);

/// Opaque exact chain over all permutations of a small graph.
pub struct IcChain(ExactChain);

/// Effect of one transposition. `kind` is `+1` for a split, `-1` for a merge.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IcDelta {
    pub kind: i32,
    pub x: u32,
    pub y: u32,
    pub cycles_before: u64,
    pub cycles_after: u64,
    pub same_cycle_delta: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IcEstimate {
    pub value: f64,
    pub std_error: f64,
    pub ess: f64,
    pub replicas: u64,
    pub theta: f64,
    pub t: f64,
    pub low_ess: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: IcStatus, msg: &str) -> IcStatus {
    set_last_error(msg);
    status
}

fn from_error(e: Error) -> IcStatus {
    let status = match e.category() {
        ErrorCategory::Config => IcStatus::Config,
        ErrorCategory::Precondition => IcStatus::Precondition,
        ErrorCategory::Resource => IcStatus::Resource,
    };
    fail(status, &e.to_string())
}

fn guard(f: impl FnOnce() -> IcStatus) -> IcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(IcStatus::Panic, "internal panic"),
    }
}

fn store<T>(out: *mut *mut T, value: T) -> IcStatus {
    unsafe { *out = Box::into_raw(Box::new(value)) };
    IcStatus::Ok
}

fn write<T>(out: *mut T, value: T) -> IcStatus {
    unsafe { *out = value };
    IcStatus::Ok
}

macro_rules! non_null {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            return fail(IcStatus::NullPointer, "null pointer argument");
        }
    };
}

/// Message of the last failed call on this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn ic_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Samples a simple `d`-regular graph on `n` vertices.
#[no_mangle]
pub unsafe extern "C" fn ic_graph_sample(
    n: u64,
    d: u64,
    seed: u64,
    sampler: IcSampler,
    out: *mut *mut IcGraph,
) -> IcStatus {
    guard(|| {
        non_null!(out);
        let kind = match sampler {
            IcSampler::Auto => SamplerKind::Auto,
            IcSampler::Rejection => SamplerKind::Rejection,
            IcSampler::Incremental => SamplerKind::Incremental,
        };
        match sample_graph(n as usize, d as usize, kind, &mut rng::graph(seed, 0)) {
            Ok(s) => store(out, IcGraph(Arc::new(s.graph))),
            Err(e) => from_error(e),
        }
    })
}

/// The complete graph `K_n`.
#[no_mangle]
pub unsafe extern "C" fn ic_graph_complete(n: u64, out: *mut *mut IcGraph) -> IcStatus {
    guard(|| {
        non_null!(out);
        match RegularGraph::complete(n as usize) {
            Ok(g) => store(out, IcGraph(Arc::new(g))),
            Err(e) => from_error(e),
        }
    })
}

/// The cycle `C_n`.
#[no_mangle]
pub unsafe extern "C" fn ic_graph_cycle(n: u64, out: *mut *mut IcGraph) -> IcStatus {
    guard(|| {
        non_null!(out);
        match RegularGraph::cycle(n as usize) {
            Ok(g) => store(out, IcGraph(Arc::new(g))),
            Err(e) => from_error(e),
        }
    })
}

/// Parses the plain-text graph format (`n d` header, then `u v` lines).
#[no_mangle]
pub unsafe extern "C" fn ic_graph_from_text(text: *const c_char, out: *mut *mut IcGraph) -> IcStatus {
    guard(|| {
        non_null!(text, out);
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(IcStatus::InvalidUtf8, "graph text is not valid UTF-8");
        };
        match RegularGraph::from_text(text) {
            Ok(g) => store(out, IcGraph(Arc::new(g))),
            Err(e) => from_error(e),
        }
    })
}

/// Serializes a graph; release the string with [`ic_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ic_graph_to_text(g: *const IcGraph, out: *mut *mut c_char) -> IcStatus {
    guard(|| {
        non_null!(g, out);
        let text = CString::new((*g).0.to_text()).expect("no interior NUL");
        write(out, text.into_raw())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ic_graph_n(g: *const IcGraph) -> u64 {
    if g.is_null() { 0 } else { (*g).0.n() as u64 }
}

#[no_mangle]
pub unsafe extern "C" fn ic_graph_d(g: *const IcGraph) -> u64 {
    if g.is_null() { 0 } else { (*g).0.d() as u64 }
}

#[no_mangle]
pub unsafe extern "C" fn ic_graph_num_edges(g: *const IcGraph) -> u64 {
    if g.is_null() { 0 } else { (*g).0.num_edges() as u64 }
}

/// Endpoints `x < y` of edge `index`.
#[no_mangle]
pub unsafe extern "C" fn ic_graph_edge(g: *const IcGraph, index: u64, x: *mut u32, y: *mut u32) -> IcStatus {
    guard(|| {
        non_null!(g, x, y);
        let g = &(*g).0;
        if index >= g.num_edges() as u64 {
            return fail(IcStatus::Precondition, "edge index out of range");
        }
        let (a, b) = g.edge(index as usize);
        *x = a;
        *y = b;
        IcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn ic_graph_free(g: *mut IcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// The identity permutation on the vertices of `g`.
#[no_mangle]
pub unsafe extern "C" fn ic_state_identity(g: *const IcGraph, out: *mut *mut IcState) -> IcStatus {
    guard(|| {
        non_null!(g, out);
        store(out, IcState(PermutationState::identity((*g).0.clone())))
    })
}

fn delta(d: DeltaRecord) -> IcDelta {
    IcDelta {
        kind: match d.kind {
            DeltaKind::Split => 1,
            DeltaKind::Merge => -1,
        },
        x: d.edge.0,
        y: d.edge.1,
        cycles_before: d.n_before as u64,
        cycles_after: d.n_after as u64,
        same_cycle_delta: d.same_cycle_delta,
    }
}

/// Composes the transposition of edge `index` on the left. `out` may be null.
#[no_mangle]
pub unsafe extern "C" fn ic_state_apply_edge(s: *mut IcState, index: u64, out: *mut IcDelta) -> IcStatus {
    guard(|| {
        non_null!(s);
        let st = &mut (*s).0;
        if index >= st.graph().num_edges() as u64 {
            return fail(IcStatus::Precondition, "edge index out of range");
        }
        let d = delta(st.apply_edge(index as usize));
        if !out.is_null() {
            *out = d;
        }
        IcStatus::Ok
    })
}

/// Composes `τ_{x,y}` on the left; `{x, y}` must be an edge. `out` may be null.
#[no_mangle]
pub unsafe extern "C" fn ic_state_apply_transposition(s: *mut IcState, x: u32, y: u32, out: *mut IcDelta) -> IcStatus {
    guard(|| {
        non_null!(s);
        match (*s).0.apply_transposition(x, y) {
            Ok(d) => {
                if !out.is_null() {
                    *out = delta(d);
                }
                IcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn ic_state_num_cycles(s: *const IcState) -> u64 {
    if s.is_null() { 0 } else { (*s).0.num_cycles() as u64 }
}

#[no_mangle]
pub unsafe extern "C" fn ic_state_largest_cycle(s: *const IcState) -> u64 {
    if s.is_null() { 0 } else { (*s).0.largest_cycle() as u64 }
}

#[no_mangle]
pub unsafe extern "C" fn ic_state_same_cycle_edges(s: *const IcState) -> u64 {
    if s.is_null() { 0 } else { (*s).0.same_cycle_edges() as u64 }
}

/// Copies the permutation's images into `buf`, which must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn ic_state_image(s: *const IcState, buf: *mut u32, len: u64) -> IcStatus {
    guard(|| {
        non_null!(s, buf);
        let image = (*s).0.image();
        if (len as usize) < image.len() {
            return fail(IcStatus::Precondition, "buffer shorter than the vertex count");
        }
        ptr::copy_nonoverlapping(image.as_ptr(), buf, image.len());
        IcStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn ic_state_free(s: *mut IcState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

fn scalar(out: *mut f64, r: interchange::Result<f64>) -> IcStatus {
    if out.is_null() {
        return fail(IcStatus::NullPointer, "null pointer argument");
    }
    match r {
        Ok(v) => write(out, v),
        Err(e) => from_error(e),
    }
}

/// `T(θ, d)`.
#[no_mangle]
pub unsafe extern "C" fn ic_critical_time(theta: f64, d: f64, out: *mut f64) -> IcStatus {
    guard(|| scalar(out, theory::critical_time(theta, d)))
}

#[no_mangle]
pub unsafe extern "C" fn ic_stirring_interval_bound(d: f64, epsilon: f64, s: f64, out: *mut f64) -> IcStatus {
    guard(|| scalar(out, theory::stirring_interval_bound(d, epsilon, s)))
}

#[no_mangle]
pub unsafe extern "C" fn ic_theorem1_pointwise_bound(theta: u32, d: f64, epsilon: f64, t: f64, out: *mut f64) -> IcStatus {
    guard(|| scalar(out, theory::theorem1_pointwise_bound(theta, d, epsilon, t)))
}

#[no_mangle]
pub unsafe extern "C" fn ic_theorem2_integral_bound(
    theta: f64,
    d: f64,
    epsilon: f64,
    a: f64,
    b: f64,
    out: *mut f64,
) -> IcStatus {
    guard(|| scalar(out, theory::theorem2_integral_bound(theta, d, epsilon, a, b)))
}

fn estimate(out: *mut IcEstimate, r: interchange::Result<WeightedEstimate>) -> IcStatus {
    if out.is_null() {
        return fail(IcStatus::NullPointer, "null pointer argument");
    }
    match r {
        Ok(e) => write(
            out,
            IcEstimate {
                value: e.value,
                std_error: e.std_error,
                ess: e.ess,
                replicas: e.replicas as u64,
                theta: e.theta,
                t: e.t,
                low_ess: e.low_ess,
            },
        ),
        Err(e) => from_error(e),
    }
}

/// Estimates `log Z_θ(t)`.
#[no_mangle]
pub unsafe extern "C" fn ic_estimate_log_partition(
    g: *const IcGraph,
    theta: f64,
    t: f64,
    replicas: u64,
    seed: u64,
    out: *mut IcEstimate,
) -> IcStatus {
    guard(|| {
        non_null!(g);
        let mc = MonteCarlo::new(replicas as usize, seed);
        estimate(out, estimate_log_partition(&(*g).0, theta, t, &mc))
    })
}

/// Estimates `P_{θ,t}(A_η)`.
#[no_mangle]
pub unsafe extern "C" fn ic_estimate_weighted_prob(
    g: *const IcGraph,
    theta: f64,
    t: f64,
    eta: f64,
    replicas: u64,
    seed: u64,
    out: *mut IcEstimate,
) -> IcStatus {
    guard(|| {
        non_null!(g);
        let mc = MonteCarlo::new(replicas as usize, seed);
        estimate(out, estimate_weighted_prob(&(*g).0, theta, t, eta, &mc))
    })
}

/// Estimates `∫_a^b P_{θ,t}(A_η) dt`.
#[no_mangle]
pub unsafe extern "C" fn ic_estimate_weighted_time_integral(
    g: *const IcGraph,
    theta: f64,
    a: f64,
    b: f64,
    eta: f64,
    grid_points: u64,
    replicas: u64,
    seed: u64,
    out: *mut IcEstimate,
) -> IcStatus {
    guard(|| {
        non_null!(g);
        let mc = MonteCarlo::new(replicas as usize, seed);
        let r = estimate_weighted_time_integral(&(*g).0, theta, a, b, eta, grid_points as usize, &mc);
        estimate(out, r.map(|x| x.estimate))
    })
}

/// Builds the exact chain; fails with `Resource` beyond `state_guard` states.
#[no_mangle]
pub unsafe extern "C" fn ic_chain_build(g: *const IcGraph, state_guard: u64, out: *mut *mut IcChain) -> IcStatus {
    guard(|| {
        non_null!(g, out);
        match ExactChain::build(&(*g).0, state_guard as usize) {
            Ok(c) => store(out, IcChain(c)),
            Err(e) => from_error(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn ic_chain_partition(c: *const IcChain, theta: f64, t: f64, out: *mut f64) -> IcStatus {
    guard(|| {
        non_null!(c);
        scalar(out, (*c).0.partition(theta, t))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ic_chain_mean_cycles(c: *const IcChain, t: f64, out: *mut f64) -> IcStatus {
    guard(|| {
        non_null!(c);
        scalar(out, (*c).0.mean_cycles(t))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ic_chain_weighted_prob(
    c: *const IcChain,
    theta: f64,
    t: f64,
    eta: f64,
    out: *mut f64,
) -> IcStatus {
    guard(|| {
        non_null!(c);
        scalar(out, (*c).0.weighted_prob(theta, t, eta))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ic_chain_free(c: *mut IcChain) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}
