//! C ABI for ncphi4.
//!
//! Graphs are opaque handles created by `ncphi4_graph_catalog` or
//! `ncphi4_graph_parse` and released with `ncphi4_graph_free`. Every
//! fallible call returns an `Ncphi4Status`; on failure a message is kept
//! per thread and can be copied out with `ncphi4_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ncphi4::amplitude::{evaluate, template_momenta, AmplitudeError, CutoffSpec, EvalOptions, McOptions, Method};
use ncphi4::topology::{divergence_class, superficial_degree_bound, topology_report, DivergenceClass, GraphClass};
use ncphi4::{catalog_get, parse_graph, GraphError, ModelParams, RibbonGraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ncphi4Status {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Unparseable or invalid graph text, or unknown catalog name.
    Graph = 3,
    /// Parameters, cutoff or kinematics outside the evaluator's domain.
    Domain = 4,
    /// Quadrature did not converge or Monte Carlo degenerated.
    Numerical = 5,
    Unsupported = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ncphi4GraphClass {
    PlanarRegular = 0,
    PlanarIrregular = 1,
    Nonplanar = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ncphi4Divergence {
    Renormalizable = 0,
    FiniteRenormalization = 1,
    Convergent = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ncphi4Method {
    Auto = 0,
    Bessel1d = 1,
    Reduced3d = 2,
    SchwingerGauss = 3,
    SchwingerMc = 4,
}

/// Opaque graph handle.
pub struct Ncphi4Graph {
    graph: RibbonGraph,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ncphi4Params {
    pub a: f64,
    pub mu2: f64,
    pub theta: f64,
    pub m_base: f64,
}

/// Schwinger window `[alpha_min, alpha_max]` (`alpha_max` may be
/// infinite); `p_uv > 0` adds a hard momentum cutoff.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ncphi4Cutoff {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub p_uv: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ncphi4Topology {
    pub n_vertices: usize,
    pub n_external: usize,
    pub n_lines: usize,
    pub n_faces: usize,
    pub genus: usize,
    pub broken_faces: usize,
    pub graph_class: Ncphi4GraphClass,
    pub divergence: Ncphi4Divergence,
    pub omega_bound: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ncphi4Amplitude {
    pub re: f64,
    pub im: f64,
    pub abs_err: f64,
    pub method: Ncphi4Method,
    /// Effective sample size, or -1 for deterministic methods.
    pub ess: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: Ncphi4Status, message: impl Into<String>) -> Ncphi4Status {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
    status
}

fn guard(f: impl FnOnce() -> Ncphi4Status) -> Ncphi4Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(Ncphi4Status::Panic, "internal panic"),
    }
}

fn graph_status(e: GraphError) -> Ncphi4Status {
    fail(Ncphi4Status::Graph, e.to_string())
}

fn amplitude_status(e: AmplitudeError) -> Ncphi4Status {
    let s = match &e {
        AmplitudeError::Quadrature(_) | AmplitudeError::EssCollapse { .. } => Ncphi4Status::Numerical,
        AmplitudeError::Unsupported(_) | AmplitudeError::TooManyLoops { .. } => Ncphi4Status::Unsupported,
        _ => Ncphi4Status::Domain,
    };
    fail(s, e.to_string())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Ncphi4Status> {
    if s.is_null() {
        return Err(fail(Ncphi4Status::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(Ncphi4Status::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn emit_graph(g: RibbonGraph, out: *mut *mut Ncphi4Graph) -> Ncphi4Status {
    *out = Box::into_raw(Box::new(Ncphi4Graph { graph: g }));
    Ncphi4Status::Ok
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated). Returns the message length in bytes, excluding the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ncphi4_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ncphi4_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Model defaults: `a = 1`, `μ² = 1`, `θ = 1`, `M = 2`.
#[no_mangle]
pub extern "C" fn ncphi4_params_default() -> Ncphi4Params {
    let p = ModelParams::default();
    Ncphi4Params {
        a: p.a,
        mu2: p.mu2,
        theta: p.theta,
        m_base: p.m_base,
    }
}

/// The unrestricted window `[0, ∞)`.
#[no_mangle]
pub extern "C" fn ncphi4_cutoff_full() -> Ncphi4Cutoff {
    Ncphi4Cutoff {
        alpha_min: 0.0,
        alpha_max: f64::INFINITY,
        p_uv: 0.0,
    }
}

/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncphi4_graph_catalog(name: *const c_char, out: *mut *mut Ncphi4Graph) -> Ncphi4Status {
    guard(|| {
        if out.is_null() {
            return fail(Ncphi4Status::NullPointer, "null output handle");
        }
        let name = match read_str(name) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match catalog_get(name) {
            Ok(g) => emit_graph(g, out),
            Err(e) => graph_status(e),
        }
    })
}

/// Parses a graph in the line-oriented text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncphi4_graph_parse(text: *const c_char, out: *mut *mut Ncphi4Graph) -> Ncphi4Status {
    guard(|| {
        if out.is_null() {
            return fail(Ncphi4Status::NullPointer, "null output handle");
        }
        let text = match read_str(text) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match parse_graph(text) {
            Ok(g) => emit_graph(g, out),
            Err(e) => graph_status(e),
        }
    })
}

/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ncphi4_graph_free(g: *mut Ncphi4Graph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncphi4_graph_topology(g: *const Ncphi4Graph, out: *mut Ncphi4Topology) -> Ncphi4Status {
    guard(|| {
        if g.is_null() || out.is_null() {
            return fail(Ncphi4Status::NullPointer, "null argument");
        }
        let rep = match topology_report(&(*g).graph) {
            Ok(r) => r,
            Err(e) => return fail(Ncphi4Status::Graph, e.to_string()),
        };
        *out = Ncphi4Topology {
            n_vertices: rep.n,
            n_external: rep.n_ext,
            n_lines: rep.lines,
            n_faces: rep.faces,
            genus: rep.genus,
            broken_faces: rep.broken,
            graph_class: match rep.class {
                GraphClass::PlanarRegular => Ncphi4GraphClass::PlanarRegular,
                GraphClass::PlanarIrregular => Ncphi4GraphClass::PlanarIrregular,
                GraphClass::Nonplanar => Ncphi4GraphClass::Nonplanar,
            },
            divergence: match divergence_class(&rep) {
                DivergenceClass::RenormalizableDivergent => Ncphi4Divergence::Renormalizable,
                DivergenceClass::FiniteRenormalization => Ncphi4Divergence::FiniteRenormalization,
                DivergenceClass::Convergent => Ncphi4Divergence::Convergent,
            },
            omega_bound: superficial_degree_bound(&rep),
        };
        Ncphi4Status::Ok
    })
}

/// Amplitude at the template external momenta of scale `k`, with the
/// vertex coupling factored out. `rel_tol` applies to quadrature methods,
/// `samples` and `seed` to Monte Carlo.
///
/// # Safety
/// `g` must be a live handle; `params`, `cut` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ncphi4_amplitude(
    g: *const Ncphi4Graph,
    k: f64,
    params: *const Ncphi4Params,
    cut: *const Ncphi4Cutoff,
    method: Ncphi4Method,
    rel_tol: f64,
    samples: usize,
    seed: u64,
    out: *mut Ncphi4Amplitude,
) -> Ncphi4Status {
    guard(|| {
        if g.is_null() || params.is_null() || cut.is_null() || out.is_null() {
            return fail(Ncphi4Status::NullPointer, "null argument");
        }
        let (p, c) = (&*params, &*cut);
        let model = ModelParams {
            a: p.a,
            mu2: p.mu2,
            theta: p.theta,
            m_base: p.m_base,
            ..ModelParams::default()
        };
        let cutoff = CutoffSpec {
            alpha_min: c.alpha_min,
            alpha_max: c.alpha_max,
            p_uv: (c.p_uv > 0.0).then_some(c.p_uv),
        };
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return fail(Ncphi4Status::Domain, format!("relative tolerance {rel_tol} outside (0, 1)"));
        }
        let opts = EvalOptions {
            tol: ncphi4::amplitude::Tolerance::new(1e-300, rel_tol),
            mc: McOptions { samples, seed },
        };
        let m = match method {
            Ncphi4Method::Auto => None,
            Ncphi4Method::Bessel1d => Some(Method::Bessel1d),
            Ncphi4Method::Reduced3d => Some(Method::Reduced3d),
            Ncphi4Method::SchwingerGauss => Some(Method::SchwingerGauss),
            Ncphi4Method::SchwingerMc => Some(Method::SchwingerMc),
        };
        let graph = &(*g).graph;
        let ks = template_momenta(graph.n_external(), k);
        match evaluate(graph, &ks, &model, &cutoff, m, &opts) {
            Ok(s) => {
                *out = Ncphi4Amplitude {
                    re: s.value.re,
                    im: s.value.im,
                    abs_err: s.abs_err,
                    method: match s.method {
                        Method::Bessel1d => Ncphi4Method::Bessel1d,
                        Method::Reduced3d => Ncphi4Method::Reduced3d,
                        Method::SchwingerGauss => Ncphi4Method::SchwingerGauss,
                        Method::SchwingerMc => Ncphi4Method::SchwingerMc,
                    },
                    ess: s.ess.unwrap_or(-1.0),
                };
                Ncphi4Status::Ok
            }
            Err(e) => amplitude_status(e),
        }
    })
}
