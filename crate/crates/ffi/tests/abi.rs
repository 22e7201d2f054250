use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use ncphi4_ffi::*;

fn catalog(name: &str) -> *mut Ncphi4Graph {
    let name = CString::new(name).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ncphi4_graph_catalog(name.as_ptr(), &mut g) }, Ncphi4Status::Ok);
    g
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    unsafe { ncphi4_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn topology_of_catalog_graphs() {
    let g = catalog("fourpoint_irregular");
    let mut t = std::mem::MaybeUninit::<Ncphi4Topology>::uninit();
    assert_eq!(unsafe { ncphi4_graph_topology(g, t.as_mut_ptr()) }, Ncphi4Status::Ok);
    let t = unsafe { t.assume_init() };
    assert_eq!((t.genus, t.broken_faces, t.n_external), (0, 2, 4));
    assert_eq!(t.graph_class, Ncphi4GraphClass::PlanarIrregular);
    assert_eq!(t.divergence, Ncphi4Divergence::Convergent);
    unsafe { ncphi4_graph_free(g) };
}

#[test]
fn parse_errors_carry_messages() {
    let text = CString::new("vertex v1: a b c\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ncphi4_graph_parse(text.as_ptr(), &mut g) }, Ncphi4Status::Graph);
    assert!(g.is_null());
    assert!(last_error().contains("half-edges"), "{}", last_error());
}

#[test]
fn null_arguments_rejected() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ncphi4_graph_catalog(ptr::null(), &mut g) }, Ncphi4Status::NullPointer);
    let name = CString::new("tadpole_np").unwrap();
    assert_eq!(unsafe { ncphi4_graph_catalog(name.as_ptr(), ptr::null_mut()) }, Ncphi4Status::NullPointer);
    unsafe { ncphi4_graph_free(ptr::null_mut()) };
}

#[test]
fn amplitude_methods_agree() {
    let g = catalog("tadpole_np");
    let p = ncphi4_params_default();
    let c = ncphi4_cutoff_full();
    let mut a = std::mem::MaybeUninit::<Ncphi4Amplitude>::uninit();
    let s = unsafe { ncphi4_amplitude(g, 0.5, &p, &c, Ncphi4Method::Auto, 1e-10, 0, 0, a.as_mut_ptr()) };
    assert_eq!(s, Ncphi4Status::Ok);
    let det = unsafe { a.assume_init() };
    assert_eq!(det.method, Ncphi4Method::Bessel1d);
    assert_eq!(det.ess, -1.0);
    let s = unsafe { ncphi4_amplitude(g, 0.5, &p, &c, Ncphi4Method::SchwingerMc, 1e-10, 200_000, 7, a.as_mut_ptr()) };
    assert_eq!(s, Ncphi4Status::Ok);
    let mc = unsafe { a.assume_init() };
    assert!((mc.re - det.re).abs() < 4.0 * mc.abs_err, "{} vs {} ± {}", det.re, mc.re, mc.abs_err);
    unsafe { ncphi4_graph_free(g) };
}

#[test]
fn domain_and_unsupported_errors() {
    let g = catalog("tadpole_np");
    let mut p = ncphi4_params_default();
    let c = ncphi4_cutoff_full();
    let mut a = std::mem::MaybeUninit::<Ncphi4Amplitude>::uninit();
    p.theta = -1.0;
    let s = unsafe { ncphi4_amplitude(g, 0.5, &p, &c, Ncphi4Method::Auto, 1e-8, 0, 0, a.as_mut_ptr()) };
    assert_eq!(s, Ncphi4Status::Domain);
    let p = ncphi4_params_default();
    let s = unsafe { ncphi4_amplitude(g, 0.5, &p, &c, Ncphi4Method::SchwingerGauss, 1e-8, 0, 0, a.as_mut_ptr()) };
    assert_eq!(s, Ncphi4Status::Unsupported);
    unsafe { ncphi4_graph_free(g) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ncphi4_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Compiles a C program against the generated header and the static
/// library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/ncphi4.h");
    assert!(header.exists());
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.parent().unwrap().join("libncphi4_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}; skipping", lib.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("ncphi4_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status();
    let Ok(status) = status else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with(env!("CARGO_PKG_VERSION")));
}
