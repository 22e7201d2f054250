//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one line.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::corner_oracle;
use ncphi4::amplitude::{
    evaluate, fourpoint_irregular_with, schwinger_gauss_with, schwinger_mc, tadpole_nonplanar_with, tadpole_planar,
    template_momenta, EvalOptions, McOptions, Tolerance,
};
use ncphi4::fit::{
    finite_a_shift, fit_ir_structure, fit_uv_divergence, log_grid, max_change_per_decade, reproduce_table,
    FitModel, ScanAxis, ScanSeries, TableOptions,
};
use ncphi4::graph::catalog;
use ncphi4::multiscale::{route_momenta, slice_propagator};
use ncphi4::rosette::{contract_to_rosette, enumerate_spanning_trees, total_phase_angle, vertex_phase_angle};
use ncphi4::topology::topology_report;
use ncphi4::{catalog_get, CutoffSpec, Method, ModelParams, ThetaMatrix, Vec4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail; each must actually fail.
const KNOWN_FAILURES: &[usize] = &[9];

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let mut n = 0;
    for e in catalog() {
        let rep = topology_report(&e.graph).map_err(|x| x.to_string())?;
        let (f, g, b) = corner_oracle(&e.graph.to_decl());
        if (rep.faces, rep.genus, rep.broken) != (f, g, b) {
            return Err(format!("{}: trace ({},{},{}) oracle ({f},{g},{b})", e.name, rep.faces, rep.genus, rep.broken));
        }
        if rep.n as i64 - rep.lines as i64 + rep.faces as i64 != 2 - 2 * rep.genus as i64 {
            return Err(format!("{}: Euler relation fails", e.name));
        }
        n += 1;
    }
    check(n >= 8, format!("{n} graphs agree"))
}

fn catalog_topology() -> Outcome {
    let mut parts = Vec::new();
    for name in ["tadpole_np", "fourpoint_irregular"] {
        let rep = topology_report(&catalog_get(name).unwrap()).unwrap();
        if (rep.genus, rep.broken) != (0, 2) {
            return Err(format!("{name}: g={} B={}", rep.genus, rep.broken));
        }
        parts.push(format!("{name} g=0 B=2"));
    }
    Ok(parts.join(", "))
}

fn rosette_invariance() -> Outcome {
    let mut trees = 0;
    for e in catalog() {
        let rep = topology_report(&e.graph).unwrap();
        for t in enumerate_spanning_trees(&e.graph) {
            let r = contract_to_rosette(&e.graph, &t);
            let rr = r.topology().map_err(|x| x.to_string())?;
            if (rr.faces, rr.genus, rr.broken) != (rep.faces, rep.genus, rep.broken) {
                return Err(format!("{}: rosette ({},{},{})", e.name, rr.faces, rr.genus, rr.broken));
            }
            if rep.genus == 0 && !r.is_crossing_free() {
                return Err(format!("{}: planar graph gave crossing rosette", e.name));
            }
            trees += 1;
        }
    }
    Ok(format!("{trees} spanning trees checked"))
}

fn random_vec(rng: &mut ChaCha8Rng) -> Vec4 {
    Vec4::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
}

fn phase_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let theta = ThetaMatrix::new(1.3);
    let mut worst: f64 = 0.0;
    for name in ["sunset_np", "fourpoint_np", "fourpoint_irregular"] {
        let g = catalog_get(name).unwrap();
        let trees = enumerate_spanning_trees(&g);
        for _ in 0..5 {
            let mut ext: Vec<Vec4> = (0..g.n_external() - 1).map(|_| random_vec(&mut rng)).collect();
            ext.push(-ext.iter().copied().sum::<Vec4>());
            let loops: Vec<Vec4> = (0..g.n_loops()).map(|_| random_vec(&mut rng)).collect();
            let momenta = route_momenta(&g, &trees[0], &loops, &ext).map_err(|e| e.to_string())?;
            let reference = vertex_phase_angle(&g, &momenta, &theta);
            for t in &trees {
                let r = contract_to_rosette(&g, t);
                let a = total_phase_angle(&r, &momenta, &theta).map_err(|e| e.to_string())?;
                worst = worst.max((a - reference).abs());
            }
        }
    }
    check(worst <= 1e-12, format!("max phase deviation {worst:.1e}"))
}

fn slice_identities() -> Outcome {
    let params = ModelParams::default();
    let m2 = params.m_base * params.m_base;
    let denom = |p: f64| p * p + params.a / (params.theta * params.theta * p * p) + params.mu2;
    let mut worst: f64 = 0.0;
    for p in log_grid(1e-3, 1e3, 61) {
        let v = Vec4::axis(0) * p;
        let sum: f64 = (0..80).map(|i| slice_propagator(&v, i, &params).unwrap()).sum();
        worst = worst.max((sum * denom(p) - 1.0).abs());
    }
    let mut violations = 0;
    for p in log_grid(1e-3, 1e3, 50) {
        let v = Vec4::axis(0) * p;
        for i in 0..30u32 {
            let c = slice_propagator(&v, i, &params).unwrap();
            let bound = m2 * (-params.m_base.powi(-2 * i as i32) * denom(p)).exp();
            if c > bound * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    check(
        worst <= 1e-12 && violations == 0,
        format!("sum rel err {worst:.1e}, bound violations {violations}/1500"),
    )
}

fn tadpole_scan(params: &ModelParams, ks: &[f64], cut: impl Fn(f64) -> CutoffSpec) -> Result<ScanSeries, String> {
    let tol = Tolerance::new(1e-300, 1e-12);
    let samples = ks
        .iter()
        .map(|&k| tadpole_nonplanar_with(&(Vec4::axis(0) * k), params, &cut(k), &tol))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    ScanSeries::from_samples(ScanAxis::KIr, ks, &samples, Some(*params)).map_err(|e| e.to_string())
}

fn coef(f: &ncphi4::fit::FitResult, name: &str) -> (f64, f64) {
    let c = f.coef(name).unwrap();
    (c.value, c.stderr)
}

fn tadpole_ir_structure() -> Outcome {
    let ks = log_grid(1e-3, 1e-1, 20);
    let massive = ModelParams::default().with_a(0.0).with_mu2(1.0);
    let fit = fit_ir_structure(&tadpole_scan(&massive, &ks, CutoffSpec::tadpole)?).map_err(|e| e.to_string())?;
    let massless = massive.with_mu2(0.0);
    let fit0 = fit_ir_structure(&tadpole_scan(&massless, &ks, CutoffSpec::tadpole)?).map_err(|e| e.to_string())?;
    let (c, _) = coef(&fit, "c");
    let (cp, cp_err) = coef(&fit0, "c_prime");
    check(
        fit.r_squared >= 0.999 && cp.abs() <= 2.0 * cp_err,
        format!(
            "c={c:.4} (4π²={:.4}) r²={:.6}; massless c′={cp:.2e} ± {cp_err:.1e}",
            4.0 * PI * PI,
            fit.r_squared
        ),
    )
}

fn finite_a_renormalization() -> Outcome {
    let ks = log_grid(1e-4, 1e-2, 20);
    let params = ModelParams::default().with_a(1.0).with_mu2(1.0);
    let s = tadpole_scan(&params, &ks, CutoffSpec::slice_ir)?;
    let shift = finite_a_shift(&s).map_err(|e| e.to_string())?;
    let fit = fit_ir_structure(&s).map_err(|e| e.to_string())?;
    let (cp, cp_err) = coef(&fit, "c_prime");
    check(
        shift.variation_last_decade < 0.1 && cp.abs() <= 2.0 * cp_err,
        format!(
            "F(0)={:.6} ± {:.1e}, last-decade variation {:.1e}, c′={cp:.1e} ± {cp_err:.1e}",
            shift.f0, shift.err, shift.variation_last_decade
        ),
    )
}

fn uv_exponents() -> Outcome {
    let lambdas = log_grid(10.0, 1e3, 16);
    let massless = ModelParams::default().with_a(0.0);
    let planar = lambdas
        .iter()
        .map(|&l| tadpole_planar(&massless, l))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let s = ScanSeries::from_samples(ScanAxis::LambdaUv, &lambdas, &planar, None).map_err(|e| e.to_string())?;
    let fit = fit_uv_divergence(&s).map_err(|e| e.to_string())?;
    let exponent = fit.coef("exponent").map(|c| c.value).unwrap_or(f64::NAN);
    let ok_planar = fit.model == FitModel::PowerLaw && (exponent - 2.0).abs() <= 0.1;

    let opts = TableOptions::default();
    let bubble = ncphi4::fit::uv_scan(&catalog_get("bubble_regular").unwrap(), &opts).map_err(|e| e.to_string())?;
    let bfit = fit_uv_divergence(&bubble).map_err(|e| e.to_string())?;
    let ok_bubble = bfit.model == FitModel::LogLaw;

    let lambdas = log_grid(10.0, 1e4, 16);
    let k = Vec4::axis(0);
    let tol = Tolerance::new(1e-300, 1e-10);
    let np = lambdas
        .iter()
        .map(|&l| tadpole_nonplanar_with(&k, &massless, &CutoffSpec::uv_schwinger(l), &tol))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let s = ScanSeries::from_samples(ScanAxis::LambdaUv, &lambdas, &np, None).map_err(|e| e.to_string())?;
    let change = max_change_per_decade(&s, 10.0);
    check(
        ok_planar && ok_bubble && change < 0.01,
        format!(
            "planar exponent {exponent:.4}; bubble {}; non-planar change/decade {change:.1e}",
            bfit.model.as_str()
        ),
    )
}

fn four_point_boundedness() -> Outcome {
    let g = catalog_get("fourpoint_irregular").unwrap();
    let tol = Tolerance::new(1e-12, 1e-6);
    let params = ModelParams::default().with_a(1.0).with_mu2(1.0);
    // error bars widen the bracket, so `lo` is a safe lower bound on max/min
    let (mut max_lo, mut max_hi, mut min_lo, mut min_hi) = (0.0_f64, 0.0_f64, f64::INFINITY, f64::INFINITY);
    for kk in log_grid(1e-2, 1e2, 17) {
        let r = fourpoint_irregular_with(&(Vec4::axis(0) * kk), &params, &CutoffSpec::slice_ir(kk), &tol)
            .map_err(|e| format!("K={kk:.2e}: {e}"))?;
        let m = r.value.norm();
        max_lo = max_lo.max(m - r.abs_err);
        max_hi = max_hi.max(m + r.abs_err);
        min_lo = min_lo.min((m - r.abs_err).max(0.0));
        min_hi = min_hi.min(m + r.abs_err);
    }
    let ratio_lo = max_lo / min_hi;
    let ratio_hi = max_hi / min_lo;

    let gauss = ModelParams::default().with_a(0.0).with_mu2(1.0);
    let mut worst: f64 = 0.0;
    for kk in [1e-2, 1e-1, 0.5, 2.0, 10.0] {
        let ks = template_momenta(4, kk);
        let cut = CutoffSpec::slice_ir(kk);
        let a = schwinger_gauss_with(&g, &ks, &gauss, &cut, &Tolerance::new(1e-22, 1e-9)).map_err(|e| format!("gauss K={kk}: {e}"))?;
        let b = evaluate(&g, &ks, &gauss, &cut, Some(Method::Reduced3d), &EvalOptions { tol: Tolerance::new(1e-17, 1e-8), ..Default::default() })
            .map_err(|e| e.to_string())?;
        worst = worst.max(a.sigma_distance(&b));
    }
    check(
        ratio_hi <= 10.0 && worst <= 3.0,
        format!("a=1 max/min |A| ≥ {ratio_lo:.1e} (max {max_hi:.4}, min ≤ {min_hi:.1e}); a=0 Gaussian oracle max {worst:.2}σ"),
    )
}

fn classification_table() -> Outcome {
    let t = reproduce_table(&catalog(), &TableOptions::default());
    let expected = [
        [Some("ren."), Some("ren.")],
        [Some("finite ren."), Some("convergent")],
        [Some("convergent"), Some("convergent")],
    ];
    let m = t.matrix();
    let detail = format!(
        "{} graphs, {} mismatches, {} failures, matrix {:?}",
        t.rows.len(),
        t.mismatches().len(),
        t.failures.len(),
        m.map(|r| r.map(|c| c.unwrap_or("-")))
    );
    check(t.is_consistent() && m == expected, detail)
}

fn cross_method() -> Outcome {
    let params = ModelParams::default();
    let mc = McOptions { samples: 1_000_000, seed: 42 };
    let tol = Tolerance::new(1e-300, 1e-10);
    let tad = catalog_get("tadpole_np").unwrap();
    let mut worst_t: f64 = 0.0;
    for k in [0.1, 0.3, 0.7, 1.5, 3.0] {
        let kv = Vec4::axis(0) * k;
        let cut = CutoffSpec::tadpole(k);
        let a = tadpole_nonplanar_with(&kv, &params, &cut, &tol).map_err(|e| e.to_string())?;
        let b = schwinger_mc(&tad, &params, &[kv, -kv], &cut, &mc).map_err(|e| e.to_string())?;
        worst_t = worst_t.max(a.sigma_distance(&b));
    }
    let irregular = catalog_get("fourpoint_irregular").unwrap();
    let mut worst_f: f64 = 0.0;
    for k in [0.1, 0.3, 1.0, 3.0, 10.0] {
        let ks = template_momenta(4, k);
        let cut = CutoffSpec::full();
        let a = evaluate(&irregular, &ks, &params, &cut, Some(Method::Reduced3d), &EvalOptions { tol, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let b = schwinger_mc(&irregular, &params, &ks, &cut, &mc).map_err(|e| e.to_string())?;
        worst_f = worst_f.max(a.sigma_distance(&b));
    }
    check(
        worst_t <= 3.0 && worst_f <= 3.0,
        format!("tadpole bessel1d vs MC max {worst_t:.2}σ; fourpoint_irregular reduced3d vs MC max {worst_f:.2}σ"),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, &str, fn() -> Outcome, u64); 11] = [
        (1, "topology oracle equivalence", oracle_equivalence, 1),
        (2, "two broken faces", catalog_topology, 1),
        (3, "rosette invariance", rosette_invariance, 10),
        (4, "phase tree-independence", phase_independence, 10),
        (5, "slice identities", slice_identities, 5),
        (6, "tadpole IR structure", tadpole_ir_structure, 120),
        (7, "finite a-renormalization", finite_a_renormalization, 120),
        (8, "UV exponents", uv_exponents, 300),
        (9, "four-point boundedness", four_point_boundedness, 300),
        (10, "classification table", classification_table, 600),
        (11, "cross-method agreement", cross_method, 300),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = Vec::new();
    for (id, name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f.parse() == Ok(id) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > Duration::from_secs(budget) {
            passed = false;
            detail.push_str(&format!("; over the {budget} s budget"));
        }
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (passed, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("[{tag}] {id:>2} {name}: {detail} ({:.2} s)", elapsed.as_secs_f64());
        if passed == known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
