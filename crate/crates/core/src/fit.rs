//! Divergence structure from amplitude scans: infrared coefficients,
//! ultraviolet growth laws, the finite shift of the `a` coefficient and the
//! classification table.
//!
//! All fits use the real part of the amplitude.

use std::fmt;
use std::io::Read;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::amplitude::{evaluate, template_momenta, AmplitudeError, AmplitudeSample, CutoffSpec, EvalOptions, Tolerance};
use crate::graph::{GraphCatalogEntry, RibbonGraph};
use crate::multiscale::ModelParams;
use crate::topology::{divergence_class, topology_report, DivergenceClass, GraphClass, TopologyError, TopologyReport};

pub const MIN_POINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("scan has {got} points; at least {need} needed")]
    TooFewPoints { got: usize, need: usize },
    #[error("scan axis is not strictly monotone at point {index}")]
    NotMonotone { index: usize },
    #[error("non-finite value at point {index}")]
    NonFinite { index: usize },
    #[error("expected a {expected} scan, got {got}")]
    WrongAxis { expected: ScanAxis, got: ScanAxis },
    #[error("fit window: {0}")]
    Window(String),
    #[error("design matrix is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("extrapolation unstable: {0}")]
    Unstable(String),
    #[error("CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Amplitude(#[from] AmplitudeError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanAxis {
    /// External momentum `|k|`, infrared scans.
    KIr,
    /// Ultraviolet cutoff `Λ`.
    LambdaUv,
}

impl ScanAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScanAxis::KIr => "k_ir",
            ScanAxis::LambdaUv => "lambda_uv",
        }
    }

    pub fn parse(s: &str) -> Option<ScanAxis> {
        match s {
            "k" | "k_ir" => Some(ScanAxis::KIr),
            "uv" | "lambda" | "lambda_uv" => Some(ScanAxis::LambdaUv),
            _ => None,
        }
    }
}

impl fmt::Display for ScanAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub x: f64,
    pub value: Complex64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSeries {
    axis: ScanAxis,
    points: Vec<ScanPoint>,
    params: Option<ModelParams>,
}

impl ScanSeries {
    pub fn new(axis: ScanAxis, points: Vec<ScanPoint>, params: Option<ModelParams>) -> Result<Self, FitError> {
        if points.len() < MIN_POINTS {
            return Err(FitError::TooFewPoints {
                got: points.len(),
                need: MIN_POINTS,
            });
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.x.is_finite() && p.value.re.is_finite() && p.value.im.is_finite() && p.abs_err.is_finite()) {
                return Err(FitError::NonFinite { index: i });
            }
        }
        let up = points[1].x > points[0].x;
        for i in 1..points.len() {
            let d = points[i].x - points[i - 1].x;
            if d == 0.0 || (d > 0.0) != up {
                return Err(FitError::NotMonotone { index: i });
            }
        }
        Ok(ScanSeries { axis, points, params })
    }

    /// Series from evaluated samples at grid values `xs`.
    pub fn from_samples(
        axis: ScanAxis,
        xs: &[f64],
        samples: &[AmplitudeSample],
        params: Option<ModelParams>,
    ) -> Result<Self, FitError> {
        let points = xs
            .iter()
            .zip(samples)
            .map(|(&x, s)| ScanPoint {
                x,
                value: s.value,
                abs_err: s.abs_err,
            })
            .collect();
        ScanSeries::new(axis, points, params)
    }

    /// Reads `axis,re,im,abs_err,status` rows; rows whose status is not
    /// `ok` are skipped.
    pub fn read_csv<R: Read>(axis: ScanAxis, reader: R) -> Result<Self, FitError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers().map_err(|e| FitError::Csv(e.to_string()))?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| FitError::Csv(format!("missing column '{name}'")))
        };
        let (cx, cre, cim, cerr) = (col("axis")?, col("re")?, col("im")?, col("abs_err")?);
        let cstatus = col("status").ok();
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| FitError::Csv(e.to_string()))?;
            if let Some(c) = cstatus {
                if rec.get(c).map(str::trim) != Some("ok") {
                    continue;
                }
            }
            let num = |c: usize| -> Result<f64, FitError> {
                let field = rec.get(c).unwrap_or("").trim();
                field
                    .parse::<f64>()
                    .map_err(|_| FitError::Csv(format!("row {}: bad number '{field}'", i + 2)))
            };
            points.push(ScanPoint {
                x: num(cx)?,
                value: Complex64::new(num(cre)?, num(cim)?),
                abs_err: num(cerr)?,
            });
        }
        ScanSeries::new(axis, points, None)
    }

    pub fn axis(&self) -> ScanAxis {
        self.axis
    }

    pub fn points(&self) -> &[ScanPoint] {
        &self.points
    }

    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    fn sorted(&self) -> Vec<ScanPoint> {
        let mut p = self.points.clone();
        p.sort_by(|a, b| a.x.total_cmp(&b.x));
        p
    }

    fn decades(&self) -> f64 {
        let (lo, hi) = self
            .points
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
        (hi / lo).log10()
    }

    fn expect_axis(&self, expected: ScanAxis) -> Result<(), FitError> {
        if self.axis != expected {
            return Err(FitError::WrongAxis {
                expected,
                got: self.axis,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitModel {
    IrStructure,
    PowerLaw,
    LogLaw,
    /// Neither growth law: bounded within the scan, or no acceptable fit.
    BoundedOther,
}

impl FitModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitModel::IrStructure => "ir_structure",
            FitModel::PowerLaw => "power_law",
            FitModel::LogLaw => "log_law",
            FitModel::BoundedOther => "bounded/other",
        }
    }
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: &'static str,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    pub coefficients: Vec<Coefficient>,
    pub residual_norm: f64,
    pub r_squared: f64,
}

impl FitResult {
    pub fn coef(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    /// Whether the UV fit found growth.
    pub fn is_divergent(&self) -> bool {
        matches!(self.model, FitModel::PowerLaw | FitModel::LogLaw)
    }
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model {}", self.model)?;
        for c in &self.coefficients {
            writeln!(f, "  {:<22} {:+.6e} ± {:.3e}", c.name, c.value, c.stderr)?;
        }
        writeln!(f, "  residual_norm          {:.3e}", self.residual_norm)?;
        write!(f, "  r_squared              {:.6}", self.r_squared)
    }
}

struct LsFit {
    coef: Vec<f64>,
    stderr: Vec<f64>,
}

/// Ordinary least squares with column equilibration; standard errors from
/// the residual variance.
fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<LsFit, FitError> {
    let (n, p) = x.shape();
    if n <= p {
        return Err(FitError::TooFewPoints { got: n, need: p + 1 });
    }
    let scale: Vec<f64> = (0..p)
        .map(|j| {
            let s = x.column(j).norm();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let xs = DMatrix::from_fn(n, p, |i, j| x[(i, j)] / scale[j]);
    let svd = xs.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < 1e12) {
        return Err(FitError::IllConditioned { condition });
    }
    let beta = svd.solve(y, 0.0).map_err(|e| FitError::Window(e.to_string()))?;
    let resid = y - &xs * &beta;
    let rss = resid.norm_squared();
    let s2 = rss / (n - p) as f64;
    let v = svd.v_t.as_ref().expect("v requested").transpose();
    let stderr = (0..p)
        .map(|j| {
            let var: f64 = (0..p).map(|k| (v[(j, k)] / sv[k]).powi(2)).sum::<f64>() * s2;
            var.sqrt() / scale[j]
        })
        .collect();
    let coef = (0..p).map(|j| beta[j] / scale[j]).collect();
    Ok(LsFit {
        coef,
        stderr,
    })
}

/// `value ≈ c k⁻² + c′ ln k² + d₀ + d₁ k²` over the scan window.
pub fn fit_ir_structure(s: &ScanSeries) -> Result<FitResult, FitError> {
    s.expect_axis(ScanAxis::KIr)?;
    let pts = s.sorted();
    if pts.last().expect("nonempty").x > 1.0 {
        return Err(FitError::Window("infrared fit needs k ≤ 1".into()));
    }
    if s.decades() < 2.0 - 1e-9 {
        return Err(FitError::Window(format!("k spans {:.2} decades; need 2", s.decades())));
    }
    let x = DMatrix::from_fn(pts.len(), 4, |i, j| {
        let k2 = pts[i].x * pts[i].x;
        match j {
            0 => 1.0 / k2,
            1 => k2.ln(),
            2 => 1.0,
            _ => k2,
        }
    });
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.value.re));
    let fit = least_squares(&x, &y)?;
    let raw: Vec<f64> = pts.iter().map(|p| p.value.re).collect();
    let pred = |k: f64| {
        let k2 = k * k;
        fit.coef[0] / k2 + fit.coef[1] * k2.ln() + fit.coef[2] + fit.coef[3] * k2
    };
    let rss: f64 = pts.iter().zip(&raw).map(|(p, v)| (v - pred(p.x)).powi(2)).sum();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let tss: f64 = raw.iter().map(|v| (v - mean).powi(2)).sum();
    let names = ["c", "c_prime", "d0", "d1"];
    Ok(FitResult {
        model: FitModel::IrStructure,
        coefficients: names
            .iter()
            .zip(fit.coef.iter().zip(&fit.stderr))
            .map(|(name, (v, e))| Coefficient {
                name,
                value: *v,
                stderr: *e,
            })
            .collect(),
        residual_norm: rss.sqrt(),
        r_squared: if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 },
    })
}

/// Largest relative change of the value per decade of the axis between
/// neighbouring points with `x ≥ from`.
pub fn max_change_per_decade(s: &ScanSeries, from: f64) -> f64 {
    let pts: Vec<ScanPoint> = s.sorted().into_iter().filter(|p| p.x >= from).collect();
    pts.windows(2)
        .map(|w| {
            let rel = (w[1].value.re - w[0].value.re).abs() / w[0].value.re.abs().max(f64::MIN_POSITIVE);
            rel / (w[1].x / w[0].x).log10()
        })
        .fold(0.0, f64::max)
}

/// Relative change per decade under which a UV scan counts as bounded.
pub const BOUNDED_CHANGE: f64 = 0.01;
/// Ratio by which one growth law's residual must beat the other's.
pub const MODEL_RATIO: f64 = 10.0;
/// RMS relative residual above which neither growth law fits.
pub const MAX_RELATIVE_RMS: f64 = 0.05;

/// Power law `A Λ^ρ` against log law `A ln Λ + B`, after a boundedness
/// pre-check.
pub fn fit_uv_divergence(s: &ScanSeries) -> Result<FitResult, FitError> {
    s.expect_axis(ScanAxis::LambdaUv)?;
    if s.decades() < 2.0 - 1e-9 {
        return Err(FitError::Window(format!("Λ spans {:.2} decades; need 2", s.decades())));
    }
    let pts = s.sorted();
    let n = pts.len();
    let y: Vec<f64> = pts.iter().map(|p| p.value.re).collect();
    // boundedness is judged on the final decade; early points may still
    // carry a slowly decaying approach to the limit
    let change = max_change_per_decade(s, pts[n - 1].x / 10.0 * (1.0 - 1e-9));
    let bounded = |r: f64, rr: f64| FitResult {
        model: FitModel::BoundedOther,
        coefficients: vec![
            Coefficient {
                name: "last_value",
                value: y[n - 1],
                stderr: pts[n - 1].abs_err,
            },
            Coefficient {
                name: "max_change_per_decade",
                value: change,
                stderr: 0.0,
            },
        ],
        residual_norm: r,
        r_squared: rr,
    };
    if change < BOUNDED_CHANGE {
        return Ok(bounded(0.0, 0.0));
    }
    let rel_rms = |pred: &dyn Fn(f64) -> f64| -> f64 {
        let ss: f64 = pts.iter().zip(&y).map(|(p, v)| ((v - pred(p.x)) / v).powi(2)).sum();
        (ss / n as f64).sqrt()
    };
    let r2 = |pred: &dyn Fn(f64) -> f64| -> f64 {
        let mean = y.iter().sum::<f64>() / n as f64;
        let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        let rss: f64 = pts.iter().zip(&y).map(|(p, v)| (v - pred(p.x)).powi(2)).sum();
        if tss > 0.0 {
            (1.0 - rss / tss).clamp(0.0, 1.0)
        } else {
            1.0
        }
    };

    let power = if y.iter().all(|v| *v > 0.0) {
        let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { pts[i].x.ln() });
        let ly = DVector::from_iterator(n, y.iter().map(|v| v.ln()));
        Some(least_squares(&x, &ly)?)
    } else {
        None
    };
    // weighted by 1/|y| so both laws minimise relative residuals
    let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { pts[i].x.ln() / y[i].abs() } else { 1.0 / y[i].abs() });
    let wy = DVector::from_iterator(n, y.iter().map(|v| v.signum()));
    let log = least_squares(&x, &wy)?;

    let log_pred = |x: f64| log.coef[0] * x.ln() + log.coef[1];
    let log_rms = rel_rms(&log_pred);
    let pow_rms = power.as_ref().map(|p| {
        let pred = |x: f64| p.coef[0].exp() * x.powf(p.coef[1]);
        rel_rms(&pred)
    });
    let use_power = match pow_rms {
        Some(pr) if pr * MODEL_RATIO <= log_rms => true,
        Some(pr) if log_rms * MODEL_RATIO <= pr => false,
        Some(pr) => pr < log_rms,
        None => false,
    };
    if use_power {
        let p = power.expect("power fit present");
        let rms = pow_rms.expect("power fit present");
        let pred = |x: f64| p.coef[0].exp() * x.powf(p.coef[1]);
        let rr = r2(&pred);
        if rms > MAX_RELATIVE_RMS {
            return Ok(bounded(rms, rr));
        }
        let amp = p.coef[0].exp();
        Ok(FitResult {
            model: FitModel::PowerLaw,
            coefficients: vec![
                Coefficient {
                    name: "amplitude",
                    value: amp,
                    stderr: amp * p.stderr[0],
                },
                Coefficient {
                    name: "exponent",
                    value: p.coef[1],
                    stderr: p.stderr[1],
                },
            ],
            residual_norm: rms,
            r_squared: rr,
        })
    } else {
        let rr = r2(&log_pred);
        if log_rms > MAX_RELATIVE_RMS {
            return Ok(bounded(log_rms, rr));
        }
        Ok(FitResult {
            model: FitModel::LogLaw,
            coefficients: vec![
                Coefficient {
                    name: "log_coefficient",
                    value: log.coef[0],
                    stderr: log.stderr[0],
                },
                Coefficient {
                    name: "offset",
                    value: log.coef[1],
                    stderr: log.stderr[1],
                },
            ],
            residual_norm: log_rms,
            r_squared: rr,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteShift {
    /// `lim_{k→0} k² A(k)`.
    pub f0: f64,
    pub err: f64,
    /// Relative spread `(max − min)/|mean|` of `k² A(k)` over the smallest
    /// decade of the scan.
    pub variation_last_decade: f64,
}

/// Neville's polynomial extrapolation of `(x, y)` to `x = 0`.
fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = x.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        }
    }
    p[0]
}

/// `F(0) = lim k² A(k)` by polynomial extrapolation in `k` through the four
/// smallest-`k` points.
pub fn finite_a_shift(s: &ScanSeries) -> Result<FiniteShift, FitError> {
    s.expect_axis(ScanAxis::KIr)?;
    if let Some(p) = s.params() {
        if !(p.a > 0.0) {
            return Err(FitError::Window("finite a-shift needs a > 0".into()));
        }
    }
    let pts = s.sorted();
    let k: Vec<f64> = pts.iter().map(|p| p.x).collect();
    let f: Vec<f64> = pts.iter().map(|p| p.x * p.x * p.value.re).collect();
    let ferr: Vec<f64> = pts.iter().map(|p| p.x * p.x * p.abs_err).collect();
    let tail = 4;
    let d: Vec<f64> = f[..tail].windows(2).map(|w| w[1] - w[0]).collect();
    let noise = ferr[..tail].iter().fold(0.0, |a: f64, e| a.max(*e));
    let significant: Vec<f64> = d.iter().copied().filter(|x| x.abs() > 10.0 * noise).collect();
    if significant.windows(2).any(|w| w[0].signum() != w[1].signum()) {
        return Err(FitError::Unstable(format!("k²A(k) is not monotone over the last points: {:?}", &f[..tail])));
    }
    let f4 = neville_at_zero(&k[..tail], &f[..tail]);
    let f3 = neville_at_zero(&k[..tail - 1], &f[..tail - 1]);
    // noise amplification of the extrapolation weights
    let weights: f64 = (0..tail)
        .map(|i| {
            let mut e = vec![0.0; tail];
            e[i] = 1.0;
            neville_at_zero(&k[..tail], &e).abs() * ferr[i]
        })
        .sum();
    let kmin = k[0];
    let last: Vec<f64> = k.iter().zip(&f).filter(|(x, _)| **x <= 10.0 * kmin * (1.0 + 1e-9)).map(|(_, v)| *v).collect();
    let (lo, hi) = last.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let mean = last.iter().sum::<f64>() / last.len() as f64;
    Ok(FiniteShift {
        f0: f4,
        err: (f4 - f3).abs() + weights,
        variation_last_decade: (hi - lo) / mean.abs(),
    })
}

/// Least-squares slope of `ln|Re A|` against `ln x`.
pub fn log_log_slope(s: &ScanSeries) -> Result<f64, FitError> {
    let pts = s.sorted();
    let n = pts.len();
    let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { pts[i].x.ln() });
    let y = DVector::from_iterator(n, pts.iter().map(|p| p.value.re.abs().max(f64::MIN_POSITIVE).ln()));
    Ok(least_squares(&x, &y)?.coef[1])
}

/// Log-log slope in `k` below which an amplitude counts as carrying a
/// `1/k²` infrared term.
pub const IR_SLOPE_THRESHOLD: f64 = -1.5;

/// Settings for measuring divergence classes numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableOptions {
    pub params: ModelParams,
    /// External momentum scale of the UV scans.
    pub k_uv: f64,
    pub uv_range: (f64, f64),
    /// Upper end of the Schwinger window in UV scans, `[Λ⁻², alpha_cap]`.
    pub alpha_cap: f64,
    pub ir_range: (f64, f64),
    pub points: usize,
    pub tol: Tolerance,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            params: ModelParams::default().with_a(0.0),
            k_uv: 1.0,
            uv_range: (1e2, 1e4),
            alpha_cap: 1.0,
            ir_range: (1e-3, 1e-1),
            points: MIN_POINTS,
            tol: Tolerance::new(1e-12, 1e-6),
        }
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Scans `g` at template momenta; `cut_at(x)` and `k_at(x)` give the
/// cutoff and external scale at grid value `x`.
fn scan(
    g: &RibbonGraph,
    axis: ScanAxis,
    xs: &[f64],
    opts: &TableOptions,
    cut_at: impl Fn(f64) -> CutoffSpec + Sync,
    k_at: impl Fn(f64) -> f64 + Sync,
) -> Result<ScanSeries, FitError> {
    let eval = EvalOptions {
        tol: opts.tol,
        ..Default::default()
    };
    let samples: Vec<AmplitudeSample> = xs
        .par_iter()
        .map(|&x| {
            let ks = template_momenta(g.n_external(), k_at(x));
            evaluate(g, &ks, &opts.params, &cut_at(x), None, &eval)
        })
        .collect::<Result<_, _>>()?;
    ScanSeries::from_samples(axis, xs, &samples, Some(opts.params))
}

/// UV scan over the Schwinger window `[Λ⁻², alpha_cap]` at fixed external
/// scale.
pub fn uv_scan(g: &RibbonGraph, opts: &TableOptions) -> Result<ScanSeries, FitError> {
    if !(opts.alpha_cap * opts.uv_range.0 * opts.uv_range.0 > 1.0) {
        return Err(FitError::Window(format!(
            "window [Λ⁻², {}] is empty at Λ = {}",
            opts.alpha_cap, opts.uv_range.0
        )));
    }
    let xs = log_grid(opts.uv_range.0, opts.uv_range.1, opts.points);
    let cut = |l: f64| CutoffSpec {
        alpha_max: opts.alpha_cap,
        ..CutoffSpec::uv_schwinger(l)
    };
    scan(g, ScanAxis::LambdaUv, &xs, opts, cut, |_| opts.k_uv)
}

/// IR scan with the slice cutoff `min{k², k⁻²}`.
pub fn ir_scan(g: &RibbonGraph, opts: &TableOptions) -> Result<ScanSeries, FitError> {
    let xs = log_grid(opts.ir_range.0, opts.ir_range.1, opts.points);
    scan(g, ScanAxis::KIr, &xs, opts, CutoffSpec::slice_ir, |k| k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphMeasurement {
    pub name: String,
    pub report: TopologyReport,
    pub predicted: DivergenceClass,
    pub measured: DivergenceClass,
    pub uv: FitResult,
    /// Log-log slope of the IR slice scan, when the UV scan was bounded.
    pub ir_slope: Option<f64>,
}

/// Measured class: UV growth means `ren.`; otherwise an IR `1/k²` term
/// means `finite ren.`; otherwise `convergent`.
pub fn measure_graph(name: &str, g: &RibbonGraph, opts: &TableOptions) -> Result<GraphMeasurement, FitError> {
    let report = topology_report(g)?;
    let uv = fit_uv_divergence(&uv_scan(g, opts)?)?;
    let (measured, ir_slope) = if uv.is_divergent() {
        (DivergenceClass::RenormalizableDivergent, None)
    } else {
        let slope = log_log_slope(&ir_scan(g, opts)?)?;
        let class = if slope < IR_SLOPE_THRESHOLD {
            DivergenceClass::FiniteRenormalization
        } else {
            DivergenceClass::Convergent
        };
        (class, Some(slope))
    };
    Ok(GraphMeasurement {
        name: name.to_string(),
        predicted: divergence_class(&report),
        report,
        measured,
        uv,
        ir_slope,
    })
}

pub const TABLE_ROWS: [GraphClass; 3] = [GraphClass::PlanarRegular, GraphClass::PlanarIrregular, GraphClass::Nonplanar];
pub const TABLE_COLUMNS: [usize; 2] = [2, 4];

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationTable {
    pub rows: Vec<GraphMeasurement>,
    /// Graphs whose measurement failed, with the reason.
    pub failures: Vec<(String, String)>,
}

impl ClassificationTable {
    /// Measured label of a cell: `None` when no catalog graph falls in it,
    /// `"mixed"` when its graphs disagree.
    pub fn cell(&self, class: GraphClass, n_ext: usize) -> Option<&'static str> {
        let labels: Vec<&'static str> = self
            .rows
            .iter()
            .filter(|r| r.report.class == class && r.report.n_ext == n_ext)
            .map(|r| r.measured.table_label())
            .collect();
        let first = *labels.first()?;
        Some(if labels.iter().all(|l| *l == first) { first } else { "mixed" })
    }

    /// The 3×2 matrix, rows planar regular / planar irregular / non-planar,
    /// columns 2-points / 4-points.
    pub fn matrix(&self) -> [[Option<&'static str>; 2]; 3] {
        let mut m = [[None; 2]; 3];
        for (i, row) in TABLE_ROWS.iter().enumerate() {
            for (j, n) in TABLE_COLUMNS.iter().enumerate() {
                m[i][j] = self.cell(*row, *n);
            }
        }
        m
    }

    pub fn mismatches(&self) -> Vec<&GraphMeasurement> {
        self.rows.iter().filter(|r| r.measured != r.predicted).collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.failures.is_empty() && self.mismatches().is_empty()
    }
}

fn row_label(c: GraphClass) -> &'static str {
    match c {
        GraphClass::PlanarRegular => "planar regular",
        GraphClass::PlanarIrregular => "planar irregular",
        GraphClass::Nonplanar => "non-planar",
    }
}

impl fmt::Display for ClassificationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<18} {:<13} {:<13}", "", "2-points", "4-points")?;
        for (i, row) in self.matrix().iter().enumerate() {
            writeln!(
                f,
                "{:<18} {:<13} {:<13}",
                row_label(TABLE_ROWS[i]),
                row[0].unwrap_or("-"),
                row[1].unwrap_or("-")
            )?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "{:<20} {:<17} {:>2} {:<14} {:<14} {:<14} {:>8}  flag",
            "graph", "class", "N", "predicted", "measured", "uv", "ir slope"
        )?;
        for r in &self.rows {
            let slope = r.ir_slope.map_or("-".to_string(), |s| format!("{s:.2}"));
            let flag = if r.measured == r.predicted { "" } else { "MISMATCH" };
            writeln!(
                f,
                "{:<20} {:<17} {:>2} {:<14} {:<14} {:<14} {:>8}  {flag}",
                r.name,
                r.report.class.as_str(),
                r.report.n_ext,
                r.predicted.table_label(),
                r.measured.table_label(),
                r.uv.model.as_str(),
                slope
            )?;
        }
        for (name, why) in &self.failures {
            writeln!(f, "{name:<20} FAILED: {why}")?;
        }
        Ok(())
    }
}

/// Measures every catalog graph and assembles the classification matrix.
/// Failures and mismatches are reported in the table, not returned.
pub fn reproduce_table(catalog: &[GraphCatalogEntry], opts: &TableOptions) -> ClassificationTable {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for entry in catalog {
        match measure_graph(entry.name, &entry.graph, opts) {
            Ok(m) => rows.push(m),
            Err(e) => failures.push((entry.name.to_string(), e.to_string())),
        }
    }
    ClassificationTable { rows, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(axis: ScanAxis, xs: &[f64], f: impl Fn(f64) -> f64) -> ScanSeries {
        let points = xs
            .iter()
            .map(|&x| ScanPoint {
                x,
                value: Complex64::new(f(x), 0.0),
                abs_err: 0.0,
            })
            .collect();
        ScanSeries::new(axis, points, None).unwrap()
    }

    #[test]
    fn rejects_short_or_unsorted_series() {
        let p = |x| ScanPoint {
            x,
            value: Complex64::new(1.0, 0.0),
            abs_err: 0.0,
        };
        assert!(matches!(
            ScanSeries::new(ScanAxis::KIr, (1..5).map(|i| p(i as f64)).collect(), None),
            Err(FitError::TooFewPoints { .. })
        ));
        let mut pts: Vec<_> = (1..10).map(|i| p(i as f64)).collect();
        pts.swap(3, 4);
        assert!(matches!(ScanSeries::new(ScanAxis::KIr, pts, None), Err(FitError::NotMonotone { .. })));
    }

    #[test]
    fn ir_fit_recovers_synthetic_coefficients() {
        let xs = log_grid(1e-3, 1e-1, 20);
        let s = series(ScanAxis::KIr, &xs, |k| 2.5 / (k * k) - 0.3 * (k * k).ln() + 1.0);
        let r = fit_ir_structure(&s).unwrap();
        let c = |n| r.coef(n).unwrap().value;
        assert!((c("c") - 2.5).abs() < 0.025);
        assert!((c("c_prime") + 0.3).abs() < 0.003);
        assert!((c("d0") - 1.0).abs() < 0.01);
        assert!(r.r_squared > 0.999);
    }

    #[test]
    fn degenerate_grid_is_ill_conditioned() {
        let xs: Vec<f64> = (0..10).map(|i| 1e-3 * (1.0 + 1e-12 * i as f64)).collect();
        let s = series(ScanAxis::KIr, &xs, |k| 1.0 / k);
        assert!(fit_ir_structure(&s).is_err());
    }

    #[test]
    fn uv_model_selection() {
        let xs = log_grid(10.0, 1e3, 12);
        let pow = fit_uv_divergence(&series(ScanAxis::LambdaUv, &xs, |l| 3.0 * l * l)).unwrap();
        assert_eq!(pow.model, FitModel::PowerLaw);
        assert!((pow.coef("exponent").unwrap().value - 2.0).abs() < 1e-9);
        let log = fit_uv_divergence(&series(ScanAxis::LambdaUv, &xs, |l| 2.0 * l.ln() + 0.5)).unwrap();
        assert_eq!(log.model, FitModel::LogLaw);
        assert!((log.coef("log_coefficient").unwrap().value - 2.0).abs() < 1e-9);
        let flat = fit_uv_divergence(&series(ScanAxis::LambdaUv, &xs, |l| 7.0 - 1e-3 / l)).unwrap();
        assert_eq!(flat.model, FitModel::BoundedOther);
    }

    #[test]
    fn wrong_axis_rejected() {
        let xs = log_grid(10.0, 1e3, 12);
        let s = series(ScanAxis::LambdaUv, &xs, |l| l);
        assert!(matches!(fit_ir_structure(&s), Err(FitError::WrongAxis { .. })));
    }

    #[test]
    fn finite_shift_extrapolates_linear_tail() {
        let xs = log_grid(1e-3, 1e-1, 12);
        let s = series(ScanAxis::KIr, &xs, |k| (3.0 + 0.1 * k) / (k * k));
        let r = finite_a_shift(&s).unwrap();
        assert!((r.f0 - 3.0).abs() < 0.03);
        assert!(r.variation_last_decade < 0.01);
    }

    #[test]
    fn csv_round_trip_skips_error_rows() {
        let text = "axis,re,im,abs_err,status\n\
                    1,1.0,0,0,ok\n2,2.0,0,0,ok\n3,3,0,0,domain error\n4,4,0,0,ok\n5,5,0,0,ok\n\
                    6,6,0,0,ok\n7,7,0,0,ok\n8,8,0,0,ok\n9,9,0,0,ok\n";
        let s = ScanSeries::read_csv(ScanAxis::LambdaUv, text.as_bytes()).unwrap();
        assert_eq!(s.points().len(), 8);
        assert!(ScanSeries::read_csv(ScanAxis::LambdaUv, "axis,re\n1,2\n".as_bytes()).is_err());
    }
}
