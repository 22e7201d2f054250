//! Numerical evaluation of low-order amplitudes.
//!
//! Every line carries the Schwinger-windowed propagator
//!
//! ```text
//!     g(p) = ∫_{αmin}^{αmax} dα e^{−α (p² + μ² + a/(θ²p²))}
//! ```
//!
//! done in closed form, so a full window reproduces the propagator itself.
//! Amplitudes are reported with the external kernel `Ṽ(k₁,…,k_N)` (delta
//! function and declared-order Moyal phase) factored out, and without
//! coupling constants or symmetry factors.
//!
//! Evaluators:
//!
//! - `bessel1d`: one loop, one loop-dependent line; exact 4D radial Fourier
//!   transform with a Bessel `J₁` kernel.
//! - `reduced3d`: one loop, two loop-dependent lines; hyperspherical
//!   reduction with the azimuthal integral done analytically.
//! - `schwinger_gauss`: `a = 0`, any loop number; the loop momenta are
//!   integrated in closed form (complex Gaussian) and the Schwinger
//!   parameters by nested adaptive quadrature.
//! - `schwinger_mc`: Monte Carlo over Schwinger parameters and loop
//!   momenta, up to two loops; the independent oracle.

pub mod quadrature;

mod bessel;
mod bubble;
mod schwinger;
mod tadpole;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::graph::RibbonGraph;
use crate::multiscale::{window_integral, ModelError, ModelParams};
use crate::rosette::RosetteError;
use crate::vec4::Vec4;

pub use bessel::{j0, j1, j1_zero};
pub use bubble::{bubble, fourpoint_irregular, fourpoint_irregular_with};
pub use quadrature::{Integral, QuadError, Tolerance};
pub use schwinger::{schwinger_gauss, schwinger_gauss_with, schwinger_mc, LoopForm, McOptions};
pub use tadpole::{radial_fourier_4d, tadpole_nonplanar, tadpole_nonplanar_with, tadpole_planar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmplitudeError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("effective sample size collapsed to {ess:.1}")]
    EssCollapse { ess: f64 },
    #[error("graph has {loops} loops; at most {max} supported by this evaluator")]
    TooManyLoops { loops: usize, max: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Rosette(#[from] RosetteError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Bessel1d,
    Reduced3d,
    SchwingerGauss,
    SchwingerMc,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Bessel1d => "bessel1d",
            Method::Reduced3d => "reduced3d",
            Method::SchwingerGauss => "schwinger_gauss",
            Method::SchwingerMc => "schwinger_mc",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "bessel1d" => Some(Method::Bessel1d),
            "reduced3d" => Some(Method::Reduced3d),
            "schwinger_gauss" => Some(Method::SchwingerGauss),
            "schwinger_mc" => Some(Method::SchwingerMc),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Schwinger window `[alpha_min, alpha_max]` applied to every line, plus an
/// optional hard cutoff on the loop momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub p_uv: Option<f64>,
}

impl CutoffSpec {
    pub fn full() -> Self {
        CutoffSpec {
            alpha_min: 0.0,
            alpha_max: f64::INFINITY,
            p_uv: None,
        }
    }

    pub fn window(alpha_min: f64, alpha_max: f64) -> Result<Self, AmplitudeError> {
        let c = CutoffSpec {
            alpha_min,
            alpha_max,
            p_uv: None,
        };
        c.validate()?;
        Ok(c)
    }

    /// `[0, k⁻²]`.
    pub fn tadpole(k: f64) -> Self {
        CutoffSpec {
            alpha_min: 0.0,
            alpha_max: 1.0 / (k * k),
            p_uv: None,
        }
    }

    /// `[0, min(k², k⁻²)]`.
    pub fn slice_ir(k: f64) -> Self {
        let k2 = k * k;
        CutoffSpec {
            alpha_min: 0.0,
            alpha_max: k2.min(1.0 / k2),
            p_uv: None,
        }
    }

    /// Smooth ultraviolet regulator `[Λ⁻², ∞)`.
    pub fn uv_schwinger(lambda: f64) -> Self {
        CutoffSpec {
            alpha_min: 1.0 / (lambda * lambda),
            alpha_max: f64::INFINITY,
            p_uv: None,
        }
    }

    /// Hard loop-momentum cutoff `|p| ≤ Λ` with the full window.
    pub fn hard(lambda: f64) -> Self {
        CutoffSpec {
            p_uv: Some(lambda),
            ..Self::full()
        }
    }

    pub fn with_p_uv(mut self, lambda: f64) -> Self {
        self.p_uv = Some(lambda);
        self
    }

    pub fn validate(&self) -> Result<(), AmplitudeError> {
        if !(self.alpha_min >= 0.0 && self.alpha_min < self.alpha_max) || self.alpha_min.is_nan() {
            return Err(AmplitudeError::Domain(format!(
                "Schwinger window [{}, {}] must satisfy 0 ≤ αmin < αmax",
                self.alpha_min, self.alpha_max
            )));
        }
        if let Some(l) = self.p_uv {
            if !(l > 0.0) {
                return Err(AmplitudeError::Domain(format!("momentum cutoff {l} must be > 0")));
            }
        }
        Ok(())
    }

    /// Momentum scales where the line weight changes character; used as
    /// quadrature breakpoints.
    pub(crate) fn scales(&self, params: &ModelParams) -> Vec<f64> {
        let mut s = Vec::new();
        if self.alpha_max.is_finite() {
            s.push(self.alpha_max.sqrt().recip());
        }
        if self.alpha_min > 0.0 {
            s.push(self.alpha_min.sqrt().recip());
        }
        if params.a > 0.0 {
            s.push((params.a / (params.theta * params.theta)).powf(0.25));
        }
        if params.mu2 > 0.0 {
            s.push(params.mu2.sqrt());
        }
        s.retain(|x| x.is_finite() && *x > 0.0);
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }
}

/// Windowed propagator of one line at `|p|² = p2`.
pub fn line_weight(p2: f64, params: &ModelParams, cut: &CutoffSpec) -> f64 {
    let d = if p2 > 0.0 {
        let ir = if params.a > 0.0 {
            params.a / (params.theta * params.theta * p2)
        } else {
            0.0
        };
        p2 + params.mu2 + ir
    } else if params.a > 0.0 {
        return 0.0;
    } else {
        params.mu2
    };
    window_integral(d, cut.alpha_min, cut.alpha_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSample {
    /// Magnitude of the scan variable (external momentum scale).
    pub k: f64,
    pub externals: Vec<Vec4>,
    pub value: Complex64,
    pub abs_err: f64,
    pub method: Method,
    /// Effective sample size, Monte Carlo only.
    pub ess: Option<f64>,
}

impl AmplitudeSample {
    /// Distance between two samples in units of their combined error.
    pub fn sigma_distance(&self, other: &AmplitudeSample) -> f64 {
        let d = (self.value - other.value).norm();
        let s = (self.abs_err.powi(2) + other.abs_err.powi(2)).sqrt();
        if s == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / s
        }
    }
}

/// Conserving external momenta at overall scale `k`. Four legs use
/// `k₁ = k₃ = (k/2) e₂`, `k₂ = k e₀ − k₁`, `k₄ = −k e₀ − k₁`, so that
/// `k₁ + k₂ = k e₀`; other N use pairs `±k e_{i mod 4}`.
pub fn template_momenta(n_ext: usize, k: f64) -> Vec<Vec4> {
    if n_ext == 4 {
        let a = Vec4::axis(2) * (0.5 * k);
        let big = Vec4::axis(0) * k;
        return vec![a, big - a, a, -big - a];
    }
    (0..n_ext)
        .map(|i| {
            let e = Vec4::axis((i / 2) % 4) * k;
            if i % 2 == 0 {
                e
            } else {
                -e
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub tol: Tolerance,
    pub mc: McOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tol: Tolerance::default(),
            mc: McOptions::default(),
        }
    }
}

/// Picks the cheapest applicable evaluator when `method` is `None`.
pub fn choose_method(form: &LoopForm, params: &ModelParams) -> Result<Method, AmplitudeError> {
    match (form.n_loops(), form.loop_dependent_lines().len()) {
        (1, 1) => Ok(Method::Bessel1d),
        (1, 2) => Ok(Method::Reduced3d),
        _ if params.a == 0.0 => Ok(Method::SchwingerGauss),
        (m, _) if m <= 2 => Ok(Method::SchwingerMc),
        (m, _) => Err(AmplitudeError::TooManyLoops { loops: m, max: 2 }),
    }
}

/// Evaluates the amplitude of `g` at the given external momenta.
pub fn evaluate(
    g: &RibbonGraph,
    externals: &[Vec4],
    params: &ModelParams,
    cut: &CutoffSpec,
    method: Option<Method>,
    opts: &EvalOptions,
) -> Result<AmplitudeSample, AmplitudeError> {
    params.validate()?;
    cut.validate()?;
    let form = LoopForm::new(g, externals, params.theta)?;
    let method = match method {
        Some(m) => m,
        None => choose_method(&form, params)?,
    };
    let k = externals.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let (value, abs_err, ess) = match method {
        Method::Bessel1d => {
            let r = form.one_loop_radial(params, cut, &opts.tol)?;
            (r.value, r.abs_err, None)
        }
        Method::Reduced3d => {
            let r = form.one_loop_bubble(params, cut, &opts.tol)?;
            (r.value, r.abs_err, None)
        }
        Method::SchwingerGauss => {
            let r = schwinger::gauss_form(&form, params, cut, &opts.tol)?;
            (r.value, r.abs_err, None)
        }
        Method::SchwingerMc => {
            let s = schwinger::mc_form(&form, params, cut, &opts.mc)?;
            (s.value, s.abs_err, s.ess)
        }
    };
    Ok(AmplitudeSample {
        k,
        externals: externals.to_vec(),
        value,
        abs_err,
        method,
        ess,
    })
}
