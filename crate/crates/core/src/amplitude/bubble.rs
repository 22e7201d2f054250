//! One-loop integrals with two loop-dependent lines.
//!
//! `∫ d⁴ℓ g(|ℓ|) g(|ℓ+K|) e^{iℓ·u}` in hyperspherical coordinates around
//! `K̂`: `ℓ = P (cos χ K̂ + sin χ n̂)` with `n̂` on the two-sphere orthogonal
//! to `K̂`. Writing `u = w∥ K̂ + w⊥ ê`, the two-sphere average of
//! `e^{iPw⊥ sin χ n̂·ê}` is `sinc(Pw⊥ sin χ)`, leaving
//!
//! ```text
//!     4π ∫₀^π dχ sin²χ ∫₀^∞ dP P³ g(P) g(|ℓ+K|) e^{iPw∥ cos χ} sinc(Pw⊥ sin χ)
//! ```
//!
//! The radial integral is done innermost, panel by panel at the local
//! oscillation period.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::{integrate, integrate_panels, Integral, Tolerance, ValErr};
use super::{line_weight, AmplitudeError, AmplitudeSample, CutoffSpec, Method};
use crate::multiscale::ModelParams;
use crate::vec4::{ThetaMatrix, Vec4};

const MAX_PANELS: usize = 100_000;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// End of radial panel `i`: geometric growth past the largest feature `top`
/// until the oscillation period `period` is reached, then uniform steps.
fn panel_end(i: usize, top: f64, period: Option<f64>) -> f64 {
    match period {
        Some(d) if d <= top => (i + 1) as f64 * d,
        Some(d) => {
            let j0 = (d / top).log2().ceil().max(0.0) as usize;
            if i < j0 {
                top * 2f64.powi(i as i32 + 1)
            } else {
                top * 2f64.powi(j0 as i32) + (i - j0 + 1) as f64 * d
            }
        }
        None => top * 2f64.powi(i as i32 + 1),
    }
}

/// `∫ d⁴ℓ g(|ℓ|) g(|ℓ+K|) e^{iℓ·u}` for `|K| = k` and `u = w∥ K̂ + w⊥ ê`.
pub fn bubble(
    k: f64,
    w_par: f64,
    w_perp: f64,
    params: &ModelParams,
    cut: &CutoffSpec,
    tol: &Tolerance,
) -> Result<Integral<Complex64>, AmplitudeError> {
    if !(k >= 0.0 && w_perp >= 0.0 && k.is_finite() && w_par.is_finite() && w_perp.is_finite()) {
        return Err(AmplitudeError::Domain(format!("bad bubble kinematics k={k} w∥={w_par} w⊥={w_perp}")));
    }
    let stop = cut.p_uv.unwrap_or(f64::INFINITY);
    let scales = cut.scales(params);
    let feature = scales.iter().copied().fold(1.0, f64::max);
    let failure: RefCell<Option<AmplitudeError>> = RefCell::new(None);

    let radial = |chi: f64| -> ValErr {
        let zero = ValErr::new(Complex64::new(0.0, 0.0), 0.0);
        if failure.borrow().is_some() {
            return zero;
        }
        let (s, c) = chi.sin_cos();
        let f = |p: f64| -> Complex64 {
            let q2 = (p * p + 2.0 * p * k * c + k * k).max(0.0);
            let w = p * p * p * line_weight(p * p, params, cut) * line_weight(q2, params, cut);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::from_polar(w * sinc(p * w_perp * s), p * w_par * c)
        };
        let closest = (-k * c).max(0.0);
        let mut hints: Vec<f64> = scales.clone();
        hints.push(k);
        hints.push(closest);
        for sc in &scales {
            hints.push(closest + sc);
            hints.push((closest - sc).max(0.0));
        }
        hints.retain(|h| *h > 0.0 && h.is_finite());
        let top = hints.iter().copied().fold(feature, f64::max);
        let omega = (w_par * c).abs() + w_perp * s;
        let period = (omega > 0.0).then(|| PI / omega);
        match integrate_panels(&f, 0.0, stop, &hints, |i| panel_end(i, top, period), tol, MAX_PANELS) {
            Ok(r) => ValErr::new(r.value * (s * s), r.abs_err * s * s),
            Err(e) => {
                *failure.borrow_mut() = Some(e.into());
                zero
            }
        }
    };

    let mut breaks = vec![0.5 * PI];
    if k > 0.0 {
        for sc in scales.iter().chain(std::iter::once(&1.0)) {
            for mult in [0.5, 1.0, 2.0] {
                let d = mult * sc / k;
                if d < 0.5 * PI {
                    breaks.push(PI - d);
                }
            }
        }
    }
    let outer = integrate(&radial, 0.0, PI, &breaks, tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let norm = 4.0 * PI;
    Ok(Integral {
        value: outer.value.value * norm,
        abs_err: (outer.abs_err + outer.value.err) * norm,
        evaluations: outer.evaluations,
    })
}

/// Four-point graph with two broken faces: `∫ d⁴p g(p) g(p+K) e^{ip∧K}`
/// with `K = k₁ + k₂`. Depends on `K` only through `|K|` and `θ|K|`.
pub fn fourpoint_irregular(k: &Vec4, params: &ModelParams, cut: &CutoffSpec) -> Result<AmplitudeSample, AmplitudeError> {
    fourpoint_irregular_with(k, params, cut, &Tolerance::default())
}

pub fn fourpoint_irregular_with(
    k: &Vec4,
    params: &ModelParams,
    cut: &CutoffSpec,
    tol: &Tolerance,
) -> Result<AmplitudeSample, AmplitudeError> {
    params.validate()?;
    cut.validate()?;
    let kn = k.norm();
    if kn == 0.0 && params.a == 0.0 && params.mu2 == 0.0 && cut.alpha_max.is_infinite() {
        return Err(AmplitudeError::Domain("massless bubble at K = 0 is infrared divergent".into()));
    }
    let w = ThetaMatrix::new(params.theta).apply(k).norm();
    let r = bubble(kn, 0.0, w, params, cut, tol)?;
    Ok(AmplitudeSample {
        k: kn,
        externals: vec![*k],
        value: r.value,
        abs_err: r.abs_err,
        method: Method::Reduced3d,
        ess: None,
    })
}
