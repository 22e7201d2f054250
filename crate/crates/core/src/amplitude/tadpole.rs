//! Radial Fourier transforms in four dimensions and the one-loop tadpoles.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel::{j1, j1_zero};
use super::quadrature::{integrate_panels, Integral, QuadError, Tolerance};
use super::{line_weight, AmplitudeError, AmplitudeSample, CutoffSpec, Method};
use crate::multiscale::ModelParams;
use crate::vec4::Vec4;

const MAX_PANELS: usize = 200_000;

/// `∫_{|p|≤Λ} d⁴p e^{iq·p} f(|p|)` for radial `f`:
/// `(4π²/q) ∫ p² J₁(pq) f(p) dp`, or `2π² ∫ p³ f(p) dp` at `q = 0`.
///
/// The radial integral is split into panels between consecutive zeros of
/// `J₁(pq)`; infinite tails are summed with epsilon extrapolation. `hints`
/// are extra breakpoints where `f` changes scale.
pub fn radial_fourier_4d<F: Fn(f64) -> f64>(
    f: F,
    q: f64,
    p_uv: Option<f64>,
    hints: &[f64],
    tol: &Tolerance,
) -> Result<Integral<f64>, QuadError> {
    let stop = p_uv.unwrap_or(f64::INFINITY);
    let mut bps: Vec<f64> = hints.iter().copied().filter(|h| h.is_finite() && *h > 0.0).collect();
    bps.sort_by(f64::total_cmp);
    let r = if q == 0.0 {
        let top = bps.last().copied().unwrap_or(1.0);
        let g = |p: f64| p * p * p * f(p);
        let ends = |i: usize| {
            if i < bps.len() {
                bps[i]
            } else {
                top * 2f64.powi((i - bps.len() + 1) as i32)
            }
        };
        let r = integrate_panels(&g, 0.0, stop, &bps, ends, tol, 300)?;
        Integral {
            value: 2.0 * PI * PI * r.value,
            abs_err: 2.0 * PI * PI * r.abs_err,
            ..r
        }
    } else {
        let g = |p: f64| p * p * j1(p * q) * f(p);
        let r = integrate_panels(&g, 0.0, stop, &bps, |i| j1_zero(i + 1) / q, tol, MAX_PANELS)?;
        let c = 4.0 * PI * PI / q;
        Integral {
            value: c * r.value,
            abs_err: c * r.abs_err,
            ..r
        }
    };
    Ok(r)
}

/// Non-planar tadpole `∫ d⁴p e^{i p∧k} g(p)` with the windowed propagator
/// `g`; depends on `k` only through `θ|k|`.
pub fn tadpole_nonplanar(k: &Vec4, params: &ModelParams, cut: &CutoffSpec) -> Result<AmplitudeSample, AmplitudeError> {
    tadpole_nonplanar_with(k, params, cut, &Tolerance::default())
}

pub fn tadpole_nonplanar_with(
    k: &Vec4,
    params: &ModelParams,
    cut: &CutoffSpec,
    tol: &Tolerance,
) -> Result<AmplitudeSample, AmplitudeError> {
    params.validate()?;
    cut.validate()?;
    let kn = k.norm();
    if kn == 0.0 || !kn.is_finite() {
        return Err(AmplitudeError::Domain("non-planar tadpole needs k ≠ 0".into()));
    }
    let q = params.theta * kn;
    let mut hints = cut.scales(params);
    hints.push(1.0 / q);
    let r = radial_fourier_4d(|p| line_weight(p * p, params, cut), q, cut.p_uv, &hints, tol)?;
    Ok(AmplitudeSample {
        k: kn,
        externals: vec![*k, -*k],
        value: Complex64::new(r.value, 0.0),
        abs_err: r.abs_err,
        method: Method::Bessel1d,
        ess: None,
    })
}

/// Planar tadpole `∫_{|p|≤Λ} d⁴p C(p)`; independent of the external
/// momentum.
pub fn tadpole_planar(params: &ModelParams, p_uv: f64) -> Result<AmplitudeSample, AmplitudeError> {
    params.validate()?;
    if !(p_uv > 0.0) {
        return Err(AmplitudeError::Domain(format!("momentum cutoff {p_uv} must be > 0")));
    }
    let cut = CutoffSpec::hard(p_uv);
    let hints = cut.scales(params);
    let r = radial_fourier_4d(|p| line_weight(p * p, params, &cut), 0.0, Some(p_uv), &hints, &Tolerance::default())?;
    Ok(AmplitudeSample {
        k: 0.0,
        externals: vec![Vec4::ZERO, Vec4::ZERO],
        value: Complex64::new(r.value, 0.0),
        abs_err: r.abs_err,
        method: Method::Bessel1d,
        ess: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_transform() {
        let tol = Tolerance::default();
        for alpha in [0.3f64, 1.0, 4.0] {
            let r = radial_fourier_4d(|p| (-alpha * p * p).exp(), 0.0, None, &[alpha.sqrt().recip()], &tol).unwrap();
            let want = PI * PI / (alpha * alpha);
            assert!((r.value - want).abs() < 1e-8 * want);
            for q in [0.5, 2.0, 7.0] {
                let r = radial_fourier_4d(|p| (-alpha * p * p).exp(), q, None, &[], &tol).unwrap();
                let want = PI * PI / (alpha * alpha) * (-q * q / (4.0 * alpha)).exp();
                assert!((r.value - want).abs() < 1e-8 * want.max(1e-4), "α={alpha} q={q}: {} vs {want}", r.value);
            }
        }
    }

    #[test]
    fn massive_planar_tadpole_closed_form() {
        let params = ModelParams::default().with_a(0.0);
        for lambda in [0.5, 3.0, 40.0] {
            let t = tadpole_planar(&params, lambda).unwrap();
            let want = PI * PI * (lambda * lambda - (1.0 + lambda * lambda).ln());
            assert!((t.value.re - want).abs() < 1e-8 * want, "{lambda}");
        }
    }

    #[test]
    fn planar_tadpole_vanishes_at_small_cutoff() {
        let p = ModelParams::default();
        let small = tadpole_planar(&p, 1e-3).unwrap().value.re;
        assert!(small > 0.0 && small < 1e-15);
    }

    #[test]
    fn massive_tadpole_bound() {
        let params = ModelParams::default().with_a(0.0);
        let k = Vec4::axis(0) * 3.0;
        let t = tadpole_nonplanar(&k, &params, &CutoffSpec::tadpole(3.0)).unwrap();
        assert!(t.value.re.abs() < PI * PI);
        // closed form: π² ∫₀^{1/9} dα α⁻² e^{−9/(4α) − α}
        let f = |a: f64| (-9.0 / (4.0 * a) - a).exp() / (a * a);
        let want = PI * PI
            * super::super::quadrature::integrate(&f, 0.0, 1.0 / 9.0, &[], &Tolerance::default())
                .unwrap()
                .value;
        assert!((t.value.re - want).abs() <= 1e-7 * want + 3.0 * t.abs_err);
    }

    #[test]
    fn rejects_zero_momentum() {
        let r = tadpole_nonplanar(&Vec4::ZERO, &ModelParams::default(), &CutoffSpec::full());
        assert!(matches!(r, Err(AmplitudeError::Domain(_))));
    }
}
