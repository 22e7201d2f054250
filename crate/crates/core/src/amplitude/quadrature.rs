//! Adaptive Gauss–Kronrod quadrature, Wynn's epsilon extrapolation and
//! panel summation for oscillatory tails.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Values that can be integrated: reals and complex numbers.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn modulus(&self) -> f64;
    fn recip(&self) -> Self;
    fn is_finite(&self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
    fn recip(&self) -> Self {
        self.inv()
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A value paired with the error already accumulated by an inner
/// integration. Integrating it carries the inner error through linearly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValErr {
    pub value: Complex64,
    pub err: f64,
}

impl ValErr {
    pub fn new(value: Complex64, err: f64) -> Self {
        ValErr { value, err }
    }
}

impl Add for ValErr {
    type Output = ValErr;
    fn add(self, o: ValErr) -> ValErr {
        ValErr::new(self.value + o.value, self.err + o.err)
    }
}

impl Sub for ValErr {
    type Output = ValErr;
    fn sub(self, o: ValErr) -> ValErr {
        ValErr::new(self.value - o.value, self.err + o.err)
    }
}

impl Mul<f64> for ValErr {
    type Output = ValErr;
    fn mul(self, s: f64) -> ValErr {
        ValErr::new(self.value * s, self.err * s.abs())
    }
}

impl Scalar for ValErr {
    fn zero() -> Self {
        ValErr::new(Complex64::new(0.0, 0.0), 0.0)
    }
    fn modulus(&self) -> f64 {
        self.value.norm()
    }
    fn recip(&self) -> Self {
        ValErr::new(self.value.inv(), 0.0)
    }
    fn is_finite(&self) -> bool {
        self.value.re.is_finite() && self.value.im.is_finite() && self.err.is_finite()
    }
}

impl Partial for ValErr {
    fn parts(&self) -> (f64, f64) {
        (self.value.re, self.value.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_err: f64,
    pub evaluations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge: {reason} (partial value {partial_re:.6e}{partial_im:+.6e}i, error {abs_err:.3e})")]
    NoConvergence {
        reason: String,
        partial_re: f64,
        partial_im: f64,
        abs_err: f64,
    },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
}

/// Marker for partial results of either scalar type.
pub trait Partial {
    fn parts(&self) -> (f64, f64);
}

impl Partial for f64 {
    fn parts(&self) -> (f64, f64) {
        (*self, 0.0)
    }
}

impl Partial for Complex64 {
    fn parts(&self) -> (f64, f64) {
        (self.re, self.im)
    }
}

fn no_convergence<T: Partial>(reason: &str, value: T, abs_err: f64) -> QuadError {
    let (partial_re, partial_im) = value.parts();
    QuadError::NoConvergence {
        reason: reason.to_string(),
        partial_re,
        partial_im,
        abs_err,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-8,
            max_intervals: 2000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value)
    }
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077715294985326,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
// Gauss weights for the odd-indexed Kronrod nodes
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651146,
];

/// One 21-point Kronrod rule with its embedded 10-point Gauss rule.
pub fn gk21<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Result<(T, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite(c));
    }
    let mut kron = fc * WGK[10];
    let mut gauss = T::zero();
    let mut vals = [(T::zero(), T::zero()); 10];
    for (j, v) in vals.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        if !f1.is_finite() {
            return Err(QuadError::NonFinite(c - dx));
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite(c + dx));
        }
        kron = kron + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
        *v = (f1, f2);
    }
    let mean = kron * 0.5;
    let mut asc = WGK[10] * (fc - mean).modulus();
    for (j, (f1, f2)) in vals.iter().enumerate() {
        asc += WGK[j] * ((*f1 - mean).modulus() + (*f2 - mean).modulus());
    }
    let result = kron * h;
    let resasc = asc * h.abs();
    let mut err = ((kron - gauss) * h).modulus();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * result.modulus();
    Ok((result, err.max(floor)))
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

/// Globally adaptive GK21 on `[a, b]` with interior breakpoints.
pub fn integrate<T: Scalar + Partial, F: Fn(f64) -> T>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: &Tolerance,
) -> Result<Integral<T>, QuadError> {
    let mut cuts = vec![a];
    let mut bps: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    bps.sort_by(f64::total_cmp);
    cuts.extend(bps);
    cuts.push(b);
    cuts.dedup();

    let mut segs: Vec<Segment<T>> = Vec::new();
    for w in cuts.windows(2) {
        let (value, err) = gk21(f, w[0], w[1])?;
        segs.push(Segment { a: w[0], b: w[1], value, err });
    }
    let mut evaluations = 21 * segs.len();
    loop {
        let total = segs.iter().fold(T::zero(), |s, g| s + g.value);
        let err: f64 = segs.iter().map(|g| g.err).sum();
        if err <= tol.target(total.modulus()) {
            return Ok(Integral {
                value: total,
                abs_err: err,
                evaluations,
            });
        }
        if segs.len() >= tol.max_intervals {
            return Err(no_convergence("interval limit reached", total, err));
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("nonempty");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            let total = segs.iter().fold(s.value, |acc, g| acc + g.value);
            return Err(no_convergence("interval too small to bisect", total, err));
        }
        let (v1, e1) = gk21(f, s.a, mid)?;
        let (v2, e2) = gk21(f, mid, s.b)?;
        evaluations += 42;
        segs.push(Segment { a: s.a, b: mid, value: v1, err: e1 });
        segs.push(Segment { a: mid, b: s.b, value: v2, err: e2 });
    }
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums; returns
/// the extrapolated limit and an error estimate from the last two
/// extrapolants.
pub fn wynn_epsilon<T: Scalar>(sums: &[T]) -> Option<(T, f64)> {
    let n = sums.len();
    if n < 3 {
        return None;
    }
    // eps[k][j] with eps_{-1} = 0 and eps_0 = sums
    let mut prev: Vec<T> = vec![T::zero(); n + 1];
    let mut cur: Vec<T> = sums.to_vec();
    let mut estimates: Vec<T> = Vec::new();
    let mut k = 0;
    'table: while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d.modulus() == 0.0 || !d.is_finite() {
                // table breaks down; keep what the earlier columns gave
                if k % 2 == 0 && estimates.is_empty() {
                    return Some((cur[cur.len() - 1], 0.0));
                }
                break 'table;
            }
            next.push(prev[j + 1] + d.recip());
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(last) = cur.last() {
                estimates.push(*last);
            }
        }
    }
    match estimates.len() {
        0 => None,
        1 => Some((estimates[0], (estimates[0] - sums[n - 1]).modulus())),
        m => {
            let best = estimates[m - 1];
            let err = (best - estimates[m - 2]).modulus();
            Some((best, err))
        }
    }
}

/// Integrates over `[start, ∞)` (or up to `stop`) panel by panel; panel
/// `i` ends at `panel_end(i)`. Partial sums are accelerated with Wynn's
/// epsilon algorithm, which handles alternating oscillatory tails. Tail
/// tests only start once every breakpoint has been passed.
pub fn integrate_panels<T: Scalar + Partial, F: Fn(f64) -> T>(
    f: &F,
    start: f64,
    stop: f64,
    breakpoints: &[f64],
    mut panel_end: impl FnMut(usize) -> f64,
    tol: &Tolerance,
    max_panels: usize,
) -> Result<Integral<T>, QuadError> {
    let mut sums: Vec<T> = Vec::new();
    let mut total = T::zero();
    let mut quad_err = 0.0;
    let mut evaluations = 0;
    let mut lo = start;
    let mut last_extrapolant: Option<T> = None;
    let mut small_run = 0;
    let panel_tol = Tolerance {
        abs: tol.abs * 0.01,
        ..*tol
    };
    let settle = breakpoints.iter().copied().filter(|x| x.is_finite()).fold(start, f64::max);
    for i in 0..max_panels {
        let hi = panel_end(i).min(stop);
        if hi <= lo {
            continue;
        }
        let piece = integrate(f, lo, hi, breakpoints, &panel_tol)?;
        evaluations += piece.evaluations;
        total = total + piece.value;
        quad_err += piece.abs_err;
        sums.push(total);
        lo = hi;
        if hi >= stop {
            return Ok(Integral {
                value: total,
                abs_err: quad_err,
                evaluations,
            });
        }

        if lo < settle {
            continue;
        }
        // plain convergence: the tail contributes nothing measurable
        if piece.value.modulus() <= tol.target(total.modulus()) * 1e-2 {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 4 {
            return Ok(Integral {
                value: total,
                abs_err: quad_err + piece.value.modulus() * 4.0,
                evaluations,
            });
        }

        if sums.len() >= 8 {
            let window = &sums[sums.len().saturating_sub(40)..];
            if let Some((est, ext_err)) = wynn_epsilon(window) {
                if let Some(prev) = last_extrapolant {
                    let change = (est - prev).modulus();
                    let err = ext_err.max(change);
                    if err <= tol.target(est.modulus()) {
                        return Ok(Integral {
                            value: est,
                            abs_err: err + quad_err,
                            evaluations,
                        });
                    }
                }
                last_extrapolant = Some(est);
            }
        }
    }
    let (value, err) = wynn_epsilon(&sums[sums.len().saturating_sub(40)..]).unwrap_or((total, f64::INFINITY));
    Err(no_convergence("panel limit reached", value, err + quad_err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(&|x: f64| x.powi(7) - 3.0 * x * x, 0.0, 2.0, &[], &Tolerance::default()).unwrap();
        assert!((r.value - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &[], &Tolerance::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
        assert!(r.abs_err >= (r.value - 2.0).abs());
    }

    #[test]
    fn complex_integrand() {
        let r = integrate(&|x: f64| Complex64::from_polar(1.0, x), 0.0, PI, &[], &Tolerance::default()).unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // partial sums of ln 2 = 1 − 1/2 + 1/3 − …
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=15)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let (v, _) = wynn_epsilon(&sums).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_tail() {
        // ∫₀^∞ sin x / x dx = π/2
        let f = |x: f64| if x == 0.0 { 1.0 } else { x.sin() / x };
        let r = integrate_panels(&f, 0.0, f64::INFINITY, &[], |i| (i + 1) as f64 * PI, &Tolerance::default(), 500)
            .unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-8, "{}", r.value);
    }
}
