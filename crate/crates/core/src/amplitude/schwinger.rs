//! Schwinger-parametric evaluation.
//!
//! After routing along a spanning tree every line carries
//! `p_e = Σ_j L_ej ℓ_j + P_e` and the rosette phase is
//!
//! ```text
//!     ½ Σ_ij C_ij ℓ_i ∧ ℓ_j + Σ_j u_j · ℓ_j + φ₀
//! ```
//!
//! With `α`-parameters the loop-momentum integrand is the Gaussian
//! `exp(−ℓᵀSℓ + Jᵀℓ − c)` where `S = A⊗1 − (i/2) C⊗Θ`, `J = −2b + iu`,
//! `A = Σ α_e L_e L_eᵀ`, `b = Σ α_e L_e P_e` and `c = Σ α_e P_e²`.
//! Because `Θ` has eigenvalues `±iθ`, `det S = det(A + θC/2)⁴`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::bubble::bubble;
use super::quadrature::{integrate, Integral, Tolerance, ValErr};
use super::tadpole::radial_fourier_4d;
use super::{line_weight, AmplitudeError, AmplitudeSample, CutoffSpec, Method};
use crate::graph::RibbonGraph;
use crate::multiscale::{ModelParams, MomentumRouting};
use crate::rosette::{contract_to_rosette, intersection_matrix, kernel_reordering_angle, spanning_tree};
use crate::vec4::{ThetaMatrix, Vec4};

const CHUNK: usize = 4096;
const MIN_ESS: f64 = 50.0;
const MAX_GAUSS_LOOPS: usize = 4;

/// The routed momenta and rosette phase of a graph at fixed external
/// momenta, as a function of the loop momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopForm {
    n_loops: usize,
    loop_coeff: Vec<Vec<f64>>,
    fixed: Vec<Vec4>,
    crossing: Vec<f64>,
    u: Vec<Vec4>,
    const_angle: f64,
    theta: ThetaMatrix,
}

impl LoopForm {
    pub fn new(g: &RibbonGraph, externals: &[Vec4], theta: f64) -> Result<LoopForm, AmplitudeError> {
        let th = ThetaMatrix::new(theta);
        let tree = spanning_tree(g, None);
        let routing = MomentumRouting::new(g, &tree);
        let m = routing.n_loops();
        let fixed = routing.route(&vec![Vec4::ZERO; m], externals)?.edges;
        let rosette = contract_to_rosette(g, &tree);
        let im = intersection_matrix(&rosette);
        let index: Vec<usize> = rosette
            .loops()
            .iter()
            .map(|l| routing.loop_lines.iter().position(|&e| e == l.edge).expect("loop line"))
            .collect();
        let mut crossing = vec![0.0; m * m];
        let mut u = vec![Vec4::ZERO; m];
        for (a, la) in rosette.loops().iter().enumerate() {
            let ja = index[a];
            for (b, lb) in rosette.loops().iter().enumerate().skip(a + 1) {
                let jb = index[b];
                let c = im.get(a, b) as f64 * la.orientation * lb.orientation;
                crossing[ja * m + jb] += c;
                crossing[jb * m + ja] -= c;
            }
            for (x, k) in externals.iter().enumerate() {
                let c = im.get(a, m + x) as f64;
                if c != 0.0 {
                    u[ja] += th.apply(k) * (c * la.orientation);
                }
            }
        }
        Ok(LoopForm {
            n_loops: m,
            loop_coeff: routing.loop_coeff,
            fixed,
            crossing,
            u,
            const_angle: kernel_reordering_angle(&rosette, externals, &th),
            theta: th,
        })
    }

    pub fn n_loops(&self) -> usize {
        self.n_loops
    }

    pub fn n_lines(&self) -> usize {
        self.fixed.len()
    }

    /// Lines whose momentum depends on some loop momentum.
    pub fn loop_dependent_lines(&self) -> Vec<usize> {
        (0..self.n_lines())
            .filter(|&e| self.loop_coeff[e].iter().any(|c| *c != 0.0))
            .collect()
    }

    /// Lines carrying a fixed combination of external momenta.
    pub fn bridge_lines(&self) -> Vec<usize> {
        (0..self.n_lines())
            .filter(|&e| self.loop_coeff[e].iter().all(|c| *c == 0.0))
            .collect()
    }

    pub fn loop_coefficients(&self, e: usize) -> &[f64] {
        &self.loop_coeff[e]
    }

    pub fn fixed_momentum(&self, e: usize) -> Vec4 {
        self.fixed[e]
    }

    /// `C_ij`, antisymmetric.
    pub fn crossing(&self, i: usize, j: usize) -> f64 {
        self.crossing[i * self.n_loops + j]
    }

    /// Coefficient `u_j` of the phase linear in `ℓ_j`.
    pub fn phase_vector(&self, j: usize) -> Vec4 {
        self.u[j]
    }

    /// Phase of the word-ordered external kernel relative to the declared
    /// order.
    pub fn constant_angle(&self) -> f64 {
        self.const_angle
    }

    pub fn line_momentum(&self, e: usize, loops: &[Vec4]) -> Vec4 {
        let mut p = self.fixed[e];
        for (c, l) in self.loop_coeff[e].iter().zip(loops) {
            if *c != 0.0 {
                p += *l * *c;
            }
        }
        p
    }

    pub fn phase_angle(&self, loops: &[Vec4]) -> f64 {
        let m = self.n_loops;
        let mut angle = self.const_angle;
        for i in 0..m {
            angle += self.u[i].dot(&loops[i]);
            for j in (i + 1)..m {
                let c = self.crossing(i, j);
                if c != 0.0 {
                    angle += c * self.theta.wedge(&loops[i], &loops[j]);
                }
            }
        }
        angle
    }

    fn bridge_factor(&self, params: &ModelParams, cut: &CutoffSpec) -> f64 {
        self.bridge_lines()
            .into_iter()
            .map(|e| line_weight(self.fixed[e].norm2(), params, cut))
            .product()
    }

    fn tree_level(&self, params: &ModelParams, cut: &CutoffSpec) -> Integral<Complex64> {
        Integral {
            value: Complex64::from_polar(self.bridge_factor(params, cut), self.const_angle),
            abs_err: 0.0,
            evaluations: 0,
        }
    }

    fn unit_coefficient(&self, e: usize) -> Result<f64, AmplitudeError> {
        let c = self.loop_coeff[e][0];
        if c.abs() != 1.0 {
            return Err(AmplitudeError::Unsupported(format!("loop coefficient {c} on line {e}")));
        }
        Ok(c)
    }

    /// One loop through a single line: an exact radial Fourier transform.
    pub fn one_loop_radial(
        &self,
        params: &ModelParams,
        cut: &CutoffSpec,
        tol: &Tolerance,
    ) -> Result<Integral<Complex64>, AmplitudeError> {
        let dep = self.loop_dependent_lines();
        if self.n_loops != 1 || dep.len() != 1 {
            return Err(AmplitudeError::Unsupported(
                "bessel1d needs one loop through a single line".into(),
            ));
        }
        let e = dep[0];
        let c = self.unit_coefficient(e)?;
        let u = self.u[0];
        let q = u.norm();
        let mut hints = cut.scales(params);
        if q > 0.0 {
            hints.push(1.0 / q);
        }
        let r = radial_fourier_4d(|p| line_weight(p * p, params, cut), q, cut.p_uv, &hints, tol)?;
        // p = cℓ + P, so ℓ·u = c p·u − c P·u and the radial transform is even in u
        let pre = Complex64::from_polar(self.bridge_factor(params, cut), self.const_angle - c * u.dot(&self.fixed[e]));
        Ok(Integral {
            value: pre * r.value,
            abs_err: pre.norm() * r.abs_err,
            evaluations: r.evaluations,
        })
    }

    /// One loop through two lines: the hyperspherical bubble reduction.
    pub fn one_loop_bubble(
        &self,
        params: &ModelParams,
        cut: &CutoffSpec,
        tol: &Tolerance,
    ) -> Result<Integral<Complex64>, AmplitudeError> {
        let dep = self.loop_dependent_lines();
        if self.n_loops != 1 || dep.len() != 2 {
            return Err(AmplitudeError::Unsupported(
                "reduced3d needs one loop through two lines".into(),
            ));
        }
        let (e1, e2) = (dep[0], dep[1]);
        let (c1, c2) = (self.unit_coefficient(e1)?, self.unit_coefficient(e2)?);
        let (p1, p2) = (self.fixed[e1], self.fixed[e2]);
        // with ℓ' = c₁ℓ + P₁ the second line is ±(ℓ' + K)
        let s = c1 * c2;
        let k = p2 * s - p1;
        let u = self.u[0] * c1;
        let kn = k.norm();
        let (w_par, w_perp) = if kn > 0.0 {
            let par = u.dot(&k) / kn;
            (par, (u - k * (par / kn)).norm())
        } else {
            (u.norm(), 0.0)
        };
        let r = bubble(kn, w_par, w_perp, params, cut, tol)?;
        let pre = Complex64::from_polar(self.bridge_factor(params, cut), self.const_angle - u.dot(&p1));
        Ok(Integral {
            value: pre * r.value,
            abs_err: pre.norm() * r.abs_err,
            evaluations: r.evaluations,
        })
    }

    /// `(A, b, c)` of the Gaussian exponent at Schwinger parameters `alpha`
    /// over the lines `dep`.
    fn gaussian(&self, dep: &[usize], alpha: &[f64]) -> (Vec<f64>, Vec<Vec4>, f64) {
        let m = self.n_loops;
        let mut a = vec![0.0; m * m];
        let mut b = vec![Vec4::ZERO; m];
        let c = self.gaussian_into(dep, alpha, &mut a, &mut b);
        (a, b, c)
    }

    /// Fills zeroed `a` (`m × m`) and `b` (`m`); returns `c`.
    fn gaussian_into(&self, dep: &[usize], alpha: &[f64], a: &mut [f64], b: &mut [Vec4]) -> f64 {
        let m = self.n_loops;
        let mut c = 0.0;
        for (&e, &al) in dep.iter().zip(alpha) {
            let l = &self.loop_coeff[e];
            let p = self.fixed[e];
            for i in 0..m {
                if l[i] == 0.0 {
                    continue;
                }
                b[i] += p * (al * l[i]);
                for j in 0..m {
                    a[i * m + j] += al * l[i] * l[j];
                }
            }
            c += al * p.norm2();
        }
        c
    }
}

/// Schwinger-parameter range used when the window is open at either end.
fn alpha_range(params: &ModelParams, cut: &CutoffSpec, upper_cap: f64) -> Result<(f64, f64), AmplitudeError> {
    let hi = if cut.alpha_max.is_finite() {
        cut.alpha_max
    } else if params.mu2 > 0.0 {
        upper_cap / params.mu2
    } else {
        return Err(AmplitudeError::Domain(
            "an unbounded Schwinger window needs μ² > 0".into(),
        ));
    };
    let lo = if cut.alpha_min > 0.0 { cut.alpha_min } else { 1e-16 * hi };
    Ok((lo, hi))
}

/// Solves `M y = r` in place for real `M` (row-major, `m × m`, destroyed)
/// by Gaussian elimination with partial pivoting; returns `det M`.
fn solve_real(m: usize, a: &mut [f64], rhs: &mut [[Complex64; 2]]) -> f64 {
    let mut det = 1.0;
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i * m + col].abs().total_cmp(&a[j * m + col].abs()))
            .expect("nonempty");
        if a[piv * m + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..m {
                a.swap(piv * m + k, col * m + k);
            }
            rhs.swap(piv, col);
            det = -det;
        }
        let d = a[col * m + col];
        det *= d;
        for r in (col + 1)..m {
            let f = a[r * m + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..m {
                a[r * m + k] -= f * a[col * m + k];
            }
            for p in 0..2 {
                let v = rhs[col][p];
                rhs[r][p] -= v * f;
            }
        }
    }
    for col in (0..m).rev() {
        let d = a[col * m + col];
        for p in 0..2 {
            let mut v = rhs[col][p];
            for k in (col + 1)..m {
                v -= rhs[k][p] * a[col * m + k];
            }
            rhs[col][p] = v / d;
        }
    }
    det
}

/// Loop-momentum Gaussian integral at fixed Schwinger parameters, times
/// the mass factor; the external-only factors are left out.
///
/// On the eigenvectors `(1, ±i)` of each 2×2 block of `Θ` the matrix `S`
/// acts as `A ± θC/2`, so with `z = J₀ + iJ₁`, `w = J₀ − iJ₁` per block
/// `JᵀS⁻¹J = Σ_blocks zᵀ M⁻¹ w` where `M = A + θC/2` is real.
fn gauss_point(form: &LoopForm, dep: &[usize], alpha: &[f64], mu2: f64) -> Complex64 {
    let m = form.n_loops;
    let mut mat = [0.0; MAX_GAUSS_LOOPS * MAX_GAUSS_LOOPS];
    let mut b = [Vec4::ZERO; MAX_GAUSS_LOOPS];
    let (mat, b) = (&mut mat[..m * m], &mut b[..m]);
    let c = form.gaussian_into(dep, alpha, mat, b);
    let half = 0.5 * form.theta.theta();
    for (x, cr) in mat.iter_mut().zip(&form.crossing) {
        *x += half * cr;
    }
    let jv = |j: usize, mu: usize| Complex64::new(-2.0 * b[j][mu], form.u[j][mu]);
    let i = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    let mut w = [[zero; 2]; MAX_GAUSS_LOOPS];
    for (j, wj) in w.iter_mut().enumerate().take(m) {
        *wj = [jv(j, 0) - i * jv(j, 1), jv(j, 2) - i * jv(j, 3)];
    }
    let det = solve_real(m, mat, &mut w[..m]);
    if det <= 0.0 {
        return Complex64::new(f64::NAN, 0.0);
    }
    let mut quad = zero;
    for (j, y) in w.iter().enumerate().take(m) {
        quad += (jv(j, 0) + i * jv(j, 1)) * y[0] + (jv(j, 2) + i * jv(j, 3)) * y[1];
    }
    let alpha_sum: f64 = alpha.iter().sum();
    let pref = PI.powi(2 * m as i32) / (det * det);
    (quad * 0.25 - c - mu2 * alpha_sum).exp() * pref
}

struct GaussNest<'a> {
    form: &'a LoopForm,
    dep: Vec<usize>,
    mu2: f64,
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
    tol: Tolerance,
    /// Schwinger parameters of the enclosing levels.
    alpha: RefCell<Vec<f64>>,
}

impl GaussNest<'_> {
    /// Integrates parameters `depth..` over `t = ln α`.
    fn level(&self, depth: usize) -> Result<ValErr, AmplitudeError> {
        let last = depth + 1 == self.dep.len();
        let failure: RefCell<Option<AmplitudeError>> = RefCell::new(None);
        let f = |t: f64| -> ValErr {
            let zero = ValErr::new(Complex64::new(0.0, 0.0), 0.0);
            if failure.borrow().is_some() {
                return zero;
            }
            let jac = t.exp();
            self.alpha.borrow_mut()[depth] = jac;
            if last {
                let v = gauss_point(self.form, &self.dep, &self.alpha.borrow(), self.mu2);
                ValErr::new(v * jac, 0.0)
            } else {
                match self.level(depth + 1) {
                    Ok(v) => v * jac,
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        zero
                    }
                }
            }
        };
        let r = integrate(&f, self.lo.ln(), self.hi.ln(), &self.breaks, &self.tol);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let r = r?;
        Ok(ValErr::new(r.value.value, r.abs_err + r.value.err))
    }
}

pub(crate) fn gauss_form(
    form: &LoopForm,
    params: &ModelParams,
    cut: &CutoffSpec,
    tol: &Tolerance,
) -> Result<Integral<Complex64>, AmplitudeError> {
    if params.a != 0.0 {
        return Err(AmplitudeError::Unsupported("schwinger_gauss needs a = 0".into()));
    }
    if cut.p_uv.is_some() {
        return Err(AmplitudeError::Unsupported("schwinger_gauss has no hard momentum cutoff".into()));
    }
    if form.n_loops == 0 {
        return Ok(form.tree_level(params, cut));
    }
    if form.n_loops > MAX_GAUSS_LOOPS {
        return Err(AmplitudeError::TooManyLoops {
            loops: form.n_loops,
            max: MAX_GAUSS_LOOPS,
        });
    }
    let (lo, hi) = alpha_range(params, cut, 60.0)?;
    let mut breaks: Vec<f64> = cut.scales(params).iter().map(|s| -2.0 * s.ln()).collect();
    for p in &form.fixed {
        if p.norm() > 0.0 {
            breaks.push(-2.0 * p.norm().ln());
        }
    }
    for u in &form.u {
        if u.norm() > 0.0 {
            breaks.push(2.0 * u.norm().ln());
        }
    }
    let dep = form.loop_dependent_lines();
    let nest = GaussNest {
        form,
        alpha: RefCell::new(vec![0.0; dep.len()]),
        dep,
        mu2: params.mu2,
        lo,
        hi,
        breaks,
        tol: *tol,
    };
    let r = nest.level(0)?;
    let pre = Complex64::from_polar(form.bridge_factor(params, cut), form.const_angle);
    Ok(Integral {
        value: pre * r.value,
        abs_err: pre.norm() * r.err,
        evaluations: 0,
    })
}

/// Closed-form Gaussian loop integrals with nested quadrature over the
/// Schwinger parameters; requires `a = 0`.
pub fn schwinger_gauss(
    g: &RibbonGraph,
    externals: &[Vec4],
    params: &ModelParams,
    cut: &CutoffSpec,
) -> Result<AmplitudeSample, AmplitudeError> {
    schwinger_gauss_with(g, externals, params, cut, &Tolerance::default())
}

pub fn schwinger_gauss_with(
    g: &RibbonGraph,
    externals: &[Vec4],
    params: &ModelParams,
    cut: &CutoffSpec,
    tol: &Tolerance,
) -> Result<AmplitudeSample, AmplitudeError> {
    params.validate()?;
    cut.validate()?;
    let form = LoopForm::new(g, externals, params.theta)?;
    let r = gauss_form(&form, params, cut, tol)?;
    Ok(AmplitudeSample {
        k: externals.iter().map(|x| x.norm()).fold(0.0, f64::max),
        externals: externals.to_vec(),
        value: r.value,
        abs_err: r.abs_err,
        method: Method::SchwingerGauss,
        ess: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            samples: 1_000_000,
            seed: 42,
        }
    }
}

pub(crate) struct McResult {
    pub value: Complex64,
    pub abs_err: f64,
    pub ess: Option<f64>,
}

#[derive(Default, Clone, Copy)]
struct Moments {
    sum: Complex64,
    sum_abs: f64,
    sum_sq: f64,
}

/// Inverse and Cholesky factor of the inverse for `m ≤ 2`.
fn small_inverse(m: usize, a: &[f64]) -> Option<(f64, [f64; 4], [f64; 4])> {
    match m {
        1 => {
            let d = a[0];
            (d > 0.0).then(|| (d, [1.0 / d, 0.0, 0.0, 0.0], [(1.0 / d).sqrt(), 0.0, 0.0, 0.0]))
        }
        2 => {
            let d = a[0] * a[3] - a[1] * a[2];
            if !(d > 0.0 && a[0] > 0.0) {
                return None;
            }
            let inv = [a[3] / d, -a[1] / d, -a[2] / d, a[0] / d];
            let r00 = inv[0].sqrt();
            let r10 = inv[2] / r00;
            let r11 = (inv[3] - r10 * r10).max(0.0).sqrt();
            Some((d, inv, [r00, 0.0, r10, r11]))
        }
        _ => None,
    }
}

fn mc_chunk(
    form: &LoopForm,
    dep: &[usize],
    params: &ModelParams,
    (lo, ln_r): (f64, f64),
    seed: u64,
    chunk: usize,
    n: usize,
) -> Moments {
    let m = form.n_loops;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    let ir = if params.a > 0.0 {
        params.a / (params.theta * params.theta)
    } else {
        0.0
    };
    let norm = PI.powi(2 * m as i32);
    let mut acc = Moments::default();
    let mut alpha = vec![0.0; dep.len()];
    let mut loops = vec![Vec4::ZERO; m];
    for _ in 0..n {
        let mut jac = 1.0;
        for a in alpha.iter_mut() {
            let t: f64 = rng.random();
            *a = lo * (t * ln_r).exp();
            jac *= *a * ln_r;
        }
        let (am, b, c) = form.gaussian(dep, &alpha);
        let Some((det, inv, chol)) = small_inverse(m, &am) else {
            continue;
        };
        let mut bab = 0.0;
        for i in 0..m {
            for j in 0..m {
                bab += inv[i * 2 + j] * b[i].dot(&b[j]);
            }
        }
        let z: Vec<Vec4> = (0..m)
            .map(|_| {
                Vec4::new(
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                )
            })
            .collect();
        for i in 0..m {
            let mut l = Vec4::ZERO;
            for j in 0..m {
                l += b[j] * (-inv[i * 2 + j]);
                if chol[i * 2 + j] != 0.0 {
                    l += z[j] * (chol[i * 2 + j] * std::f64::consts::FRAC_1_SQRT_2);
                }
            }
            loops[i] = l;
        }
        let alpha_sum: f64 = alpha.iter().sum();
        let w = norm / (det * det) * jac * (bab - c - params.mu2 * alpha_sum).exp();
        // the a = 0 integrand is Gaussian and done exactly; only the
        // deviation of the 1/p² factor from one is sampled
        let exact = gauss_point(form, dep, &alpha, params.mu2) * Complex64::from_polar(jac, form.const_angle);
        let mut ir_factor = 0.0;
        if ir > 0.0 {
            for (&e, &a) in dep.iter().zip(&alpha) {
                ir_factor -= a * ir / form.line_momentum(e, &loops).norm2();
            }
        }
        let v = exact + Complex64::from_polar(w * ir_factor.exp_m1(), form.phase_angle(&loops));
        if !(v.re.is_finite() && v.im.is_finite()) {
            continue;
        }
        acc.sum += v;
        acc.sum_abs += v.norm();
        acc.sum_sq += v.norm_sqr();
    }
    acc
}

pub(crate) fn mc_form(
    form: &LoopForm,
    params: &ModelParams,
    cut: &CutoffSpec,
    opts: &McOptions,
) -> Result<McResult, AmplitudeError> {
    if form.n_loops > 2 {
        return Err(AmplitudeError::TooManyLoops {
            loops: form.n_loops,
            max: 2,
        });
    }
    if cut.p_uv.is_some() {
        return Err(AmplitudeError::Unsupported("schwinger_mc has no hard momentum cutoff".into()));
    }
    if form.n_loops == 0 {
        let r = form.tree_level(params, cut);
        return Ok(McResult {
            value: r.value,
            abs_err: 0.0,
            ess: None,
        });
    }
    if opts.samples < 2 {
        return Err(AmplitudeError::Domain("Monte Carlo needs at least two samples".into()));
    }
    let (lo, hi) = alpha_range(params, cut, 50.0)?;
    let ln_r = (hi / lo).ln();
    let dep = form.loop_dependent_lines();
    let n_chunks = opts.samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..n_chunks)
        .into_par_iter()
        .map(|ch| {
            let n = CHUNK.min(opts.samples - ch * CHUNK);
            mc_chunk(form, &dep, params, (lo, ln_r), opts.seed, ch, n)
        })
        .collect();
    let mut tot = Moments::default();
    for p in parts {
        tot.sum += p.sum;
        tot.sum_abs += p.sum_abs;
        tot.sum_sq += p.sum_sq;
    }
    let n = opts.samples as f64;
    let ess = if tot.sum_sq > 0.0 {
        tot.sum_abs * tot.sum_abs / tot.sum_sq
    } else {
        0.0
    };
    if ess < MIN_ESS {
        return Err(AmplitudeError::EssCollapse { ess });
    }
    let mean = tot.sum / n;
    // E|W − mean|² = E|W|² − |mean|²
    let var = (tot.sum_sq / n - mean.norm_sqr()).max(0.0) * n / (n - 1.0);
    let pre = Complex64::from_polar(form.bridge_factor(params, cut), 0.0);
    Ok(McResult {
        value: pre * mean,
        abs_err: pre.norm() * (var / n).sqrt(),
        ess: Some(ess),
    })
}

/// Monte Carlo over Schwinger parameters (log-uniform) and loop momenta
/// (the Gaussian part of the integrand), for graphs with at most two
/// loops. At each sampled `α` the `a = 0` integrand is taken in closed
/// form and only the `e^{−αa/(θ²p²)} − 1` remainder is sampled.
/// Deterministic for a given seed.
pub fn schwinger_mc(
    g: &RibbonGraph,
    params: &ModelParams,
    externals: &[Vec4],
    cut: &CutoffSpec,
    opts: &McOptions,
) -> Result<AmplitudeSample, AmplitudeError> {
    params.validate()?;
    cut.validate()?;
    let form = LoopForm::new(g, externals, params.theta)?;
    let r = mc_form(&form, params, cut, opts)?;
    Ok(AmplitudeSample {
        k: externals.iter().map(|x| x.norm()).fold(0.0, f64::max),
        externals: externals.to_vec(),
        value: r.value,
        abs_err: r.abs_err,
        method: Method::SchwingerMc,
        ess: r.ess,
    })
}
