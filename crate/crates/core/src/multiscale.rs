//! Model parameters, the sliced propagator, scale attributions, high
//! subgraphs, momentum routing along a spanning tree and power counting.

use thiserror::Error;

use crate::graph::{Attachment, GraphError, RibbonGraph, UnionFind};
use crate::rosette::{LineMomenta, SpanningTree};
use crate::topology::{topology_report, TopologyError};
use crate::vec4::Vec4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("propagator undefined at p = 0 when a = 0 and μ = 0")]
    MasslessAtZero,
    #[error("scale of the zero momentum is undefined")]
    ZeroMomentum,
    #[error("attribution line {line}: {message}")]
    Attribution { line: usize, message: String },
    #[error("momentum conservation violated: defect {0:.3e}")]
    Conservation(f64),
    #[error("expected {expected} {what} momenta, got {got}")]
    Arity {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Coupling constants of the model. `lambda` is carried for bookkeeping only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub a: f64,
    pub mu2: f64,
    pub theta: f64,
    pub lambda: f64,
    pub m_base: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            a: 1.0,
            mu2: 1.0,
            theta: 1.0,
            lambda: 1.0,
            m_base: 2.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::Parameter(m.to_string()));
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return bad("a must be finite and ≥ 0");
        }
        if !(self.mu2 >= 0.0 && self.mu2.is_finite()) {
            return bad("μ² must be finite and ≥ 0");
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return bad("θ must be finite and > 0");
        }
        if !(self.m_base > 1.0 && self.m_base.is_finite()) {
            return bad("M must be finite and > 1");
        }
        if !self.lambda.is_finite() {
            return bad("λ must be finite");
        }
        Ok(())
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_mu2(mut self, mu2: f64) -> Self {
        self.mu2 = mu2;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    /// `D(p²) = p² + μ² + a/(θ² p²)`; infinite at `p = 0` when `a > 0`.
    pub fn denominator(&self, p2: f64) -> Result<f64, ModelError> {
        if p2 == 0.0 {
            if self.a > 0.0 {
                return Ok(f64::INFINITY);
            }
            if self.mu2 == 0.0 {
                return Err(ModelError::MasslessAtZero);
            }
            return Ok(self.mu2);
        }
        let ir = if self.a > 0.0 {
            self.a / (self.theta * self.theta * p2)
        } else {
            0.0
        };
        Ok(p2 + self.mu2 + ir)
    }
}

pub fn propagator_p2(p2: f64, params: &ModelParams) -> Result<f64, ModelError> {
    let d = params.denominator(p2)?;
    Ok(if d.is_infinite() { 0.0 } else { 1.0 / d })
}

/// `1 / (p² + μ² + a/(θ² p²))`.
pub fn propagator(p: &Vec4, params: &ModelParams) -> Result<f64, ModelError> {
    propagator_p2(p.norm2(), params)
}

/// `∫ dα e^{−αD}` over `[αmin, αmax]`, evaluated without cancellation.
pub fn window_integral(d: f64, alpha_min: f64, alpha_max: f64) -> f64 {
    if d.is_infinite() {
        return 0.0;
    }
    if alpha_max.is_infinite() {
        return (-alpha_min * d).exp() / d;
    }
    let width = alpha_max - alpha_min;
    if d == 0.0 {
        return width;
    }
    (-alpha_min * d).exp() * (-(-width * d).exp_m1()) / d
}

/// Schwinger window of slice `i`: `[1, ∞)` for `i = 0`, otherwise
/// `[M^{−2i}, M^{−2(i−1)}]`.
pub fn slice_window(i: u32, m_base: f64) -> (f64, f64) {
    if i == 0 {
        (1.0, f64::INFINITY)
    } else {
        (m_base.powi(-2 * i as i32), m_base.powi(-2 * (i as i32 - 1)))
    }
}

/// Slice `i` of the propagator, in closed form.
pub fn slice_propagator(p: &Vec4, i: u32, params: &ModelParams) -> Result<f64, ModelError> {
    let d = params.denominator(p.norm2())?;
    let (lo, hi) = slice_window(i, params.m_base);
    Ok(window_integral(d, lo, hi))
}

/// Slice index at which a momentum of this size lives: `|log_M |k||`
/// rounded to the nearest integer, halves toward zero.
pub fn scale_of_momentum(k: &Vec4, m_base: f64) -> Result<u32, ModelError> {
    let n = k.norm();
    if n == 0.0 {
        return Err(ModelError::ZeroMomentum);
    }
    let e = (n.ln() / m_base.ln()).abs();
    Ok((e - 0.5).ceil().max(0.0) as u32)
}

/// Slice index of every internal line, by line index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleAttribution {
    scales: Vec<u32>,
}

impl ScaleAttribution {
    pub fn new(scales: Vec<u32>) -> Self {
        ScaleAttribution { scales }
    }

    pub fn uniform(g: &RibbonGraph, i: u32) -> Self {
        ScaleAttribution {
            scales: vec![i; g.n_lines()],
        }
    }

    pub fn scale(&self, e: usize) -> u32 {
        self.scales[e]
    }

    pub fn scales(&self) -> &[u32] {
        &self.scales
    }

    pub fn max_scale(&self) -> u32 {
        self.scales.iter().copied().max().unwrap_or(0)
    }

    /// Parses `scale <eid>: <i>` lines; every line of `g` must be covered
    /// exactly once.
    pub fn parse(text: &str, g: &RibbonGraph) -> Result<Self, ModelError> {
        let mut scales: Vec<Option<u32>> = vec![None; g.n_lines()];
        for (ln, raw) in text.lines().enumerate() {
            let err = |message: String| ModelError::Attribution { line: ln + 1, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let rest = line
                .strip_prefix("scale")
                .filter(|r| r.starts_with(char::is_whitespace))
                .ok_or_else(|| err(format!("expected 'scale <eid>: <i>', found '{line}'")))?;
            let (id, value) = rest
                .split_once(':')
                .ok_or_else(|| err("missing ':'".to_string()))?;
            let id = id.trim();
            let e = g.edge_index(id).ok_or_else(|| err(format!("unknown line '{id}'")))?;
            let i: u32 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("scale '{}' is not a non-negative integer", value.trim())))?;
            if scales[e].replace(i).is_some() {
                return Err(err(format!("line '{id}' attributed twice")));
            }
        }
        let missing: Vec<&str> = scales
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(e, _)| g.edges()[e].id.as_str())
            .collect();
        if !missing.is_empty() {
            return Err(ModelError::Attribution {
                line: text.lines().count(),
                message: format!("no scale for line(s) {}", missing.join(", ")),
            });
        }
        Ok(ScaleAttribution {
            scales: scales.into_iter().map(|s| s.expect("checked")).collect(),
        })
    }

    pub fn to_text(&self, g: &RibbonGraph) -> String {
        self.scales
            .iter()
            .enumerate()
            .map(|(e, s)| format!("scale {}: {}\n", g.edges()[e].id, s))
            .collect()
    }
}

/// Connected component `G^i_r` of the lines with scale ≥ i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighSubgraph {
    pub scale: u32,
    pub component: usize,
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Half-edges at the component's vertices not on its lines: external
    /// legs plus lower-scale lines.
    pub n_ext: usize,
    pub genus: usize,
    /// Index (in the returned list) of the component one scale down that
    /// contains this one.
    pub parent: Option<usize>,
}

impl HighSubgraph {
    /// `N − 4` for planar components, `N + 4` otherwise.
    pub fn degree(&self) -> i64 {
        if self.genus == 0 {
            self.n_ext as i64 - 4
        } else {
            self.n_ext as i64 + 4
        }
    }
}

pub fn high_subgraphs(g: &RibbonGraph, att: &ScaleAttribution) -> Result<Vec<HighSubgraph>, ModelError> {
    let mut out: Vec<HighSubgraph> = Vec::new();
    let mut prev_level: Vec<usize> = Vec::new();
    for i in 0..=att.max_scale() {
        let lines: Vec<usize> = (0..g.n_lines()).filter(|&e| att.scale(e) >= i).collect();
        let mut uf = UnionFind::new(g.n_vertices());
        for &e in &lines {
            let [a, b] = g.edge_vertices(e);
            uf.union(a, b);
        }
        let mut roots: Vec<usize> = lines.iter().map(|&e| uf.find(g.edge_vertices(e)[0])).collect();
        roots.sort_unstable();
        roots.dedup();
        let mut level = Vec::new();
        for (r, &root) in roots.iter().enumerate() {
            let edges: Vec<usize> = lines
                .iter()
                .copied()
                .filter(|&e| uf.find(g.edge_vertices(e)[0]) == root)
                .collect();
            let vertices: Vec<usize> = (0..g.n_vertices())
                .filter(|&v| uf.find(v) == root && edges.iter().any(|&e| g.edge_vertices(e).contains(&v)))
                .collect();
            let n_ext = 4 * vertices.len() - 2 * edges.len();
            let genus = topology_report(&g.induced_subgraph(&edges)?)?.genus;
            let parent = prev_level
                .iter()
                .copied()
                .find(|&pi| edges.iter().all(|e| out[pi].edges.contains(e)));
            level.push(out.len() + r);
            out.push(HighSubgraph {
                scale: i,
                component: r,
                edges,
                vertices,
                n_ext,
                genus,
                parent,
            });
        }
        prev_level = level;
    }
    Ok(out)
}

/// `log_M` of the multiscale bound: `Σ_{i,r} −ω(G^i_r)`.
pub fn power_counting_bound(g: &RibbonGraph, att: &ScaleAttribution) -> Result<f64, ModelError> {
    Ok(high_subgraphs(g, att)?.iter().map(|s| -(s.degree() as f64)).sum())
}

/// Line momenta as linear combinations of free loop momenta and external
/// momenta, solved along a spanning tree.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumRouting {
    pub tree: SpanningTree,
    /// Free lines, one loop momentum each, in declaration order.
    pub loop_lines: Vec<usize>,
    /// `p_e = Σ_j loop_coeff[e][j] ℓ_j + Σ_x ext_coeff[e][x] k_x`.
    pub loop_coeff: Vec<Vec<f64>>,
    pub ext_coeff: Vec<Vec<f64>>,
}

impl MomentumRouting {
    pub fn new(g: &RibbonGraph, tree: &SpanningTree) -> Self {
        let loop_lines = tree.loop_lines(g);
        let (n_lines, m, n_ext) = (g.n_lines(), loop_lines.len(), g.n_external());
        let mut loop_coeff = vec![vec![0.0; m]; n_lines];
        let mut ext_coeff = vec![vec![0.0; n_ext]; n_lines];
        for (j, &e) in loop_lines.iter().enumerate() {
            loop_coeff[e][j] = 1.0;
        }
        for &l in tree.tree_lines() {
            let branch = tree.branch(l);
            let child_end = g.edges()[l].ends.iter().position(|&h| branch.contains(&g.vertex_of(h))).expect("child end");
            let s = if child_end == 0 { 1.0 } else { -1.0 };
            for &v in &branch {
                for &h in &g.vertices()[v].rotation {
                    match g.attachment(h) {
                        Attachment::External(x) => ext_coeff[l][x] -= s,
                        Attachment::Line { edge, end } => {
                            if let Some(j) = loop_lines.iter().position(|&e| e == edge) {
                                let sign = if end == 0 { 1.0 } else { -1.0 };
                                loop_coeff[l][j] -= s * sign;
                            }
                        }
                    }
                }
            }
        }
        MomentumRouting {
            tree: tree.clone(),
            loop_lines,
            loop_coeff,
            ext_coeff,
        }
    }

    pub fn n_loops(&self) -> usize {
        self.loop_lines.len()
    }

    /// Human-readable `p_e` as a signed sum of loop lines and legs.
    pub fn formula(&self, g: &RibbonGraph, e: usize) -> String {
        let mut terms = Vec::new();
        let mut push = |c: f64, name: &str| {
            if c != 0.0 {
                let sign = if c > 0.0 { "+" } else { "-" };
                let mag = if c.abs() == 1.0 { String::new() } else { format!("{}", c.abs()) };
                terms.push(format!("{sign}{mag}{name}"));
            }
        };
        for (j, &l) in self.loop_lines.iter().enumerate() {
            push(self.loop_coeff[e][j], &g.edges()[l].id);
        }
        for (x, leg) in g.externals().iter().enumerate() {
            push(self.ext_coeff[e][x], &leg.label);
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" ")
        }
    }

    pub fn route(&self, loop_momenta: &[Vec4], external_momenta: &[Vec4]) -> Result<LineMomenta, ModelError> {
        let m = self.n_loops();
        if loop_momenta.len() != m {
            return Err(ModelError::Arity {
                what: "loop",
                expected: m,
                got: loop_momenta.len(),
            });
        }
        let n_ext = self.ext_coeff.first().map_or(external_momenta.len(), |r| r.len());
        if external_momenta.len() != n_ext {
            return Err(ModelError::Arity {
                what: "external",
                expected: n_ext,
                got: external_momenta.len(),
            });
        }
        let total: Vec4 = external_momenta.iter().copied().sum();
        let scale = external_momenta.iter().map(|k| k.norm()).fold(1.0_f64, f64::max);
        if total.norm() > 1e-9 * scale {
            return Err(ModelError::Conservation(total.norm()));
        }
        let edges = self
            .loop_coeff
            .iter()
            .zip(&self.ext_coeff)
            .map(|(lc, ec)| {
                let mut p = Vec4::ZERO;
                for (c, l) in lc.iter().zip(loop_momenta) {
                    if *c != 0.0 {
                        p += *l * *c;
                    }
                }
                for (c, k) in ec.iter().zip(external_momenta) {
                    if *c != 0.0 {
                        p += *k * *c;
                    }
                }
                p
            })
            .collect();
        Ok(LineMomenta {
            edges,
            externals: external_momenta.to_vec(),
        })
    }
}

/// Routes momenta along `tree`: loop lines carry the given loop momenta,
/// tree lines `p_l = ∓ Σ_{v ∈ b(l)} q_v`.
pub fn route_momenta(
    g: &RibbonGraph,
    tree: &SpanningTree,
    loop_momenta: &[Vec4],
    external_momenta: &[Vec4],
) -> Result<LineMomenta, ModelError> {
    MomentumRouting::new(g, tree).route(loop_momenta, external_momenta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::catalog_get;
    use crate::rosette::{spanning_tree, vertex_defect};

    fn p_of_norm2(p2: f64) -> Vec4 {
        Vec4::new(p2.sqrt(), 0.0, 0.0, 0.0)
    }

    #[test]
    fn propagator_values() {
        let base = ModelParams::default();
        let m0 = base.with_a(0.0).with_mu2(0.0);
        assert_eq!(propagator(&p_of_norm2(1.0), &m0).unwrap(), 1.0);
        assert_eq!(propagator(&p_of_norm2(1.0), &base.with_mu2(0.0)).unwrap(), 0.5);
        assert!((propagator(&p_of_norm2(4.0), &base).unwrap() - 1.0 / 5.25).abs() < 1e-15);
        assert_eq!(propagator(&Vec4::ZERO, &base).unwrap(), 0.0);
        assert_eq!(propagator(&Vec4::ZERO, &m0), Err(ModelError::MasslessAtZero));
    }

    #[test]
    fn slice_zero_at_origin() {
        let p = ModelParams::default().with_a(0.0);
        let c0 = slice_propagator(&Vec4::ZERO, 0, &p).unwrap();
        assert!((c0 - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn slices_telescope() {
        let params = ModelParams::default();
        let p = p_of_norm2(1.0);
        let sum: f64 = (0..=60).map(|i| slice_propagator(&p, i, &params).unwrap()).sum();
        let full = propagator(&p, &params).unwrap();
        assert!((sum - full).abs() <= 1e-12 * full);
    }

    #[test]
    fn scale_rounding() {
        let m = 2.0;
        assert_eq!(scale_of_momentum(&p_of_norm2(64.0), m).unwrap(), 3);
        assert_eq!(scale_of_momentum(&p_of_norm2(2f64.powi(-6)), m).unwrap(), 3);
        assert_eq!(scale_of_momentum(&p_of_norm2(1.0), m).unwrap(), 0);
        // |k| = M^{2.5}: half-way, rounds toward zero
        assert_eq!(scale_of_momentum(&p_of_norm2(2f64.powi(5)), m).unwrap(), 2);
        assert!(scale_of_momentum(&Vec4::ZERO, m).is_err());
    }

    #[test]
    fn attribution_parsing() {
        let g = catalog_get("fourpoint_irregular").unwrap();
        let att = ScaleAttribution::parse("# scales\nscale a: 5\nscale b : 2\n", &g).unwrap();
        assert_eq!(att.scales(), &[5, 2]);
        assert_eq!(ScaleAttribution::parse(&att.to_text(&g), &g).unwrap(), att);
        assert!(ScaleAttribution::parse("scale a: 5\n", &g).is_err());
        assert!(ScaleAttribution::parse("scale a: 5\nscale b: -1\n", &g).is_err());
        assert!(ScaleAttribution::parse("scale a: 5\nscale z: 1\n", &g).is_err());
        assert!(ScaleAttribution::parse("scale a: 5\nscale a: 1\nscale b: 1\n", &g).is_err());
    }

    #[test]
    fn bubble_high_subgraphs() {
        let g = catalog_get("fourpoint_irregular").unwrap();
        let subs = high_subgraphs(&g, &ScaleAttribution::new(vec![5, 2])).unwrap();
        let top: Vec<_> = subs.iter().filter(|s| s.scale == 5).collect();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].edges, vec![0]);
        // two vertices, one line: 8 − 2 half-edges leave it
        assert_eq!(top[0].n_ext, 6);
        let parent = &subs[top[0].parent.unwrap()];
        assert_eq!((parent.scale, &parent.edges), (4, &vec![0]));
        let at2 = subs.iter().find(|s| s.scale == 2).unwrap();
        assert_eq!((at2.edges.len(), at2.n_ext), (2, 4));
    }

    #[test]
    fn trivial_attribution_power_counting() {
        for name in ["bubble_regular", "fourpoint_irregular", "tadpole_planar", "triangle_6pt"] {
            let g = catalog_get(name).unwrap();
            let pc = power_counting_bound(&g, &ScaleAttribution::uniform(&g, 0)).unwrap();
            assert_eq!(pc, 4.0 - g.n_external() as f64, "{name}");
        }
        let g = catalog_get("bubble_regular").unwrap();
        assert_eq!(power_counting_bound(&g, &ScaleAttribution::uniform(&g, 1)).unwrap(), 0.0);
        let g = catalog_get("sunset_np").unwrap();
        assert_eq!(power_counting_bound(&g, &ScaleAttribution::uniform(&g, 0)).unwrap(), -6.0);
    }

    #[test]
    fn fourpoint_tree_momentum() {
        let g = catalog_get("fourpoint_irregular").unwrap();
        let t = spanning_tree(&g, None);
        let routing = MomentumRouting::new(&g, &t);
        assert_eq!(routing.formula(&g, 0), "-b +k3 +k4");
        let k = [
            Vec4::new(1.0, 0.2, 0.0, 0.0),
            Vec4::new(0.0, 0.5, -0.3, 0.0),
            Vec4::new(-0.4, 0.0, 0.1, 0.7),
            Vec4::new(-0.6, -0.7, 0.2, -0.7),
        ];
        let l = Vec4::new(0.3, 0.3, -0.2, 0.9);
        let m = routing.route(&[l], &k).unwrap();
        assert_eq!(m.edges[1], l);
        assert!((m.edges[0] - (k[2] + k[3] - l)).norm() < 1e-15);
        assert!(vertex_defect(&g, &m) < 1e-15);
    }
}
