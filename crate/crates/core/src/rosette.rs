//! Spanning trees, contraction to a rosette, the intersection matrix
//! and Moyal phases.
//!
//! Momentum convention: line `e` declared as `edge e: ha hb` carries `p_e`
//! into its vertex at `ha` and `−p_e` at `hb`; external leg `x` carries
//! `k_x` into the graph. A vertex whose incoming momenta read `q₁ … q₄`
//! counterclockwise contributes `exp((i/2) Σ_{i<j} qᵢ ∧ qⱼ)`.

use std::collections::VecDeque;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{Attachment, RibbonGraph, UnionFind};
use crate::multiscale::ScaleAttribution;
use crate::topology::{rotation_report, RotationSystem, TopologyError, TopologyReport};
use crate::vec4::{ThetaMatrix, Vec4};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RosetteError {
    #[error("line set is not a spanning tree: {0}")]
    NotSpanning(String),
    #[error("momentum conservation violated: defect {defect:.3e} (scale {scale:.3e})")]
    Conservation { defect: f64, scale: f64 },
    #[error("expected {expected} {what} momenta, got {got}")]
    Arity {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    tree_lines: Vec<usize>,
    root: usize,
    /// `(line, parent vertex)` leading to each vertex; `None` at the root.
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
}

impl SpanningTree {
    /// Builds the tree from an explicit line set, checking it spans.
    pub fn from_lines(g: &RibbonGraph, lines: &[usize]) -> Result<SpanningTree, RosetteError> {
        let n = g.n_vertices();
        if lines.len() + 1 != n {
            return Err(RosetteError::NotSpanning(format!(
                "{} lines for {} vertices",
                lines.len(),
                n
            )));
        }
        let mut uf = UnionFind::new(n);
        for &e in lines {
            if e >= g.n_lines() {
                return Err(RosetteError::NotSpanning(format!("no line with index {e}")));
            }
            let [a, b] = g.edge_vertices(e);
            if !uf.union(a, b) {
                return Err(RosetteError::NotSpanning(format!("line '{}' closes a cycle", g.edges()[e].id)));
            }
        }
        Ok(Self::orient(g, lines))
    }

    fn orient(g: &RibbonGraph, lines: &[usize]) -> SpanningTree {
        let n = g.n_vertices();
        let root = g.root();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for &e in lines {
            let [a, b] = g.edge_vertices(e);
            adj[a].push((e, b));
            adj[b].push((e, a));
        }
        let mut parent = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adj[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some((e, v));
                    queue.push_back(w);
                }
            }
        }
        let mut tree_lines = lines.to_vec();
        tree_lines.sort_unstable();
        SpanningTree {
            tree_lines,
            root,
            parent,
            depth,
        }
    }

    pub fn tree_lines(&self) -> &[usize] {
        &self.tree_lines
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn contains(&self, e: usize) -> bool {
        self.tree_lines.binary_search(&e).is_ok()
    }

    /// Lines outside the tree, in declaration order.
    pub fn loop_lines(&self, g: &RibbonGraph) -> Vec<usize> {
        (0..g.n_lines()).filter(|&e| !self.contains(e)).collect()
    }

    /// The vertex of tree line `e` farther from the root.
    pub fn child_of(&self, e: usize) -> usize {
        self.parent
            .iter()
            .position(|p| matches!(p, Some((l, _)) if *l == e))
            .expect("tree line")
    }

    /// `b(l)`: vertices whose path to the root runs through tree line `l`.
    pub fn branch(&self, e: usize) -> Vec<usize> {
        let child = self.child_of(e);
        (0..self.parent.len())
            .filter(|&v| {
                let mut w = v;
                loop {
                    if w == child {
                        return true;
                    }
                    match self.parent[w] {
                        Some((_, p)) => w = p,
                        None => return false,
                    }
                }
            })
            .collect()
    }

    /// Tree lines ordered by the depth of their far end, then by index.
    pub fn contraction_order(&self) -> Vec<usize> {
        let mut order: Vec<(usize, usize)> = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|(e, _)| (self.depth[v], e)))
            .collect();
        order.sort_unstable();
        order.into_iter().map(|(_, e)| e).collect()
    }
}

/// Kruskal construction, highest scale first, ties by line index. Without
/// an attribution all lines count as scale 0.
pub fn spanning_tree(g: &RibbonGraph, attribution: Option<&ScaleAttribution>) -> SpanningTree {
    let mut order: Vec<usize> = (0..g.n_lines()).collect();
    if let Some(att) = attribution {
        order.sort_by_key(|&e| (std::cmp::Reverse(att.scale(e)), e));
    }
    let mut uf = UnionFind::new(g.n_vertices());
    let lines: Vec<usize> = order
        .into_iter()
        .filter(|&e| {
            let [a, b] = g.edge_vertices(e);
            uf.union(a, b)
        })
        .collect();
    SpanningTree::orient(g, &lines)
}

/// Every spanning tree of `g`, in lexicographic order of line sets.
pub fn enumerate_spanning_trees(g: &RibbonGraph) -> Vec<SpanningTree> {
    fn rec(g: &RibbonGraph, next: usize, chosen: &mut Vec<usize>, out: &mut Vec<SpanningTree>) {
        if chosen.len() + 1 == g.n_vertices() {
            if let Ok(t) = SpanningTree::from_lines(g, chosen) {
                out.push(t);
            }
            return;
        }
        for e in next..g.n_lines() {
            chosen.push(e);
            rec(g, e + 1, chosen, out);
            chosen.pop();
        }
    }
    let mut out = Vec::new();
    rec(g, 0, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    /// One end of loop `loop_index` (index into [`Rosette::loops`]).
    Loop { loop_index: usize, first: bool },
    External(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopLine {
    pub edge: usize,
    pub positions: [usize; 2],
    /// +1 when the line's first declared half-edge is read first.
    pub orientation: f64,
}

/// Single-vertex graph left after contracting a spanning tree. The word is
/// cut so that the first external leg (if any) is at position 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Rosette {
    word: Vec<usize>,
    letters: Vec<Letter>,
    loops: Vec<LoopLine>,
    external_positions: Vec<usize>,
    names: Vec<String>,
}

pub fn contract_to_rosette(g: &RibbonGraph, t: &SpanningTree) -> Rosette {
    let rot = |v: usize| -> Vec<usize> { g.vertices()[v].rotation.to_vec() };
    // the root's word absorbs one child vertex per tree line
    let mut word = rot(t.root());
    for e in t.contraction_order() {
        let [ha, hb] = g.edges()[e].ends;
        let (h, h2) = if word.contains(&ha) { (ha, hb) } else { (hb, ha) };
        let pos = word.iter().position(|&x| x == h).expect("tree line end on merged vertex");
        word.rotate_left(pos);
        let other = rot(g.vertex_of(h2));
        let p2 = other.iter().position(|&x| x == h2).expect("partner on its vertex");
        let mut merged: Vec<usize> = (1..other.len()).map(|i| other[(p2 + i) % other.len()]).collect();
        merged.extend_from_slice(&word[1..]);
        word = merged;
    }

    if let Some(x) = g.externals().first() {
        let pos = word.iter().position(|&h| h == x.half_edge).expect("leg on rosette");
        word.rotate_left(pos);
    }

    let mut loops: Vec<LoopLine> = Vec::new();
    let mut letters = Vec::with_capacity(word.len());
    let mut external_positions = vec![0; g.n_external()];
    for (pos, &h) in word.iter().enumerate() {
        match g.attachment(h) {
            Attachment::External(xi) => {
                external_positions[xi] = pos;
                letters.push(Letter::External(xi));
            }
            Attachment::Line { edge, end } => {
                if let Some(li) = loops.iter().position(|l| l.edge == edge) {
                    loops[li].positions[1] = pos;
                    letters.push(Letter::Loop {
                        loop_index: li,
                        first: false,
                    });
                } else {
                    letters.push(Letter::Loop {
                        loop_index: loops.len(),
                        first: true,
                    });
                    loops.push(LoopLine {
                        edge,
                        positions: [pos, pos],
                        orientation: if end == 0 { 1.0 } else { -1.0 },
                    });
                }
            }
        }
    }

    let names = word
        .iter()
        .map(|&h| match g.attachment(h) {
            Attachment::External(xi) => g.externals()[xi].label.clone(),
            Attachment::Line { edge, .. } => g.edges()[edge].id.clone(),
        })
        .collect();

    Rosette {
        word,
        letters,
        loops,
        external_positions,
        names,
    }
}

impl Rosette {
    /// Source-graph half-edges in word order.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn loops(&self) -> &[LoopLine] {
        &self.loops
    }

    /// Word position of each external leg, by declaration index.
    pub fn external_positions(&self) -> &[usize] {
        &self.external_positions
    }

    pub fn n_loops(&self) -> usize {
        self.loops.len()
    }

    pub fn n_external(&self) -> usize {
        self.external_positions.len()
    }

    /// External leg indices in word order.
    pub fn external_word_order(&self) -> Vec<usize> {
        self.letters
            .iter()
            .filter_map(|l| match l {
                Letter::External(x) => Some(*x),
                _ => None,
            })
            .collect()
    }

    pub fn rotation_system(&self) -> RotationSystem {
        let len = self.word.len();
        let mut alpha = vec![None; len];
        for l in &self.loops {
            alpha[l.positions[0]] = Some(l.positions[1]);
            alpha[l.positions[1]] = Some(l.positions[0]);
        }
        let mut external = vec![None; len];
        let mut external_labels = vec![String::new(); self.n_external()];
        for (xi, &p) in self.external_positions.iter().enumerate() {
            external[p] = Some(xi);
            external_labels[xi] = self.names[p].clone();
        }
        RotationSystem {
            sigma: (0..len).map(|i| (i + 1) % len).collect(),
            alpha,
            external,
            external_labels,
            n_vertices: 1,
        }
    }

    pub fn topology(&self) -> Result<TopologyReport, TopologyError> {
        rotation_report(&self.rotation_system())
    }

    /// True when no two loop lines interleave in the word.
    pub fn is_crossing_free(&self) -> bool {
        let m = self.loops.len();
        let im = intersection_matrix(self);
        (0..m).all(|i| (0..m).all(|j| im.get(i, j) == 0))
    }
}

impl fmt::Display for Rosette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "( {} )", self.names.join(" "))
    }
}

/// Signed crossing matrix over loops (first-occurrence order) followed by
/// externals (declaration order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionMatrix {
    size: usize,
    n_loops: usize,
    entries: Vec<i8>,
}

impl IntersectionMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn n_loops(&self) -> usize {
        self.n_loops
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<i8>> {
        self.entries.chunks(self.size.max(1)).map(|r| r.to_vec()).collect()
    }
}

/// `I_ij = ½ Σ s_u s_v sgn(v − u)` over the ends `u` of line `i` and `v` of
/// line `j`, with `s = +1` on the first end of a loop, `−1` on its second
/// and `+1` on an external. Interleaved ends `i j i j` give `+1`, disjoint
/// or nested ones give 0. External-external entries are zero; their phase
/// is carried by the external kernel.
pub fn intersection_matrix(r: &Rosette) -> IntersectionMatrix {
    let m = r.loops.len();
    let size = m + r.n_external();
    let ends = |i: usize| -> Vec<(usize, i32)> {
        if i < m {
            let [a, b] = r.loops[i].positions;
            vec![(a, 1), (b, -1)]
        } else {
            vec![(r.external_positions[i - m], 1)]
        }
    };
    let mut entries = vec![0i8; size * size];
    for i in 0..size {
        for j in 0..size {
            if i == j || (i >= m && j >= m) {
                continue;
            }
            let mut s = 0i32;
            for &(u, su) in &ends(i) {
                for &(v, sv) in &ends(j) {
                    s += su * sv * (v as i32 - u as i32).signum();
                }
            }
            entries[i * size + j] = (s / 2) as i8;
        }
    }
    IntersectionMatrix {
        size,
        n_loops: m,
        entries,
    }
}

/// Momentum carried by every line and leg of the source graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LineMomenta {
    /// Indexed by line; flows in at the first declared half-edge.
    pub edges: Vec<Vec4>,
    pub externals: Vec<Vec4>,
}

fn check_conservation(externals: &[Vec4]) -> Result<(), RosetteError> {
    let total: Vec4 = externals.iter().copied().sum();
    let scale = externals.iter().map(|k| k.norm()).fold(1.0_f64, f64::max);
    let defect = total.norm();
    if defect > 1e-9 * scale {
        return Err(RosetteError::Conservation { defect, scale });
    }
    Ok(())
}

fn phase(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Angle of the loop part of the rosette phase, `Σ_{i<j} I_ij Qᵢ ∧ Qⱼ`
/// with externals included as lines but external pairs skipped.
pub fn moyal_phase_angle(r: &Rosette, momenta: &LineMomenta, theta: &ThetaMatrix) -> Result<f64, RosetteError> {
    check_conservation(&momenta.externals)?;
    if momenta.externals.len() != r.n_external() {
        return Err(RosetteError::Arity {
            what: "external",
            expected: r.n_external(),
            got: momenta.externals.len(),
        });
    }
    let im = intersection_matrix(r);
    let m = r.loops.len();
    let q: Vec<Vec4> = r
        .loops
        .iter()
        .map(|l| {
            momenta
                .edges
                .get(l.edge)
                .map(|p| *p * l.orientation)
                .ok_or(RosetteError::Arity {
                    what: "line",
                    expected: l.edge + 1,
                    got: momenta.edges.len(),
                })
        })
        .chain(momenta.externals.iter().map(|k| Ok(*k)))
        .collect::<Result<_, _>>()?;
    let mut angle = 0.0;
    for i in 0..m {
        for j in (i + 1)..im.size() {
            let c = im.get(i, j);
            if c != 0 {
                angle += c as f64 * theta.wedge(&q[i], &q[j]);
            }
        }
    }
    Ok(angle)
}

pub fn moyal_phase(r: &Rosette, momenta: &LineMomenta, theta: &ThetaMatrix) -> Result<Complex64, RosetteError> {
    moyal_phase_angle(r, momenta, theta).map(phase)
}

fn kernel_angle(k: &[Vec4], theta: &ThetaMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..k.len() {
        for j in (i + 1)..k.len() {
            s += theta.wedge(&k[i], &k[j]);
        }
    }
    0.5 * s
}

/// `(|Σk|, exp((i/2) Σ_{i<j} kᵢ ∧ kⱼ))`.
pub fn external_kernel(k: &[Vec4], theta: &ThetaMatrix) -> (f64, Complex64) {
    let total: Vec4 = k.iter().copied().sum();
    (total.norm(), phase(kernel_angle(k, theta)))
}

/// Angle of the full amplitude phase: rosette loop phase times the external
/// kernel taken in rosette word order.
pub fn total_phase_angle(r: &Rosette, momenta: &LineMomenta, theta: &ThetaMatrix) -> Result<f64, RosetteError> {
    let loop_angle = moyal_phase_angle(r, momenta, theta)?;
    let ordered: Vec<Vec4> = r.external_word_order().iter().map(|&x| momenta.externals[x]).collect();
    Ok(loop_angle + kernel_angle(&ordered, theta))
}

/// Phase of the word-ordered external kernel relative to the declared-order
/// kernel.
pub fn kernel_reordering_angle(r: &Rosette, externals: &[Vec4], theta: &ThetaMatrix) -> f64 {
    let ordered: Vec<Vec4> = r.external_word_order().iter().map(|&x| externals[x]).collect();
    kernel_angle(&ordered, theta) - kernel_angle(externals, theta)
}

/// Incoming momentum at every half-edge of the source graph.
pub fn half_edge_momenta(g: &RibbonGraph, momenta: &LineMomenta) -> Vec<Vec4> {
    (0..g.n_half_edges())
        .map(|h| match g.attachment(h) {
            Attachment::External(xi) => momenta.externals[xi],
            Attachment::Line { edge, end: 0 } => momenta.edges[edge],
            Attachment::Line { edge, .. } => -momenta.edges[edge],
        })
        .collect()
}

/// Largest vertex conservation defect.
pub fn vertex_defect(g: &RibbonGraph, momenta: &LineMomenta) -> f64 {
    let q = half_edge_momenta(g, momenta);
    g.vertices()
        .iter()
        .map(|v| v.rotation.iter().map(|&h| q[h]).sum::<Vec4>().norm())
        .fold(0.0, f64::max)
}

/// Direct product of the vertex phases of the uncontracted graph.
pub fn vertex_phase_angle(g: &RibbonGraph, momenta: &LineMomenta, theta: &ThetaMatrix) -> f64 {
    let q = half_edge_momenta(g, momenta);
    g.vertices()
        .iter()
        .map(|v| {
            let qs: Vec<Vec4> = v.rotation.iter().map(|&h| q[h]).collect();
            kernel_angle(&qs, theta)
        })
        .sum()
}
