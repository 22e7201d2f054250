//! φ⋆⁴ ribbon graphs: declaration, validation, the text format and the
//! built-in catalog.
//!
//! A graph is a set of four-valent vertices, each carrying a cyclically
//! ordered (counterclockwise) list of half-edges. Every half-edge is
//! attached either to exactly one internal line (a pair of half-edges) or
//! to exactly one external leg. External legs are ordered; the order is
//! the momentum labelling `k₁ … k_N`.
//!
//! Text format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! vertex v1: h1 h2 h3 h4
//! edge l1: h1 h3
//! external k1: h2
//! external k2: h4
//! root: v1
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

pub const VALENCE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),
    #[error("unknown catalog graph '{0}'")]
    UnknownName(String),
}

/// Unvalidated graph declaration, as read from text or assembled by hand.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphDecl {
    pub vertices: Vec<VertexDecl>,
    pub edges: Vec<EdgeDecl>,
    pub externals: Vec<ExternalDecl>,
    pub root: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexDecl {
    pub id: String,
    pub rotation: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDecl {
    pub id: String,
    pub ends: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalDecl {
    pub label: String,
    pub half_edge: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    NoVertices,
    BadIdentifier(String),
    DuplicateId { kind: &'static str, id: String },
    WrongValence { vertex: String, count: usize },
    DuplicateHalfEdge(String),
    /// Half-edge sits on a vertex but no line or leg uses it.
    UnattachedHalfEdge(String),
    /// Half-edge used by a line or leg but absent from every rotation.
    DanglingHalfEdge(String),
    /// Half-edge used by more than one line/leg declaration.
    DoublyAttached(String),
    LineCount { lines: usize, vertices: usize, externals: usize },
    Disconnected { components: usize },
    UnknownRoot(String),
    RootWithoutExternal(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "graph has no vertices"),
            Violation::BadIdentifier(s) => write!(f, "identifier '{s}' is not [A-Za-z0-9_]+"),
            Violation::DuplicateId { kind, id } => write!(f, "duplicate {kind} id '{id}'"),
            Violation::WrongValence { vertex, count } => {
                write!(f, "vertex '{vertex}' has {count} half-edges, expected {VALENCE}")
            }
            Violation::DuplicateHalfEdge(h) => write!(f, "half-edge '{h}' appears in more than one rotation slot"),
            Violation::UnattachedHalfEdge(h) => write!(f, "dangling half-edge '{h}': not used by any line or external leg"),
            Violation::DanglingHalfEdge(h) => write!(f, "dangling half-edge '{h}': not on any vertex"),
            Violation::DoublyAttached(h) => write!(f, "half-edge '{h}' attached more than once"),
            Violation::LineCount { lines, vertices, externals } => write!(
                f,
                "L ≠ ½(4n−N): L={lines}, n={vertices}, N={externals}"
            ),
            Violation::Disconnected { components } => write!(f, "graph is disconnected ({components} components)"),
            Violation::UnknownRoot(r) => write!(f, "root '{r}' is not a vertex"),
            Violation::RootWithoutExternal(r) => write!(f, "root '{r}' carries no external leg"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, pred: impl Fn(&Violation) -> bool) -> bool {
        self.violations.iter().any(pred)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Checks every graph invariant on a declaration; the report is empty iff
/// the declaration describes a valid φ⋆⁴ ribbon graph.
pub fn validate(decl: &GraphDecl) -> ValidationReport {
    let mut out = Vec::new();
    if decl.vertices.is_empty() {
        out.push(Violation::NoVertices);
    }

    let all_ids = decl
        .vertices
        .iter()
        .flat_map(|v| std::iter::once(&v.id).chain(v.rotation.iter()))
        .chain(decl.edges.iter().flat_map(|e| std::iter::once(&e.id).chain(e.ends.iter())))
        .chain(decl.externals.iter().flat_map(|x| [&x.label, &x.half_edge]))
        .chain(decl.root.iter());
    let mut bad: Vec<&String> = all_ids.filter(|s| !is_identifier(s)).collect();
    bad.sort();
    bad.dedup();
    out.extend(bad.into_iter().map(|s| Violation::BadIdentifier(s.clone())));

    let mut dup = |kind: &'static str, ids: &mut dyn Iterator<Item = &String>| {
        let mut seen = HashSet::new();
        for id in ids {
            if !seen.insert(id.clone()) {
                out.push(Violation::DuplicateId { kind, id: id.clone() });
            }
        }
    };
    dup("vertex", &mut decl.vertices.iter().map(|v| &v.id));
    dup("edge", &mut decl.edges.iter().map(|e| &e.id));
    dup("external", &mut decl.externals.iter().map(|x| &x.label));

    for v in &decl.vertices {
        if v.rotation.len() != VALENCE {
            out.push(Violation::WrongValence {
                vertex: v.id.clone(),
                count: v.rotation.len(),
            });
        }
    }

    // vertex side
    let mut on_vertex: BTreeMap<&str, usize> = BTreeMap::new();
    let mut owner: HashMap<&str, usize> = HashMap::new();
    for (vi, v) in decl.vertices.iter().enumerate() {
        for h in &v.rotation {
            *on_vertex.entry(h.as_str()).or_default() += 1;
            owner.entry(h.as_str()).or_insert(vi);
        }
    }
    for (h, &c) in &on_vertex {
        if c > 1 {
            out.push(Violation::DuplicateHalfEdge(h.to_string()));
        }
    }

    // line/leg side
    let mut attached: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &decl.edges {
        for h in &e.ends {
            *attached.entry(h.as_str()).or_default() += 1;
        }
    }
    for x in &decl.externals {
        *attached.entry(x.half_edge.as_str()).or_default() += 1;
    }
    for (h, &c) in &attached {
        if c > 1 {
            out.push(Violation::DoublyAttached(h.to_string()));
        }
        if !on_vertex.contains_key(h) {
            out.push(Violation::DanglingHalfEdge(h.to_string()));
        }
    }
    for h in on_vertex.keys() {
        if !attached.contains_key(h) {
            out.push(Violation::UnattachedHalfEdge(h.to_string()));
        }
    }

    let n = decl.vertices.len();
    let big_n = decl.externals.len();
    let lines = decl.edges.len();
    if 2 * lines + big_n != VALENCE * n {
        out.push(Violation::LineCount {
            lines,
            vertices: n,
            externals: big_n,
        });
    }

    if n > 0 {
        let mut uf = UnionFind::new(n);
        for e in &decl.edges {
            if let (Some(&a), Some(&b)) = (owner.get(e.ends[0].as_str()), owner.get(e.ends[1].as_str())) {
                uf.union(a, b);
            }
        }
        let components = uf.count();
        if components > 1 {
            out.push(Violation::Disconnected { components });
        }
    }

    if let Some(root) = &decl.root {
        match decl.vertices.iter().find(|v| &v.id == root) {
            None => out.push(Violation::UnknownRoot(root.clone())),
            Some(v) => {
                let has_leg = decl.externals.iter().any(|x| v.rotation.contains(&x.half_edge));
                if !decl.externals.is_empty() && !has_leg {
                    out.push(Violation::RootWithoutExternal(root.clone()));
                }
            }
        }
    }

    ValidationReport { violations: out }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    pub(crate) fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    /// Half-edge indices in counterclockwise order.
    pub rotation: [usize; VALENCE],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct External {
    pub label: String,
    pub half_edge: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attachment {
    Line { edge: usize, end: usize },
    External(usize),
}

/// A validated, immutable φ⋆⁴ ribbon graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibbonGraph {
    half_edges: Vec<String>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    externals: Vec<External>,
    root: usize,
    vertex_of: Vec<usize>,
    slot_of: Vec<usize>,
    attachment: Vec<Attachment>,
}

impl RibbonGraph {
    pub fn from_decl(decl: &GraphDecl) -> Result<RibbonGraph, GraphError> {
        let report = validate(decl);
        if !report.is_valid() {
            return Err(GraphError::Invalid(report));
        }

        let mut half_edges = Vec::with_capacity(VALENCE * decl.vertices.len());
        let mut index = HashMap::new();
        let mut vertex_of = Vec::new();
        let mut slot_of = Vec::new();
        let mut vertices = Vec::with_capacity(decl.vertices.len());
        for (vi, v) in decl.vertices.iter().enumerate() {
            let mut rotation = [0; VALENCE];
            for (slot, h) in v.rotation.iter().enumerate() {
                let idx = half_edges.len();
                half_edges.push(h.clone());
                index.insert(h.as_str(), idx);
                vertex_of.push(vi);
                slot_of.push(slot);
                rotation[slot] = idx;
            }
            vertices.push(Vertex { id: v.id.clone(), rotation });
        }

        let mut attachment = vec![Attachment::External(usize::MAX); half_edges.len()];
        let edges: Vec<Edge> = decl
            .edges
            .iter()
            .enumerate()
            .map(|(ei, e)| {
                let ends = [index[e.ends[0].as_str()], index[e.ends[1].as_str()]];
                attachment[ends[0]] = Attachment::Line { edge: ei, end: 0 };
                attachment[ends[1]] = Attachment::Line { edge: ei, end: 1 };
                Edge { id: e.id.clone(), ends }
            })
            .collect();
        let externals: Vec<External> = decl
            .externals
            .iter()
            .enumerate()
            .map(|(xi, x)| {
                let h = index[x.half_edge.as_str()];
                attachment[h] = Attachment::External(xi);
                External {
                    label: x.label.clone(),
                    half_edge: h,
                }
            })
            .collect();

        let root = match &decl.root {
            Some(r) => decl.vertices.iter().position(|v| &v.id == r).expect("validated root"),
            None => externals.first().map(|x| vertex_of[x.half_edge]).unwrap_or(0),
        };

        Ok(RibbonGraph {
            half_edges,
            vertices,
            edges,
            externals,
            root,
            vertex_of,
            slot_of,
            attachment,
        })
    }

    pub fn to_decl(&self) -> GraphDecl {
        let name = |h: usize| self.half_edges[h].clone();
        GraphDecl {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexDecl {
                    id: v.id.clone(),
                    rotation: v.rotation.iter().map(|&h| name(h)).collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDecl {
                    id: e.id.clone(),
                    ends: [name(e.ends[0]), name(e.ends[1])],
                })
                .collect(),
            externals: self
                .externals
                .iter()
                .map(|x| ExternalDecl {
                    label: x.label.clone(),
                    half_edge: name(x.half_edge),
                })
                .collect(),
            root: Some(self.vertices[self.root].id.clone()),
        }
    }

    /// Re-runs the invariant checks; always empty for a constructed graph.
    pub fn validate(&self) -> ValidationReport {
        validate(&self.to_decl())
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_lines(&self) -> usize {
        self.edges.len()
    }

    pub fn n_external(&self) -> usize {
        self.externals.len()
    }

    pub fn n_half_edges(&self) -> usize {
        self.half_edges.len()
    }

    /// Number of independent loops, `L − n + 1`.
    pub fn n_loops(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn externals(&self) -> &[External] {
        &self.externals
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn half_edge_name(&self, h: usize) -> &str {
        &self.half_edges[h]
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    pub fn attachment(&self, h: usize) -> Attachment {
        self.attachment[h]
    }

    /// Counterclockwise successor of `h` around its vertex.
    pub fn next_at_vertex(&self, h: usize) -> usize {
        let v = &self.vertices[self.vertex_of[h]];
        v.rotation[(self.slot_of[h] + 1) % VALENCE]
    }

    /// The other half-edge of the line holding `h`, if `h` is internal.
    pub fn partner(&self, h: usize) -> Option<usize> {
        match self.attachment[h] {
            Attachment::Line { edge, end } => Some(self.edges[edge].ends[1 - end]),
            Attachment::External(_) => None,
        }
    }

    /// Vertex indices at the two ends of a line.
    pub fn edge_vertices(&self, e: usize) -> [usize; 2] {
        let [a, b] = self.edges[e].ends;
        [self.vertex_of[a], self.vertex_of[b]]
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Subgraph spanned by `lines`: their end vertices with full rotations;
    /// every half-edge not on a chosen line becomes an external leg named
    /// after the half-edge. `lines` must form a connected set.
    pub fn induced_subgraph(&self, lines: &[usize]) -> Result<RibbonGraph, GraphError> {
        let mut vs: Vec<usize> = lines.iter().flat_map(|&e| self.edge_vertices(e)).collect();
        vs.sort_unstable();
        vs.dedup();
        let decl = self.to_decl();
        let chosen: HashSet<usize> = lines
            .iter()
            .flat_map(|&e| self.edges[e].ends)
            .collect();
        let sub = GraphDecl {
            vertices: vs.iter().map(|&v| decl.vertices[v].clone()).collect(),
            edges: lines.iter().map(|&e| decl.edges[e].clone()).collect(),
            externals: vs
                .iter()
                .flat_map(|&v| self.vertices[v].rotation)
                .filter(|h| !chosen.contains(h))
                .map(|h| ExternalDecl {
                    label: self.half_edges[h].clone(),
                    half_edge: self.half_edges[h].clone(),
                })
                .collect(),
            root: None,
        };
        RibbonGraph::from_decl(&sub)
    }
}

impl fmt::Display for RibbonGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serialize_decl(&self.to_decl()))
    }
}

pub fn serialize_decl(decl: &GraphDecl) -> String {
    let mut s = String::new();
    for v in &decl.vertices {
        s.push_str(&format!("vertex {}: {}\n", v.id, v.rotation.join(" ")));
    }
    for e in &decl.edges {
        s.push_str(&format!("edge {}: {} {}\n", e.id, e.ends[0], e.ends[1]));
    }
    for x in &decl.externals {
        s.push_str(&format!("external {}: {}\n", x.label, x.half_edge));
    }
    if let Some(r) = &decl.root {
        s.push_str(&format!("root: {r}\n"));
    }
    s
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in line.char_indices() {
        let is_sep = c.is_whitespace() || c == ':';
        if is_sep {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
            if c == ':' {
                out.push(Token { text: &line[i..i + 1], column: i + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

/// Parses the text format into an unvalidated declaration.
pub fn parse_decl(text: &str) -> Result<GraphDecl, GraphError> {
    let mut decl = GraphDecl::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        let err = |column: usize, message: String| GraphError::Syntax {
            line: line_no,
            column,
            message,
        };
        let ident = |t: &Token| -> Result<String, GraphError> {
            if is_identifier(t.text) {
                Ok(t.text.to_string())
            } else {
                Err(err(t.column, format!("expected identifier, found '{}'", t.text)))
            }
        };
        let end_col = line.trim_end().len() + 1;
        let expect_colon = |i: usize| -> Result<(), GraphError> {
            match toks.get(i) {
                Some(t) if t.text == ":" => Ok(()),
                Some(t) => Err(err(t.column, format!("expected ':', found '{}'", t.text))),
                None => Err(err(end_col, "expected ':'".into())),
            }
        };
        let need = |i: usize, what: &str| -> Result<&Token, GraphError> {
            toks.get(i).ok_or_else(|| err(end_col, format!("expected {what}")))
        };

        match toks[0].text {
            "vertex" => {
                let id = ident(need(1, "vertex id")?)?;
                expect_colon(2)?;
                let rotation = toks[3..].iter().map(ident).collect::<Result<Vec<_>, _>>()?;
                decl.vertices.push(VertexDecl { id, rotation });
            }
            "edge" => {
                let id = ident(need(1, "edge id")?)?;
                expect_colon(2)?;
                let a = ident(need(3, "two half-edges")?)?;
                let b = ident(need(4, "two half-edges")?)?;
                if let Some(t) = toks.get(5) {
                    return Err(err(t.column, "an edge joins exactly two half-edges".into()));
                }
                decl.edges.push(EdgeDecl { id, ends: [a, b] });
            }
            "external" => {
                let label = ident(need(1, "external label")?)?;
                expect_colon(2)?;
                let h = ident(need(3, "a half-edge")?)?;
                if let Some(t) = toks.get(4) {
                    return Err(err(t.column, "an external leg holds exactly one half-edge".into()));
                }
                decl.externals.push(ExternalDecl { label, half_edge: h });
            }
            "root" => {
                expect_colon(1)?;
                let r = ident(need(2, "root vertex id")?)?;
                if let Some(t) = toks.get(3) {
                    return Err(err(t.column, "unexpected token after root".into()));
                }
                if decl.root.is_some() {
                    return Err(err(toks[0].column, "root declared twice".into()));
                }
                decl.root = Some(r);
            }
            other => {
                return Err(err(toks[0].column, format!("unknown declaration '{other}'")));
            }
        }
    }
    Ok(decl)
}

pub fn parse_graph(text: &str) -> Result<RibbonGraph, GraphError> {
    RibbonGraph::from_decl(&parse_decl(text)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphCatalogEntry {
    pub name: &'static str,
    pub graph: RibbonGraph,
    pub notes: &'static str,
}

const CATALOG: &[(&str, &str, &str)] = &[
    (
        "tadpole_planar",
        "vertex v: h1 h2 h3 h4\nedge l: h1 h2\nexternal k1: h3\nexternal k2: h4\n",
        "planar tadpole: loop joins adjacent slots, both legs in one corner",
    ),
    (
        "tadpole_np",
        "vertex v: h1 h2 h3 h4\nedge l: h1 h3\nexternal k1: h2\nexternal k2: h4\n",
        "non-planar tadpole: loop joins opposite slots, legs on two faces",
    ),
    (
        "bubble_regular",
        "vertex v1: x1 x2 a1 b1\nvertex v2: x3 x4 b2 a2\nedge a: a1 a2\nedge b: b1 b2\n\
         external k1: x1\nexternal k2: x2\nexternal k3: x3\nexternal k4: x4\n",
        "one-loop four-point bubble, single broken face",
    ),
    (
        "fourpoint_irregular",
        "vertex v1: a1 x1 b1 x2\nvertex v2: a2 x3 b2 x4\nedge a: a1 a2\nedge b: b1 b2\n\
         external k1: x1\nexternal k2: x2\nexternal k3: x3\nexternal k4: x4\n",
        "planar four-point bubble with two broken faces; propagators p and p+k1+k2",
    ),
    (
        "sunset_np",
        "vertex v1: a1 b1 c1 x1\nvertex v2: a2 b2 c2 x2\nedge a: a1 a2\nedge b: b1 b2\nedge c: c1 c2\n\
         external k1: x1\nexternal k2: x2\n",
        "two-loop two-point graph with crossed triple of lines, genus 1",
    ),
    (
        "sunset_planar",
        "vertex v1: a1 b1 c1 x1\nvertex v2: c2 b2 a2 x2\nedge a: a1 a2\nedge b: b1 b2\nedge c: c1 c2\n\
         external k1: x1\nexternal k2: x2\n",
        "two-loop planar regular two-point graph",
    ),
    (
        "fourpoint_np",
        "vertex v1: a1 b1 d1 x1\nvertex v2: a2 b2 c2 x2\nvertex v3: c3 d3 x3 x4\n\
         edge a: a1 a2\nedge b: b1 b2\nedge c: c2 c3\nedge d: d3 d1\n\
         external k1: x1\nexternal k2: x2\nexternal k3: x3\nexternal k4: x4\n",
        "two-loop genus-1 four-point graph without divergent subgraphs",
    ),
    (
        "triangle_6pt",
        "vertex v1: a1 c1 x1 x2\nvertex v2: b2 a2 x3 x4\nvertex v3: c3 b3 x5 x6\n\
         edge a: a1 a2\nedge b: b2 b3\nedge c: c3 c1\n\
         external k1: x1\nexternal k2: x2\nexternal k3: x3\nexternal k4: x4\n\
         external k5: x5\nexternal k6: x6\n",
        "one-loop planar six-point triangle",
    ),
];

pub fn catalog_names() -> Vec<&'static str> {
    CATALOG.iter().map(|(n, _, _)| *n).collect()
}

/// Returns an independent copy of a catalog graph.
pub fn catalog_get(name: &str) -> Result<RibbonGraph, GraphError> {
    CATALOG
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, text, _)| parse_graph(text).expect("catalog graphs are valid"))
        .ok_or_else(|| GraphError::UnknownName(name.to_string()))
}

pub fn catalog() -> Vec<GraphCatalogEntry> {
    CATALOG
        .iter()
        .map(|(name, text, notes)| GraphCatalogEntry {
            name,
            graph: parse_graph(text).expect("catalog graphs are valid"),
            notes,
        })
        .collect()
}
