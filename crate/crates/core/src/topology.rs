//! Faces, genus and broken faces of ribbon graphs.
//!
//! Faces are traced on the amputated graph: external half-edges are
//! dropped from the vertex rotations and the face permutation is
//! `φ(h) = σ'(α(h))`, with `α` the line involution and `σ'` the
//! counterclockwise successor among internal half-edges. An external leg
//! sits in the corner right after the internal half-edge that precedes it
//! counterclockwise; the face running through that corner is broken by it.

use std::fmt;

use thiserror::Error;

use crate::graph::RibbonGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("Euler relation gives non-integral or negative genus (n={n}, L={lines}, F={faces})")]
    Euler { n: usize, lines: usize, faces: usize },
}

/// A bare rotation system: the common input of face tracing for graphs and
/// rosettes.
#[derive(Debug, Clone)]
pub struct RotationSystem {
    /// Counterclockwise successor of each half-edge at its vertex.
    pub sigma: Vec<usize>,
    /// Line partner of internal half-edges.
    pub alpha: Vec<Option<usize>>,
    /// External-leg index of external half-edges.
    pub external: Vec<Option<usize>>,
    pub external_labels: Vec<String>,
    pub n_vertices: usize,
}

impl RotationSystem {
    pub fn of_graph(g: &RibbonGraph) -> Self {
        let h = g.n_half_edges();
        let mut external = vec![None; h];
        for (xi, x) in g.externals().iter().enumerate() {
            external[x.half_edge] = Some(xi);
        }
        RotationSystem {
            sigma: (0..h).map(|i| g.next_at_vertex(i)).collect(),
            alpha: (0..h).map(|i| g.partner(i)).collect(),
            external,
            external_labels: g.externals().iter().map(|x| x.label.clone()).collect(),
            n_vertices: g.n_vertices(),
        }
    }

    pub fn n_lines(&self) -> usize {
        self.alpha.iter().filter(|a| a.is_some()).count() / 2
    }

    fn next_internal(&self, h: usize) -> usize {
        let mut s = self.sigma[h];
        while self.alpha[s].is_none() {
            s = self.sigma[s];
        }
        s
    }

    fn prev_internal(&self, x: usize) -> Option<usize> {
        let mut pred = vec![0; self.sigma.len()];
        for (h, &s) in self.sigma.iter().enumerate() {
            pred[s] = h;
        }
        let mut p = pred[x];
        while p != x {
            if self.alpha[p].is_some() {
                return Some(p);
            }
            p = pred[p];
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Internal half-edges in traversal order; each stands for the side
    /// leaving its vertex along the line.
    pub cycle: Vec<usize>,
    pub broken: bool,
    pub external_labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphClass {
    PlanarRegular,
    PlanarIrregular,
    Nonplanar,
}

impl GraphClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            GraphClass::PlanarRegular => "planar_regular",
            GraphClass::PlanarIrregular => "planar_irregular",
            GraphClass::Nonplanar => "nonplanar",
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DivergenceClass {
    RenormalizableDivergent,
    FiniteRenormalization,
    Convergent,
}

impl DivergenceClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            DivergenceClass::RenormalizableDivergent => "renormalizable_divergent",
            DivergenceClass::FiniteRenormalization => "finite_renormalization",
            DivergenceClass::Convergent => "convergent",
        }
    }

    /// Short form used in the classification table.
    pub fn table_label(&self) -> &'static str {
        match self {
            DivergenceClass::RenormalizableDivergent => "ren.",
            DivergenceClass::FiniteRenormalization => "finite ren.",
            DivergenceClass::Convergent => "convergent",
        }
    }
}

impl fmt::Display for DivergenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopologyReport {
    pub n: usize,
    pub n_ext: usize,
    pub lines: usize,
    pub faces: usize,
    pub genus: usize,
    pub broken: usize,
    pub class: GraphClass,
}

impl fmt::Display for TopologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} N={} L={} F={} g={} B={} {}",
            self.n, self.n_ext, self.lines, self.faces, self.genus, self.broken, self.class
        )
    }
}

pub fn trace_rotation_system(rs: &RotationSystem) -> Vec<Face> {
    let h = rs.sigma.len();
    let mut face_of = vec![usize::MAX; h];
    let mut faces: Vec<Face> = Vec::new();
    for start in 0..h {
        if rs.alpha[start].is_none() || face_of[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut cycle = Vec::new();
        let mut cur = start;
        loop {
            face_of[cur] = id;
            cycle.push(cur);
            cur = rs.next_internal(rs.alpha[cur].expect("internal"));
            if cur == start {
                break;
            }
        }
        faces.push(Face {
            cycle,
            broken: false,
            external_labels: Vec::new(),
        });
    }

    if faces.is_empty() {
        // no lines: the bare vertex bounds a single disk
        faces.push(Face {
            cycle: Vec::new(),
            broken: false,
            external_labels: Vec::new(),
        });
    }

    let mut legs: Vec<(usize, usize)> = rs
        .external
        .iter()
        .enumerate()
        .filter_map(|(x, e)| e.map(|xi| (xi, x)))
        .collect();
    legs.sort();
    for (xi, x) in legs {
        let f = match rs.prev_internal(x) {
            Some(g) => face_of[rs.alpha[g].expect("internal")],
            None => 0,
        };
        faces[f].external_labels.push(rs.external_labels[xi].clone());
        faces[f].broken = true;
    }
    faces
}

pub fn trace_faces(g: &RibbonGraph) -> Vec<Face> {
    trace_rotation_system(&RotationSystem::of_graph(g))
}

/// Builds the report from counts; fails if the Euler relation does not give
/// a non-negative integral genus.
pub fn report_from_counts(
    n: usize,
    n_ext: usize,
    lines: usize,
    faces: usize,
    broken: usize,
) -> Result<TopologyReport, TopologyError> {
    let two_minus_2g = n as i64 - lines as i64 + faces as i64;
    let twice_g = 2 - two_minus_2g;
    if twice_g < 0 || twice_g % 2 != 0 {
        return Err(TopologyError::Euler { n, lines, faces });
    }
    let genus = (twice_g / 2) as usize;
    let class = if genus > 0 {
        GraphClass::Nonplanar
    } else if broken >= 2 {
        GraphClass::PlanarIrregular
    } else {
        GraphClass::PlanarRegular
    };
    Ok(TopologyReport {
        n,
        n_ext,
        lines,
        faces,
        genus,
        broken,
        class,
    })
}

pub fn rotation_report(rs: &RotationSystem) -> Result<TopologyReport, TopologyError> {
    let faces = trace_rotation_system(rs);
    let broken = faces.iter().filter(|f| f.broken).count();
    report_from_counts(rs.n_vertices, rs.external_labels.len(), rs.n_lines(), faces.len(), broken)
}

pub fn topology_report(g: &RibbonGraph) -> Result<TopologyReport, TopologyError> {
    rotation_report(&RotationSystem::of_graph(g))
}

/// Lower bound on the superficial degree of convergence: `N − 4` for
/// planar graphs, `N + 4` otherwise.
pub fn superficial_degree_bound(rep: &TopologyReport) -> i64 {
    if rep.genus == 0 {
        rep.n_ext as i64 - 4
    } else {
        rep.n_ext as i64 + 4
    }
}

/// Expected divergence behaviour. Vacuum graphs (N = 0) are grouped with
/// the planar regular ones.
pub fn divergence_class(rep: &TopologyReport) -> DivergenceClass {
    match rep.class {
        GraphClass::Nonplanar => DivergenceClass::Convergent,
        _ if rep.n_ext >= 6 => DivergenceClass::Convergent,
        GraphClass::PlanarRegular => DivergenceClass::RenormalizableDivergent,
        GraphClass::PlanarIrregular if rep.n_ext == 2 => DivergenceClass::FiniteRenormalization,
        GraphClass::PlanarIrregular => DivergenceClass::Convergent,
    }
}

/// Which face each external leg breaks, by leg index.
pub fn external_faces(g: &RibbonGraph) -> Vec<usize> {
    let faces = trace_faces(g);
    g.externals()
        .iter()
        .map(|x| {
            faces
                .iter()
                .position(|f| f.external_labels.contains(&x.label))
                .expect("every leg lies on a face")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{catalog_get, parse_graph};

    fn report(name: &str) -> TopologyReport {
        topology_report(&catalog_get(name).unwrap()).unwrap()
    }

    #[test]
    fn tadpoles() {
        let r = report("tadpole_planar");
        assert_eq!((r.faces, r.genus, r.broken), (2, 0, 1));
        assert_eq!(r.class, GraphClass::PlanarRegular);
        let r = report("tadpole_np");
        assert_eq!((r.faces, r.genus, r.broken), (2, 0, 2));
        assert_eq!(r.class, GraphClass::PlanarIrregular);
        let faces = trace_faces(&catalog_get("tadpole_np").unwrap());
        assert!(faces.iter().all(|f| f.external_labels.len() == 1));
    }

    #[test]
    fn bare_vertex_single_face() {
        let g = parse_graph(
            "vertex v: h1 h2 h3 h4\nexternal k1: h1\nexternal k2: h2\nexternal k3: h3\nexternal k4: h4",
        )
        .unwrap();
        let faces = trace_faces(&g);
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].external_labels, vec!["k1", "k2", "k3", "k4"]);
        let r = topology_report(&g).unwrap();
        assert_eq!((r.faces, r.genus, r.broken), (1, 0, 1));
    }

    #[test]
    fn catalog_classes() {
        let cases = [
            ("bubble_regular", 2, 0, 1),
            ("fourpoint_irregular", 2, 0, 2),
            ("sunset_np", 1, 1, 1),
            ("sunset_planar", 3, 0, 1),
            ("fourpoint_np", 1, 1, 1),
            ("triangle_6pt", 2, 0, 1),
        ];
        for (name, f, g, b) in cases {
            let r = report(name);
            assert_eq!((r.faces, r.genus, r.broken), (f, g, b), "{name}");
        }
    }

    #[test]
    fn degree_bounds_and_classes() {
        let planar2 = report_from_counts(1, 2, 1, 2, 2).unwrap();
        assert_eq!(superficial_degree_bound(&planar2), -2);
        assert_eq!(divergence_class(&planar2), DivergenceClass::FiniteRenormalization);
        let planar4 = report("bubble_regular");
        assert_eq!(superficial_degree_bound(&planar4), 0);
        assert_eq!(divergence_class(&planar4), DivergenceClass::RenormalizableDivergent);
        let np = report("sunset_np");
        assert_eq!(superficial_degree_bound(&np), 6);
        assert_eq!(divergence_class(&np), DivergenceClass::Convergent);
        assert_eq!(divergence_class(&report("fourpoint_irregular")), DivergenceClass::Convergent);
        assert_eq!(divergence_class(&report("triangle_6pt")), DivergenceClass::Convergent);
        assert_eq!(report_from_counts(1, 2, 2, 1, 1).unwrap().genus, 1);
        assert!(report_from_counts(1, 2, 1, 1, 1).is_err());
        assert!(report_from_counts(1, 2, 1, 4, 1).is_err());
    }
}
