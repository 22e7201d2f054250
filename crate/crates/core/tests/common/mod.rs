#![allow(dead_code)]

use std::collections::HashMap;

use ncphi4::graph::{EdgeDecl, ExternalDecl, VertexDecl};
use ncphi4::GraphDecl;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (F, g, B) by walking corners of the declaration directly.
///
/// Corner `(v, i)` sits between rotation slots `i` and `i+1` and is left
/// through slot `i+1`. Through a line the walk lands in the corner that
/// starts at the partner slot; through a leg it stays at the vertex and
/// moves one corner on, marking the face broken.
pub fn corner_oracle(decl: &GraphDecl) -> (usize, usize, usize) {
    let mut slot: HashMap<&str, (usize, usize)> = HashMap::new();
    for (v, vd) in decl.vertices.iter().enumerate() {
        for (i, h) in vd.rotation.iter().enumerate() {
            slot.insert(h.as_str(), (v, i));
        }
    }
    let mut partner: HashMap<&str, &str> = HashMap::new();
    for e in &decl.edges {
        partner.insert(e.ends[0].as_str(), e.ends[1].as_str());
        partner.insert(e.ends[1].as_str(), e.ends[0].as_str());
    }
    let n = decl.vertices.len();
    let mut seen = vec![[false; 4]; n];
    let (mut faces, mut broken) = (0, 0);
    for v0 in 0..n {
        for i0 in 0..4 {
            if seen[v0][i0] {
                continue;
            }
            faces += 1;
            let mut is_broken = false;
            let (mut v, mut i) = (v0, i0);
            while !seen[v][i] {
                seen[v][i] = true;
                let out = decl.vertices[v].rotation[(i + 1) % 4].as_str();
                match partner.get(out) {
                    Some(p) => (v, i) = slot[p],
                    None => {
                        is_broken = true;
                        i = (i + 1) % 4;
                    }
                }
            }
            if is_broken {
                broken += 1;
            }
        }
    }
    let chi = n as i64 - decl.edges.len() as i64 + faces as i64;
    let g2 = 2 - chi;
    assert!(g2 >= 0 && g2 % 2 == 0, "odd Euler characteristic {chi}");
    (faces, (g2 / 2) as usize, broken)
}

/// Connected φ⁴ ribbon graph with `n` vertices and `n_ext` legs (`4n − n_ext`
/// even and ≥ 2(n−1)), random rotations and pairings.
pub fn random_decl(n: usize, n_ext: usize, seed: u64) -> GraphDecl {
    assert!((4 * n - n_ext) % 2 == 0 && 4 * n - n_ext >= 2 * (n - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut free: Vec<Vec<String>> = (0..n)
        .map(|v| (0..4).map(|j| format!("h{v}_{j}")).collect())
        .collect();
    let mut rotations = free.clone();
    for r in rotations.iter_mut() {
        r.shuffle(&mut rng);
    }
    for f in free.iter_mut() {
        f.shuffle(&mut rng);
    }
    let mut edges = Vec::new();
    // spanning tree first, so the graph is connected
    for v in 1..n {
        let mut u = rng.random_range(0..v);
        while free[u].is_empty() {
            u = (u + 1) % v;
        }
        let a = free[u].pop().unwrap();
        let b = free[v].pop().unwrap();
        edges.push([a, b]);
    }
    let mut rest: Vec<String> = free.into_iter().flatten().collect();
    rest.shuffle(&mut rng);
    let n_lines = (4 * n - n_ext) / 2;
    while edges.len() < n_lines {
        let a = rest.pop().unwrap();
        let b = rest.pop().unwrap();
        edges.push([a, b]);
    }
    GraphDecl {
        vertices: rotations
            .into_iter()
            .enumerate()
            .map(|(v, rotation)| VertexDecl { id: format!("v{v}"), rotation })
            .collect(),
        edges: edges
            .into_iter()
            .enumerate()
            .map(|(i, ends)| EdgeDecl { id: format!("e{i}"), ends })
            .collect(),
        externals: rest
            .into_iter()
            .enumerate()
            .map(|(i, half_edge)| ExternalDecl { label: format!("k{}", i + 1), half_edge })
            .collect(),
        root: None,
    }
}
