//! Combinatorial triangulations of the sphere.
//!
//! A [`Triangulation`] is built from a face list, re-oriented consistently
//! (the first face fixes the global orientation) and equipped with a rotation
//! system: the cyclic order of neighbours around every vertex. The rotation
//! system is what lets us decide on which side of a closed curve a vertex lies.
//!
//! The trivalent polyhedron dual to a triangulation is a [`DualComplex`]; its
//! edges are in bijection with the primal edges.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canonical unordered edge `(min, max)`.
pub type Edge = (usize, usize);

#[inline]
pub fn edge_key(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("the face list is empty")]
    Empty,
    #[error("vertex indices are not dense: index {0} is never used")]
    IndexNotDense(usize),
    #[error("not a manifold: {0}")]
    NotManifold(String),
    #[error("not a sphere: {0}")]
    NotSphere(String),
    #[error("not a simple complex: {0}")]
    NotSimple(String),
    #[error("a triangulation needs more than four vertices, got {0}")]
    TooFewVertices(usize),
    #[error("dual vertex {vertex} has degree {degree}, expected 3")]
    NotTrivalent { vertex: usize, degree: usize },
}

/// The classes of curves named by the admissibility conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// Two edges `[u,v],[v,w]` with `u`, `w` non-adjacent.
    Arc2,
    /// Boundary of a face.
    Face3,
    Separating3,
    Separating4,
    /// Prismatic circuit of the dual complex, with its length.
    Prismatic(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub kind: CurveKind,
    /// Vertices in path / cyclic order.
    pub vertices: Vec<usize>,
    /// Indices into [`Triangulation::edges`], in path / cyclic order.
    pub edges: Vec<usize>,
    /// Number of vertices strictly on each side of a closed curve
    /// (smaller side first). `None` for arcs.
    pub sides: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct Triangulation {
    name: String,
    faces: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    edge_index: HashMap<Edge, usize>,
    edge_faces: Vec<[usize; 2]>,
    rotation: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
    face_adjacency: Vec<[usize; 3]>,
}

impl Triangulation {
    /// Validates a face list and builds the derived structure.
    pub fn new(name: impl Into<String>, faces: &[[usize; 3]]) -> Result<Self, ComplexError> {
        if faces.is_empty() {
            return Err(ComplexError::Empty);
        }
        for f in faces {
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(ComplexError::NotSimple(format!("face {f:?} repeats a vertex")));
            }
        }
        let n = faces.iter().flatten().copied().max().unwrap() + 1;
        let mut used = vec![false; n];
        for &v in faces.iter().flatten() {
            used[v] = true;
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(ComplexError::IndexNotDense(v));
        }
        let mut seen = HashSet::new();
        for f in faces {
            let mut key = *f;
            key.sort_unstable();
            if !seen.insert(key) {
                return Err(ComplexError::NotSimple(format!("face {key:?} appears twice")));
            }
        }

        let mut edge_faces_map: HashMap<Edge, Vec<usize>> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for m in 0..3 {
                edge_faces_map
                    .entry(edge_key(f[m], f[(m + 1) % 3]))
                    .or_default()
                    .push(fi);
            }
        }
        let mut edges: Vec<Edge> = edge_faces_map.keys().copied().collect();
        edges.sort_unstable();
        for e in &edges {
            let c = edge_faces_map[e].len();
            if c != 2 {
                return Err(ComplexError::NotManifold(format!(
                    "edge ({}, {}) lies in {c} faces",
                    e.0, e.1
                )));
            }
        }
        let edge_index: HashMap<Edge, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let edge_faces: Vec<[usize; 2]> = edges
            .iter()
            .map(|e| {
                let v = &edge_faces_map[e];
                [v[0], v[1]]
            })
            .collect();

        let oriented = orient_faces(faces, &edge_index, &edge_faces)?;

        // face_adjacency[f][m] = face across the edge opposite corner m
        let face_adjacency: Vec<[usize; 3]> = oriented
            .iter()
            .enumerate()
            .map(|(fi, f)| {
                let mut adj = [0; 3];
                for (m, slot) in adj.iter_mut().enumerate() {
                    let e = edge_index[&edge_key(f[(m + 1) % 3], f[(m + 2) % 3])];
                    let [a, b] = edge_faces[e];
                    *slot = if a == fi { b } else { a };
                }
                adj
            })
            .collect();

        let (rotation, vertex_faces) = rotation_system(n, &oriented)?;

        let chi = n as i64 - edges.len() as i64 + oriented.len() as i64;
        if chi != 2 {
            return Err(ComplexError::NotSphere(format!("Euler characteristic is {chi}")));
        }
        if n <= 4 {
            return Err(ComplexError::TooFewVertices(n));
        }

        Ok(Self {
            name: name.into(),
            faces: oriented,
            edges,
            edge_index,
            edge_faces,
            rotation,
            vertex_faces,
            face_adjacency,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Faces, consistently oriented.
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Canonical edges, sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.edge_index.contains_key(&edge_key(a, b))
    }

    /// The two faces containing edge `e`.
    pub fn edge_faces(&self, e: usize) -> [usize; 2] {
        self.edge_faces[e]
    }

    /// Cyclic neighbour order around `v`, following the face orientation.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    /// Faces around `v`: entry `t` is the face `(v, nbr[t], nbr[t+1])`.
    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// Neighbouring face across the edge opposite each corner.
    pub fn face_adjacency(&self, f: usize) -> [usize; 3] {
        self.face_adjacency[f]
    }

    pub fn face_index(&self, tri: [usize; 3]) -> Option<usize> {
        let mut key = tri;
        key.sort_unstable();
        self.faces.iter().position(|f| {
            let mut g = *f;
            g.sort_unstable();
            g == key
        })
    }

    /// The boundary of a double tetrahedron: five vertices, two of degree three.
    pub fn is_double_tetrahedron(&self) -> bool {
        self.vertex_count() == 5 && (0..5).filter(|&v| self.degree(v) == 3).count() == 2
    }

    /// All pairs of edges `[u,v],[v,w]` whose endpoints `u`, `w` are distinct
    /// and non-adjacent.
    pub fn arcs2(&self) -> Vec<CurveReport> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            let mut nbrs = self.rotation[v].clone();
            nbrs.sort_unstable();
            for (i, &u) in nbrs.iter().enumerate() {
                for &w in &nbrs[i + 1..] {
                    if !self.is_adjacent(u, w) {
                        out.push(CurveReport {
                            kind: CurveKind::Arc2,
                            vertices: vec![u, v, w],
                            edges: vec![self.edge_index[&edge_key(u, v)], self.edge_index[&edge_key(v, w)]],
                            sides: None,
                        });
                    }
                }
            }
        }
        out
    }

    /// All simple `k`-cycles of the 1-skeleton, each listed once starting at
    /// its smallest vertex.
    pub fn cycles(&self, k: usize) -> Vec<Vec<usize>> {
        assert!(k >= 3, "cycles need at least three edges");
        let mut out = Vec::new();
        let mut path = Vec::with_capacity(k);
        for s in 0..self.vertex_count() {
            path.clear();
            path.push(s);
            self.extend_cycle(s, k, &mut path, &mut out);
        }
        out
    }

    fn extend_cycle(&self, s: usize, k: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if path.len() == k {
            if self.is_adjacent(last, s) && path[1] < path[k - 1] {
                out.push(path.clone());
            }
            return;
        }
        for &w in &self.rotation[last] {
            if w > s && !path.contains(&w) {
                path.push(w);
                self.extend_cycle(s, k, path, out);
                path.pop();
            }
        }
    }

    /// Counts vertices strictly on each side of a simple closed curve by
    /// flood-filling faces without crossing the curve. Smaller side first.
    pub fn cycle_sides(&self, cycle: &[usize]) -> (usize, usize) {
        let k = cycle.len();
        let cut: HashSet<Edge> = (0..k).map(|i| edge_key(cycle[i], cycle[(i + 1) % k])).collect();
        let on_cycle: HashSet<usize> = cycle.iter().copied().collect();
        let mut region = vec![usize::MAX; self.face_count()];
        let mut counts = Vec::new();
        for start in 0..self.face_count() {
            if region[start] != usize::MAX {
                continue;
            }
            let label = counts.len();
            let mut verts = HashSet::new();
            let mut queue = VecDeque::from([start]);
            region[start] = label;
            while let Some(f) = queue.pop_front() {
                let tri = self.faces[f];
                verts.extend(tri.iter().copied().filter(|v| !on_cycle.contains(v)));
                for m in 0..3 {
                    if cut.contains(&edge_key(tri[(m + 1) % 3], tri[(m + 2) % 3])) {
                        continue;
                    }
                    let g = self.face_adjacency[f][m];
                    if region[g] == usize::MAX {
                        region[g] = label;
                        queue.push_back(g);
                    }
                }
            }
            counts.push(verts.len());
        }
        debug_assert_eq!(counts.len(), 2, "a simple cycle cuts the sphere in two");
        let (a, b) = (counts[0], counts.get(1).copied().unwrap_or(0));
        (a.min(b), a.max(b))
    }

    fn closed_curve(&self, kind: CurveKind, cycle: Vec<usize>) -> CurveReport {
        let k = cycle.len();
        let edges = (0..k)
            .map(|i| self.edge_index[&edge_key(cycle[i], cycle[(i + 1) % k])])
            .collect();
        let sides = self.cycle_sides(&cycle);
        CurveReport {
            kind,
            vertices: cycle,
            edges,
            sides: Some(sides),
        }
    }

    /// Face boundaries as closed curves.
    pub fn face_curves(&self) -> Vec<CurveReport> {
        self.faces
            .iter()
            .map(|f| self.closed_curve(CurveKind::Face3, f.to_vec()))
            .collect()
    }

    /// Simple `k`-cycles with at least one vertex strictly on each side.
    pub fn separating_cycles(&self, k: usize) -> Vec<CurveReport> {
        let kind = match k {
            3 => CurveKind::Separating3,
            4 => CurveKind::Separating4,
            _ => panic!("separating cycles are enumerated for k = 3 or 4 only"),
        };
        self.cycles(k)
            .into_iter()
            .map(|c| self.closed_curve(kind, c))
            .filter(|r| r.sides.is_some_and(|(a, _)| a >= 1))
            .collect()
    }
}

/// Propagates the orientation of face 0 to all faces.
fn orient_faces(
    faces: &[[usize; 3]],
    edge_index: &HashMap<Edge, usize>,
    edge_faces: &[[usize; 2]],
) -> Result<Vec<[usize; 3]>, ComplexError> {
    let mut oriented: Vec<Option<[usize; 3]>> = vec![None; faces.len()];
    oriented[0] = Some(faces[0]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        let tri = oriented[f].unwrap();
        for m in 0..3 {
            let (a, b) = (tri[m], tri[(m + 1) % 3]);
            let e = edge_index[&edge_key(a, b)];
            let [g0, g1] = edge_faces[e];
            let g = if g0 == f { g1 } else { g0 };
            // the neighbour must traverse this edge as b -> a
            let wanted = match oriented[g] {
                Some(t) => t,
                None => {
                    let t = faces[g];
                    let fwd = (0..3).any(|i| t[i] == a && t[(i + 1) % 3] == b);
                    let t = if fwd { [t[0], t[2], t[1]] } else { t };
                    oriented[g] = Some(t);
                    queue.push_back(g);
                    t
                }
            };
            if (0..3).any(|i| wanted[i] == a && wanted[(i + 1) % 3] == b) {
                return Err(ComplexError::NotSphere("surface is not orientable".into()));
            }
        }
    }
    oriented
        .into_iter()
        .map(|o| o.ok_or_else(|| ComplexError::NotSphere("face list is disconnected".into())))
        .collect()
}

type Rotation = (Vec<Vec<usize>>, Vec<Vec<usize>>);

fn rotation_system(n: usize, faces: &[[usize; 3]]) -> Result<Rotation, ComplexError> {
    // per vertex: link edges x -> y from faces (v, x, y)
    let mut link: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for (fi, f) in faces.iter().enumerate() {
        for m in 0..3 {
            link[f[m]].push((f[(m + 1) % 3], f[(m + 2) % 3], fi));
        }
    }
    let mut rotation = Vec::with_capacity(n);
    let mut vertex_faces = Vec::with_capacity(n);
    for (v, l) in link.iter().enumerate() {
        let next: HashMap<usize, (usize, usize)> = l.iter().map(|&(x, y, f)| (x, (y, f))).collect();
        if next.len() != l.len() {
            return Err(ComplexError::NotManifold(format!("link of vertex {v} is not a cycle")));
        }
        let start = l.iter().map(|&(x, _, _)| x).min().unwrap();
        let mut nbrs = vec![start];
        let mut fs = Vec::new();
        let mut cur = start;
        loop {
            let (y, f) = next[&cur];
            fs.push(f);
            if y == start {
                break;
            }
            nbrs.push(y);
            cur = y;
            if nbrs.len() > l.len() {
                break;
            }
        }
        if nbrs.len() != l.len() {
            return Err(ComplexError::NotManifold(format!(
                "link of vertex {v} is not a single cycle"
            )));
        }
        rotation.push(nbrs);
        vertex_faces.push(fs);
    }
    Ok((rotation, vertex_faces))
}

/// A trivalent polyhedron given by its faces (cyclic vertex lists).
///
/// Face `v` of the dual corresponds to vertex `v` of the primal triangulation;
/// dual vertex `f` corresponds to primal face `f`.
#[derive(Debug, Clone)]
pub struct DualComplex {
    name: String,
    faces: Vec<Vec<usize>>,
    vertex_count: usize,
    edges: Vec<Edge>,
    edge_index: HashMap<Edge, usize>,
    /// The two dual faces (= primal vertices) on either side of each dual edge.
    edge_faces: Vec<[usize; 2]>,
}

impl DualComplex {
    pub fn new(name: impl Into<String>, faces: Vec<Vec<usize>>) -> Result<Self, ComplexError> {
        if faces.is_empty() {
            return Err(ComplexError::Empty);
        }
        if let Some(f) = faces.iter().find(|f| f.len() < 3) {
            return Err(ComplexError::NotSimple(format!(
                "dual face {f:?} has fewer than 3 vertices"
            )));
        }
        let n = faces.iter().flatten().copied().max().unwrap() + 1;
        let mut degree = vec![0usize; n];
        for f in &faces {
            let distinct: HashSet<_> = f.iter().collect();
            if distinct.len() != f.len() {
                return Err(ComplexError::NotSimple(format!("dual face {f:?} repeats a vertex")));
            }
            for &x in f {
                degree[x] += 1;
            }
        }
        if let Some(v) = degree.iter().position(|&d| d == 0) {
            return Err(ComplexError::IndexNotDense(v));
        }
        if let Some((vertex, &degree)) = degree.iter().enumerate().find(|(_, &d)| d != 3) {
            return Err(ComplexError::NotTrivalent { vertex, degree });
        }
        let mut map: HashMap<Edge, Vec<usize>> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for i in 0..f.len() {
                map.entry(edge_key(f[i], f[(i + 1) % f.len()])).or_default().push(fi);
            }
        }
        let mut edges: Vec<Edge> = map.keys().copied().collect();
        edges.sort_unstable();
        let mut edge_faces = Vec::with_capacity(edges.len());
        for e in &edges {
            let fs = &map[e];
            if fs.len() != 2 {
                return Err(ComplexError::NotManifold(format!(
                    "dual edge ({}, {}) lies in {} faces",
                    e.0,
                    e.1,
                    fs.len()
                )));
            }
            edge_faces.push([fs[0], fs[1]]);
        }
        let edge_index = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(Self {
            name: name.into(),
            faces,
            vertex_count: n,
            edges,
            edge_index,
            edge_faces,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    /// The primal edge crossed by dual edge `e`.
    pub fn primal_edge(&self, e: usize) -> Edge {
        let [a, b] = self.edge_faces[e];
        edge_key(a, b)
    }
}

/// Faces of `T` become vertices, vertices of `T` become faces.
pub fn dualize(t: &Triangulation) -> DualComplex {
    let faces = (0..t.vertex_count()).map(|v| t.vertex_faces(v).to_vec()).collect();
    DualComplex::new(t.name(), faces).expect("the dual of a sphere triangulation is trivalent")
}

/// Inverse of [`dualize`]: the triangulation whose face `f` joins the three
/// dual faces meeting at dual vertex `f`.
pub fn primalize(p: &DualComplex) -> Result<Triangulation, ComplexError> {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); p.vertex_count()];
    for (fi, f) in p.faces().iter().enumerate() {
        for &x in f {
            incident[x].push(fi);
        }
    }
    let mut tris = Vec::with_capacity(incident.len());
    for (vertex, inc) in incident.iter().enumerate() {
        if inc.len() != 3 {
            return Err(ComplexError::NotTrivalent {
                vertex,
                degree: inc.len(),
            });
        }
        tris.push([inc[0], inc[1], inc[2]]);
    }
    Triangulation::new(p.name(), &tris)
}

/// Prismatic `k`-circuits: `k`-cycles of the primal 1-skeleton whose crossed
/// dual edges have `2k` pairwise distinct endpoints.
pub fn prismatic_circuits(p: &DualComplex, k: usize) -> Result<Vec<CurveReport>, ComplexError> {
    let t = primalize(p)?;
    Ok(prismatic_circuits_of(&t, k))
}

/// Prismatic circuits computed on the primal side.
pub fn prismatic_circuits_of(t: &Triangulation, k: usize) -> Vec<CurveReport> {
    t.cycles(k)
        .into_iter()
        .filter(|c| {
            let mut ends = HashSet::new();
            (0..k).all(|i| {
                let e = t.edge_id(c[i], c[(i + 1) % k]).unwrap();
                let [f, g] = t.edge_faces(e);
                ends.insert(f) && ends.insert(g)
            })
        })
        .map(|c| t.closed_curve(CurveKind::Prismatic(k), c))
        .collect()
}
