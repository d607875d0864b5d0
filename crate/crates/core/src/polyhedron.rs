//! From a circle pattern to the hyperbolic polyhedron it bounds, in the
//! hyperboloid model of H³.
//!
//! Each cap `D(v)` determines the plane whose ideal boundary is `∂D(v)`; the
//! half-space `H(v)` is the side facing away from the cap. The polyhedron is
//! the intersection of these half-spaces.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::AngleAssignment;
use crate::complex::Triangulation;
use crate::solver::Configuration;
use crate::sphere_geom::{face_angles_admissible, Cap, SphPoint};
use crate::verify;

/// Incidence and convexity tolerance.
pub const INCIDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PolyhedronError {
    #[error("cap radius {0} gives no plane")]
    DegenerateCap(f64),
    #[error("Gram matrix of face {0} is not positive definite")]
    NotPositiveDefinite(usize),
    #[error("vertex {vertex} lies outside the half-space of plane {plane} by {excess}")]
    ConvexityViolation { vertex: usize, plane: usize, excess: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("refusing to export an empty polyhedron")]
    Empty,
    #[error("malformed OFF: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A vector of R^{3,1} with form `x·x' + y·y' + z·z' − t·t'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct MinkowskiVec {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl From<[f64; 4]> for MinkowskiVec {
    fn from([x, y, z, t]: [f64; 4]) -> Self {
        Self { x, y, z, t }
    }
}

impl From<MinkowskiVec> for [f64; 4] {
    fn from(v: MinkowskiVec) -> Self {
        [v.x, v.y, v.z, v.t]
    }
}

impl MinkowskiVec {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { x, y, z, t }
    }

    pub fn inner(&self, o: &MinkowskiVec) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z - self.t * o.t
    }

    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    /// Klein-model coordinates `(x, y, z) / t`.
    pub fn klein(&self) -> [f64; 3] {
        [self.x / self.t, self.y / self.t, self.z / self.t]
    }
}

/// Unit spacelike normal `(p, cos ρ) / sin ρ` of the plane bounded by the cap's
/// circle.
pub fn plane_normal(c: &Cap) -> Result<MinkowskiVec, PolyhedronError> {
    let s = c.radius.sin();
    if !(c.radius > 0.0 && c.radius < PI) || s <= 0.0 {
        return Err(PolyhedronError::DegenerateCap(c.radius));
    }
    let p = c.center.vec() / s;
    Ok(MinkowskiVec::new(p.x, p.y, p.z, c.radius.cos() / s))
}

/// Gram matrix of three planes meeting at angles `[θ_i, θ_j, θ_k]`, where
/// `θ_i` is the angle between the planes other than the `i`-th.
pub fn gram(theta: [f64; 3]) -> Matrix3<f64> {
    let [ci, cj, ck] = theta.map(|x| -x.cos());
    Matrix3::new(1.0, ck, cj, ck, 1.0, ci, cj, ci, 1.0)
}

/// `−4 cos((θi+θj+θk)/2) cos((θi+θj−θk)/2) cos((θj+θk−θi)/2) cos((θk+θi−θj)/2)`.
pub fn det_closed_form(theta: [f64; 3]) -> f64 {
    let [a, b, c] = theta;
    -4.0 * ((a + b + c) / 2.0).cos() * ((a + b - c) / 2.0).cos() * ((b + c - a) / 2.0).cos() * ((c + a - b) / 2.0).cos()
}

/// Sylvester's criterion on the leading principal minors.
pub fn is_positive_definite(m: &Matrix3<f64>) -> bool {
    let m1 = m[(0, 0)];
    let m2 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    m1 > 0.0 && m2 > 0.0 && m.determinant() > 0.0
}

pub fn gram_of(n: [&MinkowskiVec; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|r, c| n[r].inner(n[c]))
}

/// The point of H³ on all three planes.
pub fn face_vertex(ni: &MinkowskiVec, nj: &MinkowskiVec, nk: &MinkowskiVec) -> Result<MinkowskiVec, PolyhedronError> {
    if !is_positive_definite(&gram_of([ni, nj, nk])) {
        return Err(PolyhedronError::NotPositiveDefinite(usize::MAX));
    }
    // (k, 1) is on the planes iff k·n_spatial = n_t for each normal
    let a = Matrix3::from_rows(&[
        ni.spatial().transpose(),
        nj.spatial().transpose(),
        nk.spatial().transpose(),
    ]);
    let b = Vector3::new(ni.t, nj.t, nk.t);
    let k = a
        .lu()
        .solve(&b)
        .ok_or(PolyhedronError::NotPositiveDefinite(usize::MAX))?;
    let rest = 1.0 - k.norm_squared();
    if rest <= 0.0 {
        return Err(PolyhedronError::NotPositiveDefinite(usize::MAX));
    }
    let t = 1.0 / rest.sqrt();
    Ok(MinkowskiVec::new(k.x * t, k.y * t, k.z * t, t))
}

fn to_vec4(v: &MinkowskiVec) -> Vector4<f64> {
    Vector4::new(v.x, v.y, v.z, v.t)
}

pub fn lorentz_apply(l: &Matrix4<f64>, v: &MinkowskiVec) -> MinkowskiVec {
    let w = l * to_vec4(v);
    MinkowskiVec::new(w.x, w.y, w.z, w.w)
}

/// Lorentz boost taking the future unit timelike `c` to `(0, 0, 0, 1)`.
pub fn boost_to_origin(c: &MinkowskiVec) -> Matrix4<f64> {
    let u = -c.spatial();
    let k = 1.0 / (1.0 + c.t);
    let mut l = Matrix4::identity();
    for r in 0..3 {
        for s in 0..3 {
            l[(r, s)] += u[r] * u[s] * k;
        }
        l[(r, 3)] = u[r];
        l[(3, r)] = u[r];
    }
    l[(3, 3)] = c.t;
    l
}

/// Inverse of [`plane_normal`].
pub fn cap_of_normal(n: &MinkowskiVec) -> Cap {
    let a = n.spatial();
    let norm = a.norm();
    Cap {
        center: SphPoint::new(a / norm).expect("spacelike normal"),
        radius: 1f64.atan2(n.t),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicPolyhedron {
    /// One plane per vertex of the triangulation.
    pub face_normals: Vec<MinkowskiVec>,
    /// One point per face of the triangulation.
    pub vertices: Vec<MinkowskiVec>,
    /// Per plane, the polygon's vertices in rotation order.
    pub face_cycles: Vec<Vec<usize>>,
    /// Per triangulation edge, the two polyhedron vertices it separates.
    pub edges: Vec<[usize; 2]>,
    pub dihedral_angles: Vec<f64>,
    pub target_angles: Vec<f64>,
}

impl HyperbolicPolyhedron {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.face_cycles.len(), self.edges.len())
    }

    pub fn klein_vertices(&self) -> Vec<[f64; 3]> {
        self.vertices.iter().map(MinkowskiVec::klein).collect()
    }

    pub fn dihedral_max_error(&self) -> f64 {
        self.dihedral_angles
            .iter()
            .zip(&self.target_angles)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `⟨q, n_w⟩` over vertices `q` and planes `w` not through them.
    pub fn convexity_slack(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (f, q) in self.vertices.iter().enumerate() {
            for (w, n) in self.face_normals.iter().enumerate() {
                if !self.face_cycles[w].contains(&f) {
                    worst = worst.max(q.inner(n));
                }
            }
        }
        worst
    }

    /// Hyperboloid centroid of the vertices.
    pub fn centroid(&self) -> MinkowskiVec {
        let s = self.vertices.iter().fold(Vector4::zeros(), |acc, q| acc + to_vec4(q));
        let m = MinkowskiVec::from([s.x, s.y, s.z, s.w]);
        let norm = (-m.inner(&m)).sqrt();
        MinkowskiVec::new(m.x / norm, m.y / norm, m.z / norm, m.t / norm)
    }

    /// The isometric copy whose vertex centroid is the origin of the Klein ball.
    pub fn centered(&self) -> HyperbolicPolyhedron {
        let c = self.centroid();
        let l = boost_to_origin(&c);
        let map = |v: &MinkowskiVec| lorentz_apply(&l, v);
        HyperbolicPolyhedron {
            face_normals: self.face_normals.iter().map(map).collect(),
            vertices: self.vertices.iter().map(map).collect(),
            ..self.clone()
        }
    }

    /// Caps whose circles bound the face planes.
    pub fn caps(&self) -> Vec<Cap> {
        self.face_normals.iter().map(cap_of_normal).collect()
    }

    /// Number of planes through each vertex.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for cycle in &self.face_cycles {
            for &f in cycle {
                deg[f] += 1;
            }
        }
        deg
    }
}

/// Builds the polyhedron of a verified pattern.
pub fn build_polyhedron(
    t: &Triangulation,
    cfg: &Configuration,
    theta: &AngleAssignment,
) -> Result<HyperbolicPolyhedron, PolyhedronError> {
    let contact = verify::check_contact_graph(t, cfg);
    if !contact.pass {
        return Err(PolyhedronError::PreconditionViolated(format!(
            "contact graph has {} violations",
            contact.violations.len()
        )));
    }
    let cr = verify::check_condition_cr(t, cfg);
    if !cr.pass {
        let bad: Vec<_> = cr
            .cycles
            .iter()
            .filter(|c| !c.empty)
            .map(|c| c.vertices.clone())
            .collect();
        return Err(PolyhedronError::PreconditionViolated(format!(
            "caps of separating triangles {bad:?} share a point"
        )));
    }
    if theta.edges() != t.edges() {
        return Err(PolyhedronError::PreconditionViolated(
            "angles are for a different complex".into(),
        ));
    }
    let e = |u, v| t.edge_id(u, v).expect("face edge");
    for (f, &[i, j, k]) in t.faces().iter().enumerate() {
        let th = [theta.get(e(i, j)), theta.get(e(j, k)), theta.get(e(k, i))];
        if !face_angles_admissible(th) {
            return Err(PolyhedronError::PreconditionViolated(format!("face {f} angles {th:?}")));
        }
    }

    let normals = cfg.caps.iter().map(plane_normal).collect::<Result<Vec<_>, _>>()?;
    let mut vertices = Vec::with_capacity(t.face_count());
    for (f, &[i, j, k]) in t.faces().iter().enumerate() {
        let q = face_vertex(&normals[i], &normals[j], &normals[k]).map_err(|err| match err {
            PolyhedronError::NotPositiveDefinite(_) => PolyhedronError::NotPositiveDefinite(f),
            other => other,
        })?;
        for v in [i, j, k] {
            let off = q.inner(&normals[v]).abs();
            if off > INCIDENCE_TOL {
                return Err(PolyhedronError::ConvexityViolation {
                    vertex: f,
                    plane: v,
                    excess: off,
                });
            }
        }
        for (w, n) in normals.iter().enumerate() {
            if w == i || w == j || w == k {
                continue;
            }
            let excess = q.inner(n);
            if excess > INCIDENCE_TOL {
                return Err(PolyhedronError::ConvexityViolation {
                    vertex: f,
                    plane: w,
                    excess,
                });
            }
        }
        vertices.push(q);
    }
    let face_cycles = (0..t.vertex_count()).map(|v| t.vertex_faces(v).to_vec()).collect();
    let edges = (0..t.edge_count()).map(|e| t.edge_faces(e)).collect();
    let dihedral_angles = t
        .edges()
        .iter()
        .map(|&(u, v)| (-normals[u].inner(&normals[v])).clamp(-1.0, 1.0).acos())
        .collect();
    Ok(HyperbolicPolyhedron {
        face_normals: normals,
        vertices,
        face_cycles,
        edges,
        dihedral_angles,
        target_angles: theta.values().to_vec(),
    })
}

/// OFF text with Klein-model coordinates. Floats use the shortest
/// representation that parses back to the same value.
pub fn off_string(q: &HyperbolicPolyhedron) -> Result<String, PolyhedronError> {
    if q.vertices.is_empty() || q.face_cycles.is_empty() {
        return Err(PolyhedronError::Empty);
    }
    let (v, f, e) = q.counts();
    let mut out = format!("OFF\n{v} {f} {e}\n");
    for [x, y, z] in q.klein_vertices() {
        writeln!(out, "{x:?} {y:?} {z:?}").expect("write to string");
    }
    for cycle in &q.face_cycles {
        write!(out, "{}", cycle.len()).expect("write to string");
        for i in cycle {
            write!(out, " {i}").expect("write to string");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn export_off(q: &HyperbolicPolyhedron, path: &Path) -> Result<(), PolyhedronError> {
    std::fs::write(path, off_string(q)?)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
    pub edge_count: usize,
}

pub fn parse_off(text: &str) -> Result<OffMesh, PolyhedronError> {
    let bad = |m: &str| PolyhedronError::Parse(m.to_string());
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    if lines.next() != Some("OFF") {
        return Err(bad("missing OFF header"));
    }
    let counts: Vec<usize> = lines
        .next()
        .ok_or_else(|| bad("missing counts"))?
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| bad("bad count")))
        .collect::<Result<_, _>>()?;
    let [nv, nf, ne] = counts[..] else {
        return Err(bad("expected three counts"));
    };
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let xs: Vec<f64> = lines
            .next()
            .ok_or_else(|| bad("missing vertex"))?
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| bad("bad coordinate")))
            .collect::<Result<_, _>>()?;
        let [x, y, z] = xs[..] else {
            return Err(bad("vertex needs three coordinates"));
        };
        vertices.push([x, y, z]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let xs: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing face"))?
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| bad("bad index")))
            .collect::<Result<_, _>>()?;
        let (&k, idx) = xs.split_first().ok_or_else(|| bad("empty face"))?;
        if idx.len() != k || idx.iter().any(|&i| i >= nv) {
            return Err(bad("face index list does not match"));
        }
        faces.push(idx.to_vec());
    }
    Ok(OffMesh {
        vertices,
        faces,
        edge_count: ne,
    })
}
