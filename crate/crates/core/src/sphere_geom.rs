//! Spherical metric primitives, inversive distance, and the three-circle
//! configuration with its realizability certificate.
//!
//! Caps are stored with unit-vector centres. All `acos` arguments are clamped
//! to `[-1, 1]`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

/// Default tangency tolerance (radians).
pub const EPS_TAN: f64 = 1e-9;
/// Closed-cap membership slack used when testing computed points.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("cannot normalise a zero vector")]
    ZeroVector,
    #[error("cap radius {0} is outside (0, pi)")]
    InvalidRadius(f64),
    #[error("caps do not overlap (inversive distance {0} >= 1)")]
    NotOverlapping(f64),
    #[error("one cap engulfs the other (inversive distance {0} <= -1)")]
    Engulfing(f64),
    #[error("degenerate edge length: acos argument {0} outside (-1, 1)")]
    DegenerateLength(f64),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("the two boundary circles coincide")]
    CoincidentBoundaries,
}

#[inline]
pub fn clamped_acos(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).acos()
}

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "[f64; 3]")]
pub struct SphPoint(Vec3);

impl SphPoint {
    pub fn new(v: Vec3) -> Result<Self, GeomError> {
        let n = v.norm();
        if !n.is_finite() || n <= 0.0 {
            return Err(GeomError::ZeroVector);
        }
        Ok(Self(v / n))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self, GeomError> {
        Self::new(Vec3::new(x, y, z))
    }

    pub fn vec(&self) -> Vec3 {
        self.0
    }

    pub fn dot(&self, other: &SphPoint) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    /// Point reached by walking the geodesic from `self` with unit initial
    /// tangent `dir` for arc length `angle`.
    pub fn walk(&self, dir: &Vec3, angle: f64) -> SphPoint {
        SphPoint(self.0 * angle.cos() + dir * angle.sin())
    }
}

impl From<SphPoint> for [f64; 3] {
    fn from(p: SphPoint) -> Self {
        p.to_array()
    }
}

impl TryFrom<[f64; 3]> for SphPoint {
    type Error = GeomError;
    fn try_from(a: [f64; 3]) -> Result<Self, Self::Error> {
        SphPoint::from_xyz(a[0], a[1], a[2])
    }
}

/// A closed spherical cap (disk) with radius in `(0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: SphPoint,
    pub radius: f64,
}

impl Cap {
    pub fn new(center: SphPoint, radius: f64) -> Result<Self, GeomError> {
        if !(radius > 0.0 && radius < PI) {
            return Err(GeomError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    /// Closed-cap membership with slack `tol`.
    pub fn contains(&self, p: &SphPoint, tol: f64) -> bool {
        sph_dist(&self.center, p) <= self.radius + tol
    }

    /// Some point of the boundary circle.
    pub fn boundary_point(&self) -> SphPoint {
        let (e1, _) = tangent_basis(&self.center);
        self.center.walk(&e1, self.radius)
    }
}

/// Deterministic orthonormal basis of the tangent plane at `p`, built from the
/// coordinate axis least aligned with `p`.
pub fn tangent_basis(p: &SphPoint) -> (Vec3, Vec3) {
    let v = p.vec();
    let a = v.map(f64::abs);
    let axis = if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = axis.cross(&v).normalize();
    let e2 = v.cross(&e1);
    (e1, e2)
}

/// Great-circle distance, accurate near 0 and π.
pub fn sph_dist(p: &SphPoint, q: &SphPoint) -> f64 {
    p.0.cross(&q.0).norm().atan2(p.dot(q))
}

/// `(cos ρa cos ρb − cos d) / (sin ρa sin ρb)`.
pub fn inversive_distance(a: &Cap, b: &Cap) -> f64 {
    let c = a.center.dot(&b.center).clamp(-1.0, 1.0);
    (a.radius.cos() * b.radius.cos() - c) / (a.radius.sin() * b.radius.sin())
}

/// `acos` of the inversive distance, for overlapping caps.
pub fn overlap_angle(a: &Cap, b: &Cap) -> Result<f64, GeomError> {
    let i = inversive_distance(a, b);
    if i >= 1.0 {
        return Err(GeomError::NotOverlapping(i));
    }
    if i <= -1.0 {
        return Err(GeomError::Engulfing(i));
    }
    Ok(i.acos())
}

/// Distance between the centres of two caps with radii `ri`, `rj` meeting at
/// overlap angle `theta`.
pub fn edge_length(ri: f64, rj: f64, theta: f64) -> Result<f64, GeomError> {
    let arg = ri.cos() * rj.cos() - theta.cos() * ri.sin() * rj.sin();
    if !(arg > -1.0 && arg < 1.0) {
        return Err(GeomError::DegenerateLength(arg));
    }
    Ok(arg.acos())
}

/// The inequalities a face triple of overlap angles must satisfy:
/// total above π and every pairwise sum below the third plus π.
pub fn face_angles_admissible(theta: [f64; 3]) -> bool {
    let [a, b, c] = theta;
    a + b + c > PI && a + b < c + PI && b + c < a + PI && c + a < b + PI
}

/// `sin²l_ij sin²l_jk − (cos l_ij cos l_jk − cos l_ki)²` for lengths
/// `[l_ij, l_jk, l_ki]`.
pub fn triangle_quantity(l: [f64; 3]) -> f64 {
    let [a, b, c] = l;
    let t = a.cos() * b.cos() - c.cos();
    a.sin().powi(2) * b.sin().powi(2) - t * t
}

/// Four-sine product form of [`triangle_quantity`].
pub fn triangle_quantity_product(l: [f64; 3]) -> f64 {
    let [a, b, c] = l;
    4.0 * ((a + b + c) / 2.0).sin() * ((a + b - c) / 2.0).sin() * ((b + c - a) / 2.0).sin() * ((c + a - b) / 2.0).sin()
}

/// `1 − cos²Θ_ij − cos²Θ_jk − cos²Θ_ki − 2 cosΘ_ij cosΘ_jk cosΘ_ki`.
pub fn zeta(theta: [f64; 3]) -> f64 {
    let [a, b, c] = theta.map(f64::cos);
    1.0 - a * a - b * b - c * c - 2.0 * a * b * c
}

/// Four-cosine product form of [`zeta`].
pub fn zeta_product(theta: [f64; 3]) -> f64 {
    let [a, b, c] = theta;
    -4.0 * ((a + b + c) / 2.0).cos() * ((a + b - c) / 2.0).cos() * ((b + c - a) / 2.0).cos() * ((c + a - b) / 2.0).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizabilityCertificate {
    /// `[l_ij, l_jk, l_ki]`.
    pub lengths: [f64; 3],
    /// Must be positive for a non-degenerate spherical triangle.
    pub triangle_quantity: f64,
    pub zeta: f64,
    /// Pairwise triangle inequalities and perimeter below 2π.
    pub triangle_inequalities: bool,
}

/// Radii `[r_i, r_j, r_k]`, angles `[Θ_ij, Θ_jk, Θ_ki]`.
pub fn tri_realizable(r: [f64; 3], theta: [f64; 3]) -> Result<RealizabilityCertificate, GeomError> {
    if let Some(x) = r.iter().find(|&&x| !(x > 0.0 && x < PI)) {
        return Err(GeomError::PreconditionViolated(format!("radius {x} outside (0, pi)")));
    }
    if !face_angles_admissible(theta) {
        return Err(GeomError::PreconditionViolated(format!(
            "angles {theta:?} fail the face inequalities"
        )));
    }
    let lengths = [
        edge_length(r[0], r[1], theta[0])?,
        edge_length(r[1], r[2], theta[1])?,
        edge_length(r[2], r[0], theta[2])?,
    ];
    let [a, b, c] = lengths;
    Ok(RealizabilityCertificate {
        lengths,
        triangle_quantity: triangle_quantity(lengths),
        zeta: zeta(theta),
        triangle_inequalities: a + b > c && b + c > a && c + a > b && a + b + c < 2.0 * PI,
    })
}

/// Canonical placement of three caps meeting at prescribed angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeCircleLayout {
    pub radii: [f64; 3],
    /// `[Θ_ij, Θ_jk, Θ_ki]`.
    pub angles: [f64; 3],
    /// `[l_ij, l_jk, l_ki]`.
    pub lengths: [f64; 3],
    pub centers: [SphPoint; 3],
    /// Inner angles of the centre triangle at `i`, `j`, `k`.
    pub inner_angles: [f64; 3],
}

impl ThreeCircleLayout {
    pub fn caps(&self) -> [Cap; 3] {
        [0, 1, 2].map(|m| Cap {
            center: self.centers[m],
            radius: self.radii[m],
        })
    }

    /// Inner angle sum minus π.
    pub fn excess(&self) -> f64 {
        self.inner_angles.iter().sum::<f64>() - PI
    }
}

fn corner_angle(opposite: f64, s1: f64, s2: f64) -> f64 {
    clamped_acos((opposite.cos() - s1.cos() * s2.cos()) / (s1.sin() * s2.sin()))
}

/// `p_i` at the north pole, `p_j` on the meridian `y = 0, x ≥ 0`, `p_k` with
/// positive `y`.
pub fn layout3(r: [f64; 3], theta: [f64; 3]) -> Result<ThreeCircleLayout, GeomError> {
    let cert = tri_realizable(r, theta)?;
    if !cert.triangle_inequalities {
        return Err(GeomError::PreconditionViolated("centre triangle is degenerate".into()));
    }
    let [lij, ljk, lki] = cert.lengths;
    let ai = corner_angle(ljk, lij, lki);
    let aj = corner_angle(lki, lij, ljk);
    let ak = corner_angle(lij, ljk, lki);
    let pi_ = SphPoint(Vec3::z());
    let pj = SphPoint(Vec3::new(lij.sin(), 0.0, lij.cos()));
    let pk = SphPoint(Vec3::new(lki.sin() * ai.cos(), lki.sin() * ai.sin(), lki.cos()));
    Ok(ThreeCircleLayout {
        radii: r,
        angles: theta,
        lengths: cert.lengths,
        centers: [pi_, pj, pk],
        inner_angles: [ai, aj, ak],
    })
}

/// Area of a spherical triangle from its side lengths (l'Huilier).
pub fn lhuilier_area(l: [f64; 3]) -> f64 {
    let [a, b, c] = l;
    let s = (a + b + c) / 2.0;
    let t = (s / 2.0).tan() * ((s - a) / 2.0).tan() * ((s - b) / 2.0).tan() * ((s - c) / 2.0).tan();
    4.0 * t.max(0.0).sqrt().atan()
}

/// Signed area of the geodesic triangle `abc`; positive when `abc` is
/// counter-clockwise seen from outside the sphere.
pub fn signed_area(a: &SphPoint, b: &SphPoint, c: &SphPoint) -> f64 {
    let (a, b, c) = (a.vec(), b.vec(), c.vec());
    let det = a.dot(&b.cross(&c));
    let den = 1.0 + a.dot(&b) + b.dot(&c) + c.dot(&a);
    2.0 * det.atan2(den)
}

/// Intersection of the two boundary circles: zero, one (tangency within
/// `eps_tan`) or two points.
pub fn circle_intersection_points(a: &Cap, b: &Cap, eps_tan: f64) -> Result<Vec<SphPoint>, GeomError> {
    let p = a.center.vec();
    let q = b.center.vec();
    let c = p.dot(&q).clamp(-1.0, 1.0);
    let d = c.acos();
    let (ra, rb) = (a.radius, b.radius);
    let cross = p.cross(&q);
    let sin_d = cross.norm();

    let same_axis = sin_d < 1e-15;
    if same_axis {
        let coincident = if c > 0.0 {
            (ra - rb).abs() <= eps_tan
        } else {
            (ra + rb - PI).abs() <= eps_tan
        };
        if coincident {
            return Err(GeomError::CoincidentBoundaries);
        }
    }

    let tangent = (d - (ra + rb)).abs() <= eps_tan
        || (d - (ra - rb).abs()).abs() <= eps_tan
        || (d - (2.0 * PI - ra - rb)).abs() <= eps_tan;
    if tangent {
        // the contact point lies on the great circle through both centres
        let dir = if same_axis {
            tangent_basis(&a.center).0
        } else {
            (q - p * c).normalize()
        };
        let candidates = [a.center.walk(&dir, ra), a.center.walk(&dir, -ra)];
        let err = |x: &SphPoint| (sph_dist(x, &b.center) - rb).abs();
        let best = if err(&candidates[0]) <= err(&candidates[1]) {
            candidates[0]
        } else {
            candidates[1]
        };
        return Ok(vec![best]);
    }
    if same_axis {
        return Ok(Vec::new());
    }

    let one_minus = 1.0 - c * c;
    let alpha = (ra.cos() - c * rb.cos()) / one_minus;
    let beta = (rb.cos() - c * ra.cos()) / one_minus;
    let base = p * alpha + q * beta;
    let rest = 1.0 - base.norm_squared();
    if rest <= 0.0 {
        return Ok(Vec::new());
    }
    let gamma = rest.sqrt() / sin_d;
    Ok(vec![
        SphPoint::new(base + cross * gamma)?,
        SphPoint::new(base - cross * gamma)?,
    ])
}

/// A point common to all closed caps, if there is one.
///
/// If the intersection `K` is non-empty, a boundary point of `K` either lies
/// on two boundary circles (a pairwise intersection point), or the whole
/// circle through it lies in `K`. So it suffices to test the pairwise
/// intersection points and one point of each circle.
pub fn common_point(caps: &[Cap]) -> Option<SphPoint> {
    let in_all = |x: &SphPoint| caps.iter().all(|k| k.contains(x, MEMBERSHIP_TOL));
    let mut inside = Vec::new();
    for m in 0..caps.len() {
        for n in m + 1..caps.len() {
            if let Ok(pts) = circle_intersection_points(&caps[m], &caps[n], EPS_TAN) {
                inside.extend(pts.into_iter().filter(in_all));
            }
        }
    }
    if inside.is_empty() {
        inside.extend(caps.iter().map(|k| k.boundary_point()).filter(in_all));
    }
    let first = *inside.first()?;
    // prefer a more central witness when the mean of the hits stays inside
    let mean: Vec3 = inside.iter().map(|p| p.vec()).sum();
    Some(match SphPoint::new(mean) {
        Ok(m) if in_all(&m) => m,
        _ => first,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleIntersection {
    pub empty: bool,
    pub witness: Option<SphPoint>,
}

pub fn triple_intersection(a: &Cap, b: &Cap, c: &Cap) -> TripleIntersection {
    let witness = common_point(&[*a, *b, *c]);
    TripleIntersection {
        empty: witness.is_none(),
        witness,
    }
}

/// Smallest distance from a pairwise boundary intersection point to the third
/// boundary circle; positive means the three circles share no point.
pub fn common_boundary_margin(caps: &[Cap; 3]) -> f64 {
    let mut margin = f64::INFINITY;
    for (m, n, o) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        if let Ok(pts) = circle_intersection_points(&caps[m], &caps[n], EPS_TAN) {
            for x in pts {
                margin = margin.min((sph_dist(&x, &caps[o].center) - caps[o].radius).abs());
            }
        }
    }
    margin
}
