//! Membership tests for the nested configuration spaces and the diagnostics
//! used to watch degenerations.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::angles::{check_w0, AngleAssignment, CheckOptions};
use crate::complex::Triangulation;
use crate::solver::Configuration;
use crate::sphere_geom::{
    circle_intersection_points, common_point, inversive_distance, signed_area, sph_dist, Cap, SphPoint, Vec3, EPS_TAN,
};

pub const EPS_ANG: f64 = 1e-7;
pub const T_TYPE_AREA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps_tan: f64,
    pub eps_ang: f64,
    pub samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_tan: EPS_TAN,
            eps_ang: EPS_ANG,
            samples: 20_000,
        }
    }
}

/// Closed caps with no common point: centre distance exceeds the radius sum.
pub fn caps_disjoint(a: &Cap, b: &Cap) -> bool {
    sph_dist(&a.center, &b.center) > a.radius + b.radius
}

fn non_adjacent_pairs(t: &Triangulation) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = t.vertex_count();
    (0..n).flat_map(move |u| (u + 1..n).filter(move |&v| !t.is_adjacent(u, v)).map(move |v| (u, v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactKind {
    /// Adjacent caps with inversive distance at least 1.
    LostOverlap,
    /// Adjacent caps with inversive distance at most −1.
    Nested,
    /// Non-adjacent caps externally tangent within tolerance.
    Tangency,
    /// Non-adjacent caps that overlap.
    ExtraneousOverlap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactViolation {
    pub u: usize,
    pub v: usize,
    pub kind: ContactKind,
    pub inversive_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub pass: bool,
    pub violations: Vec<ContactViolation>,
}

pub fn check_contact_graph(t: &Triangulation, cfg: &Configuration) -> ContactReport {
    check_contact_graph_with(t, cfg, EPS_TAN)
}

pub fn check_contact_graph_with(t: &Triangulation, cfg: &Configuration, eps_tan: f64) -> ContactReport {
    let caps = &cfg.caps;
    let mut violations = Vec::new();
    for &(u, v) in t.edges() {
        let i = inversive_distance(&caps[u], &caps[v]);
        let kind = if i >= 1.0 {
            Some(ContactKind::LostOverlap)
        } else if i <= -1.0 {
            Some(ContactKind::Nested)
        } else {
            None
        };
        if let Some(kind) = kind {
            violations.push(ContactViolation {
                u,
                v,
                kind,
                inversive_distance: i,
            });
        }
    }
    for (u, v) in non_adjacent_pairs(t) {
        let (a, b) = (&caps[u], &caps[v]);
        let gap = sph_dist(&a.center, &b.center) - (a.radius + b.radius);
        let kind = if gap.abs() <= eps_tan {
            Some(ContactKind::Tangency)
        } else if gap < 0.0 {
            Some(ContactKind::ExtraneousOverlap)
        } else {
            None
        };
        if let Some(kind) = kind {
            violations.push(ContactViolation {
                u,
                v,
                kind,
                inversive_distance: inversive_distance(a, b),
            });
        }
    }
    ContactReport {
        pass: violations.is_empty(),
        violations,
    }
}

/// Deterministic, roughly uniform points on the sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<SphPoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            SphPoint::from_xyz(r * phi.cos(), r * phi.sin(), z).expect("unit")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrreducibleReport {
    /// A witness was found for every vertex.
    pub pass: bool,
    /// Per vertex: a point outside every other cap, or `None` (inconclusive).
    pub witnesses: Vec<Option<SphPoint>>,
    /// A cap that covers the whole sphere by itself.
    pub covering_cap: Option<usize>,
    pub samples: usize,
}

impl IrreducibleReport {
    pub fn inconclusive(&self) -> Vec<usize> {
        (0..self.witnesses.len())
            .filter(|&v| self.witnesses[v].is_none())
            .collect()
    }
}

fn strictly_outside(cap: &Cap, x: &SphPoint) -> bool {
    sph_dist(&cap.center, x) > cap.radius
}

/// Pushes `x` a little away from two centres.
fn nudge_away(x: &SphPoint, p: &SphPoint, q: &SphPoint, eps: f64) -> Option<SphPoint> {
    let xv = x.vec();
    let pull = p.vec() + q.vec();
    let tangential = pull - xv * xv.dot(&pull);
    SphPoint::new(xv - tangential * eps).ok()
}

/// Looks, for each vertex `v`, for a point outside every cap except `v`'s.
/// Irreducibility follows when every vertex has one, since any proper subset
/// of the caps is contained in all-but-one.
pub fn check_irreducible(t: &Triangulation, cfg: &Configuration, samples: usize) -> IrreducibleReport {
    let caps = &cfg.caps;
    let n = caps.len();
    if let Some(c) = caps.iter().position(|c| c.radius >= PI) {
        return IrreducibleReport {
            pass: false,
            witnesses: vec![None; n],
            covering_cap: Some(c),
            samples,
        };
    }
    let mut candidates = Vec::new();
    for u in 0..n {
        for w in u + 1..n {
            if let Ok(pts) = circle_intersection_points(&caps[u], &caps[w], EPS_TAN) {
                for x in pts {
                    candidates.extend(nudge_away(&x, &caps[u].center, &caps[w].center, 1e-6));
                }
            }
        }
    }
    for &[i, j, k] in t.faces() {
        let (a, b, c) = (caps[i].center.vec(), caps[j].center.vec(), caps[k].center.vec());
        let nrm: Vec3 = (b - a).cross(&(c - a));
        if let Ok(p) = SphPoint::new(nrm) {
            candidates.push(p);
            candidates.push(SphPoint::new(-nrm).expect("nonzero"));
        }
    }
    candidates.extend(fibonacci_sphere(samples));

    let witnesses = (0..n)
        .map(|v| {
            let free = |x: &SphPoint| (0..n).all(|u| u == v || strictly_outside(&caps[u], x));
            std::iter::once(caps[v].center)
                .chain(candidates.iter().copied())
                .find(|x| free(x))
        })
        .collect::<Vec<_>>();
    IrreducibleReport {
        pass: witnesses.iter().all(Option::is_some),
        witnesses,
        covering_cap: None,
        samples,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrCycle {
    pub vertices: Vec<usize>,
    pub empty: bool,
    pub witness: Option<SphPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrReport {
    pub pass: bool,
    pub cycles: Vec<CrCycle>,
}

/// Caps of every separating triangle must have empty common intersection.
pub fn check_condition_cr(t: &Triangulation, cfg: &Configuration) -> CrReport {
    let cycles: Vec<[usize; 3]> = t
        .separating_cycles(3)
        .into_iter()
        .map(|c| [c.vertices[0], c.vertices[1], c.vertices[2]])
        .collect();
    check_cr_on(&cfg.caps, &cycles)
}

pub fn check_cr_on(caps: &[Cap], cycles: &[[usize; 3]]) -> CrReport {
    let cycles: Vec<CrCycle> = cycles
        .iter()
        .map(|&[i, j, k]| {
            let witness = common_point(&[caps[i], caps[j], caps[k]]);
            CrCycle {
                vertices: vec![i, j, k],
                empty: witness.is_none(),
                witness,
            }
        })
        .collect();
    CrReport {
        pass: cycles.iter().all(|c| c.empty),
        cycles,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangencyDiagnostic {
    pub i: usize,
    pub j: usize,
    pub point: SphPoint,
    pub k: usize,
    /// `Θ_jk + Θ_ki`.
    pub angle_sum: f64,
    /// `angle_sum ≥ π − ε_ang`.
    pub holds: bool,
}

/// For each non-adjacent pair near external tangency, every third cap through
/// the contact point must meet the pair at angles summing to at least π.
pub fn tangency_diagnostics(t: &Triangulation, cfg: &Configuration, tol: &Tolerances) -> Vec<TangencyDiagnostic> {
    let pairs: Vec<(usize, usize)> = non_adjacent_pairs(t).collect();
    tangency_diagnostics_caps(&cfg.caps, &pairs, tol)
}

pub fn tangency_diagnostics_caps(caps: &[Cap], pairs: &[(usize, usize)], tol: &Tolerances) -> Vec<TangencyDiagnostic> {
    let angle = |a: usize, b: usize| inversive_distance(&caps[a], &caps[b]).clamp(-1.0, 1.0).acos();
    let mut out = Vec::new();
    for &(i, j) in pairs {
        let (a, b) = (&caps[i], &caps[j]);
        if (sph_dist(&a.center, &b.center) - (a.radius + b.radius)).abs() > tol.eps_tan {
            continue;
        }
        let Ok(pts) = circle_intersection_points(a, b, tol.eps_tan) else {
            continue;
        };
        let Some(&point) = pts.first() else { continue };
        for k in 0..caps.len() {
            if k == i || k == j || !caps[k].contains(&point, tol.eps_tan) {
                continue;
            }
            let angle_sum = angle(j, k) + angle(k, i);
            out.push(TangencyDiagnostic {
                i,
                j,
                point,
                k,
                angle_sum,
                holds: angle_sum >= PI - tol.eps_ang,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTypeReport {
    pub pass: bool,
    /// Common sign of the face triangles (0 if mixed).
    pub orientation: i8,
    pub area_sum: f64,
    pub degenerate_faces: Vec<usize>,
    pub flipped_faces: Vec<usize>,
}

/// Centres span a geodesic triangulation with the combinatorics of `t`: all
/// face triangles nondegenerate with one orientation, and total area 4π. A
/// global orientation reversal is allowed since the gauge may reflect.
pub fn check_t_type(t: &Triangulation, cfg: &Configuration) -> TTypeReport {
    let areas: Vec<f64> = t
        .faces()
        .iter()
        .map(|&[i, j, k]| signed_area(&cfg.caps[i].center, &cfg.caps[j].center, &cfg.caps[k].center))
        .collect();
    let area_sum: f64 = areas.iter().sum();
    let orientation: i8 = if area_sum >= 0.0 { 1 } else { -1 };
    let degenerate_faces: Vec<usize> = (0..areas.len()).filter(|&f| areas[f].abs() < 1e-12).collect();
    let flipped_faces: Vec<usize> = (0..areas.len())
        .filter(|&f| areas[f].abs() >= 1e-12 && areas[f].signum() as i8 != orientation)
        .collect();
    let pass =
        degenerate_faces.is_empty() && flipped_faces.is_empty() && (area_sum.abs() - 4.0 * PI).abs() <= T_TYPE_AREA_TOL;
    TTypeReport {
        pass,
        orientation: if flipped_faces.is_empty() { orientation } else { 0 },
        area_sum,
        degenerate_faces,
        flipped_faces,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiiStats {
    pub min_radius: f64,
    pub max_radius: f64,
    pub max_non_gauge_radius: f64,
    /// Non-gauge vertices with radius at least π/2.
    pub violations: Vec<usize>,
    pub pass: bool,
}

pub fn radii_bounds(cfg: &Configuration) -> RadiiStats {
    let radii = cfg.radii();
    let violations: Vec<usize> = (0..radii.len())
        .filter(|&v| !cfg.is_gauge_vertex(v) && radii[v] >= FRAC_PI_2)
        .collect();
    RadiiStats {
        min_radius: radii.iter().copied().fold(f64::INFINITY, f64::min),
        max_radius: radii.iter().copied().fold(0.0, f64::max),
        max_non_gauge_radius: cfg.max_non_gauge_radius(),
        pass: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingRatios {
    pub max: f64,
    /// Per edge, larger radius over smaller.
    pub per_edge: Vec<f64>,
}

pub fn ring_ratios(t: &Triangulation, cfg: &Configuration) -> RingRatios {
    let per_edge: Vec<f64> = t
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (cfg.caps[u].radius, cfg.caps[v].radius);
            a.max(b) / a.min(b)
        })
        .collect();
    RingRatios {
        max: per_edge.iter().copied().fold(1.0, f64::max),
        per_edge,
    }
}

/// Minimum of `I − 1` over non-adjacent pairs; positive iff no extraneous
/// contact.
///
/// Caps with radius sum at least π always meet, even though their inversive
/// distance can exceed 1 (the complements are then disjoint); such pairs
/// count as `−|I − 1|`.
pub fn separation_margin(t: &Triangulation, cfg: &Configuration) -> f64 {
    non_adjacent_pairs(t)
        .map(|(u, v)| {
            let (a, b) = (&cfg.caps[u], &cfg.caps[v]);
            let m = inversive_distance(a, b) - 1.0;
            if a.radius + b.radius < PI {
                m
            } else {
                -m.abs()
            }
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPatternReport {
    /// Triples with a common point that are not faces of `t`.
    pub non_face_triples: Vec<[usize; 3]>,
    /// Quadruples with a common point.
    pub quadruples: Vec<[usize; 4]>,
}

/// Exhaustive check that only face triples of caps meet and no four caps
/// share a point.
pub fn intersection_pattern(t: &Triangulation, cfg: &Configuration) -> IntersectionPatternReport {
    let caps = &cfg.caps;
    let n = caps.len();
    let meets = |u: usize, v: usize| !caps_disjoint(&caps[u], &caps[v]);
    let mut non_face_triples = Vec::new();
    let mut quadruples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !meets(i, j) {
                continue;
            }
            for k in j + 1..n {
                if !meets(i, k) || !meets(j, k) {
                    continue;
                }
                if common_point(&[caps[i], caps[j], caps[k]]).is_none() {
                    continue;
                }
                if t.face_index([i, j, k]).is_none() {
                    non_face_triples.push([i, j, k]);
                }
                for l in k + 1..n {
                    if meets(i, l)
                        && meets(j, l)
                        && meets(k, l)
                        && common_point(&[caps[i], caps[j], caps[k], caps[l]]).is_some()
                    {
                        quadruples.push([i, j, k, l]);
                    }
                }
            }
        }
    }
    IntersectionPatternReport {
        non_face_triples,
        quadruples,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub in_me: bool,
    pub in_m_theta: bool,
    pub in_mg: bool,
    pub in_mig: bool,
    pub contact: ContactReport,
    pub irreducible: IrreducibleReport,
    pub cr: CrReport,
    pub tangency: Vec<TangencyDiagnostic>,
    pub t_type: TTypeReport,
    pub is_t_type: bool,
    pub radii: RadiiStats,
    pub ring_ratio_max: f64,
    pub separation_margin: f64,
    /// Recomputed overlap angles, when every edge overlaps.
    pub angles: Option<Vec<f64>>,
    pub tolerances: Tolerances,
}

impl VerificationReport {
    /// Every gate a solved pattern must pass.
    pub fn gates_pass(&self) -> bool {
        self.in_mg && self.cr.pass && self.is_t_type && self.separation_margin > 0.0
    }
}

pub fn verify(t: &Triangulation, cfg: &Configuration, tol: &Tolerances) -> VerificationReport {
    let angles = cfg.angles(t).ok();
    let in_me = angles.is_some();
    let in_m_theta = angles.as_ref().is_some_and(|a| {
        AngleAssignment::new(t.edges(), a.clone())
            .ok()
            .and_then(|theta| check_w0(t, &theta, CheckOptions::default()).ok())
            .is_some_and(|r| r.pass())
    });
    let contact = check_contact_graph_with(t, cfg, tol.eps_tan);
    let in_mg = in_m_theta && contact.pass;
    let irreducible = check_irreducible(t, cfg, tol.samples);
    let in_mig = in_mg && irreducible.pass;
    let t_type = check_t_type(t, cfg);
    VerificationReport {
        in_me,
        in_m_theta,
        in_mg,
        in_mig,
        cr: check_condition_cr(t, cfg),
        tangency: tangency_diagnostics(t, cfg, tol),
        is_t_type: t_type.pass,
        t_type,
        radii: radii_bounds(cfg),
        ring_ratio_max: ring_ratios(t, cfg).max,
        separation_margin: separation_margin(t, cfg),
        contact,
        irreducible,
        angles,
        tolerances: *tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{bipyramid, octahedron};
    use crate::solver::symmetric_octahedron;

    fn sym(theta: f64) -> Configuration {
        Configuration::new(symmetric_octahedron(theta), [0, 2, 4])
    }

    #[test]
    fn symmetric_octahedron_report() {
        let t = octahedron();
        let theta = 2.0 * PI / 5.0;
        let cfg = sym(theta);
        let contact = check_contact_graph(&t, &cfg);
        assert!(contact.pass);
        let i = inversive_distance(&cfg.caps[0], &cfg.caps[1]);
        assert!((i - 1.618_033_988_749_895).abs() < 1e-12);
        assert!((separation_margin(&t, &cfg) - 0.618_033_988_749_895).abs() < 1e-12);

        let irr = check_irreducible(&t, &cfg, 1000);
        assert!(irr.pass);
        // each centre is outside every other cap
        for v in 0..6 {
            assert_eq!(irr.witnesses[v], Some(cfg.caps[v].center));
        }
        let cr = check_condition_cr(&t, &cfg);
        assert!(cr.pass && cr.cycles.is_empty());
        let tt = check_t_type(&t, &cfg);
        assert!(tt.pass);
        assert!((tt.area_sum - 4.0 * PI).abs() < 1e-12);
        assert!((ring_ratios(&t, &cfg).max - 1.0).abs() < 1e-12);
        assert!(tangency_diagnostics(&t, &cfg, &Tolerances::default()).is_empty());
        let r = verify(&t, &cfg, &Tolerances::default());
        assert!(r.in_mig && r.in_mg && r.in_m_theta && r.in_me);
    }

    #[test]
    fn margin_follows_closed_form() {
        let t = octahedron();
        let mut last = f64::INFINITY;
        for f in [0.40, 0.45, 0.49, 0.499] {
            let theta = f * PI;
            let m = separation_margin(&t, &sym(theta));
            let rho = (1.0 / theta.cos().sqrt()).atan();
            let want = (rho.cos().powi(2) + 1.0) / rho.sin().powi(2) - 1.0;
            assert!((m - want).abs() < 1e-12);
            assert!(m < last);
            last = m;
        }
    }

    #[test]
    fn contact_violations() {
        let t = octahedron();
        let mut cfg = sym(2.0 * PI / 5.0);
        // grow the +x cap until it touches -x: distance pi = r0 + r1
        cfg.caps[0].radius = PI - cfg.caps[1].radius;
        let r = check_contact_graph(&t, &cfg);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ContactKind::Tangency);
        assert!((r.violations[0].inversive_distance - 1.0).abs() < 1e-9);

        cfg.caps[0].radius += 0.1;
        let r = check_contact_graph(&t, &cfg);
        assert_eq!(r.violations[0].kind, ContactKind::ExtraneousOverlap);
        assert!(separation_margin(&t, &cfg) < 0.0);

        let mut cfg = sym(2.0 * PI / 5.0);
        cfg.caps[0].radius = 0.2;
        cfg.caps[2].radius = 0.2;
        let r = check_contact_graph(&t, &cfg);
        assert!(r
            .violations
            .iter()
            .any(|v| v.kind == ContactKind::LostOverlap && (v.u, v.v) == (0, 2)));
    }

    #[test]
    fn reducible_when_one_cap_is_covered() {
        let t = octahedron();
        let mut cfg = sym(2.0 * PI / 5.0);
        cfg.caps[4].radius = 0.05;
        for v in [0, 1, 2, 3] {
            cfg.caps[v].radius = 1.65;
        }
        let r = check_irreducible(&t, &cfg, 2000);
        assert!(r.witnesses[4].is_none());
        assert!(!r.pass);
        assert!(r.inconclusive().contains(&4));
    }

    #[test]
    fn covering_cap_is_flagged() {
        let t = octahedron();
        let mut cfg = sym(2.0 * PI / 5.0);
        cfg.caps[3].radius = PI;
        let r = check_irreducible(&t, &cfg, 100);
        assert_eq!(r.covering_cap, Some(3));
        assert!(!r.pass);
    }

    #[test]
    fn cr_fails_on_coordinate_hemispheres() {
        let h = FRAC_PI_2;
        let caps = [
            Cap::new(SphPoint::from_xyz(1.0, 0.0, 0.0).unwrap(), h).unwrap(),
            Cap::new(SphPoint::from_xyz(0.0, 1.0, 0.0).unwrap(), h).unwrap(),
            Cap::new(SphPoint::from_xyz(0.0, 0.0, 1.0).unwrap(), h).unwrap(),
        ];
        let r = check_cr_on(&caps, &[[0, 1, 2]]);
        assert!(!r.pass);
        assert!(r.cycles[0].witness.is_some());
    }

    #[test]
    fn tangency_inside_a_right_angled_cap_is_borderline() {
        // D_i, D_j tangent at p = +z; D_k is the hemisphere with p on its
        // boundary meeting both at right angles
        let h = FRAC_PI_2;
        let r = 0.5;
        let pi_ = SphPoint::from_xyz(0.0, 0.0, 1.0).unwrap().walk(&Vec3::x(), r);
        let pj = SphPoint::from_xyz(0.0, 0.0, 1.0).unwrap().walk(&Vec3::x(), -r);
        let caps = [
            Cap::new(pi_, r).unwrap(),
            Cap::new(pj, r).unwrap(),
            Cap::new(SphPoint::from_xyz(0.0, 1.0, 0.0).unwrap(), h).unwrap(),
        ];
        let d = tangency_diagnostics_caps(&caps, &[(0, 1)], &Tolerances::default());
        assert_eq!(d.len(), 1);
        assert!((d[0].angle_sum - PI).abs() < 1e-12);
        assert!(d[0].holds);
        assert!((d[0].point.vec() - Vec3::z()).norm() < 1e-12);
    }

    #[test]
    fn small_angle_sum_at_a_tangency_is_flagged() {
        // exact tangency cannot put the contact point inside a third cap at
        // small angles, so place it just outside and widen the tolerance
        let r = 0.5;
        let north = SphPoint::from_xyz(0.0, 0.0, 1.0).unwrap();
        let caps = [
            Cap::new(north.walk(&Vec3::x(), r), r).unwrap(),
            Cap::new(north.walk(&Vec3::x(), -r), r).unwrap(),
            Cap::new(north.walk(&Vec3::y(), 0.65), 0.6).unwrap(),
        ];
        let tol = Tolerances {
            eps_tan: 0.1,
            ..Tolerances::default()
        };
        let d = tangency_diagnostics_caps(&caps, &[(0, 1)], &tol);
        assert_eq!(d.len(), 1);
        assert!(d[0].angle_sum < PI);
        assert!(!d[0].holds);
    }

    #[test]
    fn flipped_and_degenerate_faces() {
        let t = octahedron();
        let mut cfg = sym(2.0 * PI / 5.0);
        // pull +z below the equator: faces around it flip
        cfg.caps[4].center = SphPoint::from_xyz(0.1, 0.1, -0.5).unwrap();
        let r = check_t_type(&t, &cfg);
        assert!(!r.pass);
        let mut cfg = sym(2.0 * PI / 5.0);
        cfg.caps[4].center = SphPoint::from_xyz(1.0, 1.0, 0.0).unwrap();
        let r = check_t_type(&t, &cfg);
        assert!(!r.pass);
        assert!(!r.degenerate_faces.is_empty());
    }

    #[test]
    fn radius_bound_flags() {
        let mut cfg = sym(2.0 * PI / 5.0);
        assert!(radii_bounds(&cfg).pass);
        cfg.caps[1].radius = 1.6;
        let r = radii_bounds(&cfg);
        assert_eq!(r.violations, vec![1]);
        // gauge vertices are exempt
        cfg.caps[1].radius = 1.0;
        cfg.caps[0].radius = FRAC_PI_2;
        assert!(radii_bounds(&cfg).pass);
    }

    #[test]
    fn fibonacci_points_are_spread() {
        let pts = fibonacci_sphere(500);
        let mean: Vec3 = pts.iter().map(|p| p.vec()).sum::<Vec3>() / 500.0;
        assert!(mean.norm() < 1e-2);
        assert_eq!(fibonacci_sphere(500), pts);
    }

    #[test]
    fn bipyramid_intersection_pattern_counts_pairs() {
        let t = bipyramid(3);
        let cfg = Configuration::new(
            vec![Cap::new(SphPoint::from_xyz(1.0, 0.0, 0.0).unwrap(), 0.1).unwrap(); 5],
            [0, 1, 3],
        );
        // five identical caps: every triple and quadruple meets
        let r = intersection_pattern(&t, &cfg);
        assert_eq!(r.quadruples.len(), 5);
        assert_eq!(r.non_face_triples.len(), 10 - 6);
    }
}
