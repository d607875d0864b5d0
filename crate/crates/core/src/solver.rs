//! Gauge-fixed overlap-angle map and its numerical inversion.
//!
//! Unknowns: the angle of `p_b` along the great circle from `p_a`, two tangent
//! coordinates for every other centre except `p_a`, and the radius of every
//! vertex outside the gauge face. That is `3|V| − 6 = |E|` numbers, so the
//! system is square. Iteration is damped Gauss–Newton with step gating, along
//! the path `sΘ + (1 − s)π/3` from `s₀` to 1.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{check_w, AngleAssignment, AngleError, CheckOptions};
use crate::complex::Triangulation;
use crate::packing;
use crate::polyhedron::{boost_to_origin, cap_of_normal, face_vertex, lorentz_apply, plane_normal};
use crate::sphere_geom::{
    inversive_distance, signed_area, sph_dist, tangent_basis, tri_realizable, Cap, SphPoint, Vec3,
};
use crate::verify;

/// Radii must stay inside `(RADIUS_CLIP, π − RADIUS_CLIP)` while iterating.
pub const RADIUS_CLIP: f64 = 0.01;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("({0}, {1}, {2}) is not a face of the triangulation")]
    NotAFace(usize, usize, usize),
    #[error("target angles violate the admissibility conditions: {}", .0.join("; "))]
    ConditionsViolated(Vec<String>),
    #[error("edge {0} does not overlap")]
    EdgeNotOverlapping(usize),
    #[error("tangent chart degenerates: {0}")]
    NearSingularChart(String),
    #[error("homotopy stalled at s = {s}")]
    HomotopyStalled { s: f64, partial: Box<Partial> },
    #[error("left the feasible region: {reason}")]
    LeftFeasibleRegion { reason: String, partial: Box<Partial> },
    #[error("gauge normalisation not implementable: {0}")]
    NotImplementable(String),
    #[error("gauge caps {0} and {1} do not overlap")]
    GaugeNotOverlapping(usize, usize),
    #[error(transparent)]
    Angles(#[from] AngleError),
}

/// Best iterate kept when a solve fails.
#[derive(Debug, Clone)]
pub struct Partial {
    pub config: Configuration,
    pub report: SolveReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub caps: Vec<Cap>,
    pub gauge_face: [usize; 3],
}

impl Configuration {
    pub fn new(caps: Vec<Cap>, gauge_face: [usize; 3]) -> Self {
        Self { caps, gauge_face }
    }

    pub fn len(&self) -> usize {
        self.caps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.caps.is_empty()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.caps.iter().map(|c| c.radius).collect()
    }

    pub fn centers(&self) -> Vec<SphPoint> {
        self.caps.iter().map(|c| c.center).collect()
    }

    pub fn is_gauge_vertex(&self, v: usize) -> bool {
        self.gauge_face.contains(&v)
    }

    /// Largest deviation from the normal form: gauge radii π/2, `p_a` at the
    /// south pole, `p_b` on the half-meridian `y = 0, x > 0`, `p_c` with `y > 0`.
    pub fn gauge_defect(&self) -> f64 {
        let [a, b, c] = self.gauge_face;
        let mut defect: f64 = 0.0;
        for v in [a, b, c] {
            defect = defect.max((self.caps[v].radius - FRAC_PI_2).abs());
        }
        let pa = self.caps[a].center.vec();
        let pb = self.caps[b].center.vec();
        let pc = self.caps[c].center.vec();
        defect = defect.max((pa - Vec3::new(0.0, 0.0, -1.0)).norm());
        defect = defect.max(pb.y.abs());
        if pb.x <= 0.0 {
            defect = defect.max(1.0);
        }
        if pc.y <= 0.0 {
            defect = defect.max(1.0);
        }
        defect
    }

    /// Recomputed overlap angle of every edge.
    pub fn angles(&self, t: &Triangulation) -> Result<Vec<f64>, SolveError> {
        t.edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| {
                let i = inversive_distance(&self.caps[u], &self.caps[v]);
                if i.abs() < 1.0 {
                    Ok(i.acos())
                } else {
                    Err(SolveError::EdgeNotOverlapping(e))
                }
            })
            .collect()
    }

    /// Largest radius outside the gauge face.
    pub fn max_non_gauge_radius(&self) -> f64 {
        (0..self.len())
            .filter(|&v| !self.is_gauge_vertex(v))
            .map(|v| self.caps[v].radius)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub residual_tol: f64,
    /// Per homotopy step.
    pub max_iterations: usize,
    pub initial_damping: f64,
    pub homotopy_start: f64,
    pub min_homotopy_step: f64,
    pub seed: u64,
    /// Defaults to the first face of the triangulation.
    pub gauge_face: Option<[usize; 3]>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_iterations: 200,
            initial_damping: 1e-3,
            homotopy_start: 0.5,
            min_homotopy_step: 1e-4,
            seed: 0,
            gauge_face: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// From the initial layout's own angles to the homotopy start.
    Warmup,
    /// Along `sΘ + (1 − s)π/3`.
    Homotopy,
    /// Between two targets supplied by the caller.
    Continuation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub phase: Phase,
    /// Homotopy parameter for [`Phase::Homotopy`], interpolation weight otherwise.
    pub s: f64,
    pub iterations: usize,
    pub residual_inf: f64,
    pub max_non_gauge_radius: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub steps: Vec<StepRecord>,
    pub rejected_steps: usize,
    pub residual_inf: f64,
    pub jacobian_condition: Option<f64>,
    pub min_radius: f64,
    pub max_radius: f64,
    pub max_non_gauge_radius: f64,
    pub ring_ratio_max: f64,
    /// Accepted homotopy steps with a non-gauge radius at or above π/2.
    pub radius_bound_violations: usize,
    pub seed: u64,
    #[serde(default)]
    pub start: StartLayout,
}

/// Where the iteration started.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartLayout {
    /// Inflated tangency packing.
    Packing,
    /// Tutte embedding with grown radii.
    Tutte,
    /// Supplied by the caller.
    #[default]
    Given,
}

impl SolveReport {
    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.iterations).sum()
    }

    fn finish(&mut self, t: &Triangulation, cfg: &Configuration) {
        let radii = cfg.radii();
        self.min_radius = radii.iter().copied().fold(f64::INFINITY, f64::min);
        self.max_radius = radii.iter().copied().fold(0.0, f64::max);
        self.max_non_gauge_radius = cfg.max_non_gauge_radius();
        self.ring_ratio_max = verify::ring_ratios(t, cfg).max;
    }
}

/// Coordinate layout of the gauge chart.
struct Chart {
    a: usize,
    b: usize,
    center_slot: Vec<Option<usize>>,
    radius_slot: Vec<Option<usize>>,
    dim: usize,
}

impl Chart {
    fn new(n: usize, gauge: [usize; 3]) -> Self {
        let [a, b, c] = gauge;
        let mut center_slot = vec![None; n];
        let mut radius_slot = vec![None; n];
        let mut next = 1;
        for (v, slot) in center_slot.iter_mut().enumerate() {
            if v != a && v != b {
                *slot = Some(next);
                next += 2;
            }
        }
        for (v, slot) in radius_slot.iter_mut().enumerate() {
            if v != a && v != b && v != c {
                *slot = Some(next);
                next += 1;
            }
        }
        Self {
            a,
            b,
            center_slot,
            radius_slot,
            dim: next,
        }
    }

    /// Unit direction of the great circle from `p_a` through `p_b` at `p_b`,
    /// and the angle `φ` between them.
    fn meridian(&self, cfg: &Configuration) -> Result<(f64, Vec3, Vec3), SolveError> {
        let pa = cfg.caps[self.a].center.vec();
        let pb = cfg.caps[self.b].center.vec();
        let c = pa.dot(&pb).clamp(-1.0, 1.0);
        let phi = c.acos();
        let s = phi.sin();
        if s < 1e-12 {
            return Err(SolveError::NearSingularChart("p_b coincides with ±p_a".into()));
        }
        // u: unit vector orthogonal to p_a in the plane of p_a, p_b
        let u = (pb - pa * c) / s;
        Ok((phi, u, pb * c / s - pa / s))
    }

    /// Per-vertex tangent directions for each centre coordinate.
    fn tangents(&self, cfg: &Configuration) -> Result<Vec<Vec<(usize, Vec3)>>, SolveError> {
        let mut out = vec![Vec::new(); cfg.len()];
        let (_, _, tb) = self.meridian(cfg)?;
        out[self.b].push((0, tb));
        for (v, slot) in self.center_slot.iter().enumerate() {
            if let Some(k) = *slot {
                let (e1, e2) = tangent_basis(&cfg.caps[v].center);
                out[v].push((k, e1));
                out[v].push((k + 1, e2));
            }
        }
        Ok(out)
    }
}

/// Angle residual `Θ(e) − Θ_target(e)` per edge.
pub fn residual(t: &Triangulation, target: &AngleAssignment, cfg: &Configuration) -> Result<DVector<f64>, SolveError> {
    let angles = cfg.angles(t)?;
    Ok(DVector::from_iterator(
        angles.len(),
        angles.iter().zip(target.values()).map(|(a, b)| a - b),
    ))
}

/// Derivatives of the edge angles with respect to the chart coordinates.
pub fn jacobian(t: &Triangulation, cfg: &Configuration) -> Result<DMatrix<f64>, SolveError> {
    let chart = Chart::new(cfg.len(), cfg.gauge_face);
    let tangents = chart.tangents(cfg)?;
    let mut j = DMatrix::zeros(t.edge_count(), chart.dim);
    for (e, &(u, v)) in t.edges().iter().enumerate() {
        let (cu, cv) = (&cfg.caps[u], &cfg.caps[v]);
        let i = inversive_distance(cu, cv);
        if i.abs() >= 1.0 {
            return Err(SolveError::EdgeNotOverlapping(e));
        }
        let dtheta = -1.0 / (1.0 - i * i).sqrt();
        let ss = cu.radius.sin() * cv.radius.sin();
        for (me, other) in [(u, v), (v, u)] {
            let p_other = cfg.caps[other].center.vec();
            for &(k, tan) in &tangents[me] {
                j[(e, k)] += dtheta * (-tan.dot(&p_other) / ss);
            }
            if let Some(k) = chart.radius_slot[me] {
                let r_me = cfg.caps[me].radius;
                let r_other = cfg.caps[other].radius;
                let di = -1.0 / r_other.tan() - i / r_me.tan();
                j[(e, k)] += dtheta * di;
            }
        }
    }
    Ok(j)
}

/// Moves `cfg` by chart coordinates `delta` (exponential map on centres).
/// Returns `None` when the result leaves the chart.
pub fn apply_step(cfg: &Configuration, delta: &DVector<f64>) -> Option<Configuration> {
    let chart = Chart::new(cfg.len(), cfg.gauge_face);
    let (phi, u, _) = chart.meridian(cfg).ok()?;
    let mut caps = cfg.caps.clone();
    let pa = cfg.caps[chart.a].center.vec();
    let phi2 = phi + delta[0];
    if !(phi2 > 0.0 && phi2 < PI) {
        return None;
    }
    caps[chart.b].center = SphPoint::new(pa * phi2.cos() + u * phi2.sin()).ok()?;
    for (v, slot) in chart.center_slot.iter().enumerate() {
        if let Some(k) = *slot {
            let p = cfg.caps[v].center;
            let (e1, e2) = tangent_basis(&p);
            let w = e1 * delta[k] + e2 * delta[k + 1];
            let len = w.norm();
            if len > 0.0 {
                caps[v].center = SphPoint::new(p.walk(&(w / len), len).vec()).ok()?;
            }
        }
    }
    for (v, slot) in chart.radius_slot.iter().enumerate() {
        if let Some(k) = *slot {
            let r = cfg.caps[v].radius + delta[k];
            if !(r > RADIUS_CLIP && r < PI - RADIUS_CLIP) {
                return None;
            }
            caps[v].radius = r;
        }
    }
    Some(Configuration::new(caps, cfg.gauge_face))
}

/// Number of free chart coordinates, `3|V| − 6`.
pub fn chart_dimension(vertex_count: usize) -> usize {
    3 * vertex_count - 6
}

/// Builds the starting layout: Tutte embedding with the gauge face outside,
/// lifted to the sphere and rotated into gauge.
pub fn initial_configuration(
    t: &Triangulation,
    gauge_face: [usize; 3],
    seed: u64,
) -> Result<Configuration, SolveError> {
    let [a, b, c] = gauge_face;
    let f = t.face_index(gauge_face).ok_or(SolveError::NotAFace(a, b, c))?;
    // use the face's own orientation so that the outer triangle is laid out
    // consistently with the rotation system
    let outer = t.faces()[f];
    let n = t.vertex_count();

    // outer vertices at colatitude acos(1/√3) around the north pole, which puts
    // them pairwise a quarter circle apart
    let colat = (1.0 / 3f64.sqrt()).acos();
    let big_r = 1.0 / (colat / 2.0).tan();
    let mut pos = vec![[0.0f64; 2]; n];
    let mut is_outer = vec![false; n];
    for (m, &v) in outer.iter().enumerate() {
        let ang = FRAC_PI_2 + 2.0 * PI * m as f64 / 3.0;
        pos[v] = [big_r * ang.cos(), big_r * ang.sin()];
        is_outer[v] = true;
    }
    let inner: Vec<usize> = (0..n).filter(|&v| !is_outer[v]).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in inner.iter().enumerate() {
        slot[v] = k;
    }
    let m = inner.len();
    let mut lap = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DMatrix::<f64>::zeros(m, 2);
    for (k, &v) in inner.iter().enumerate() {
        lap[(k, k)] = t.degree(v) as f64;
        for &u in t.neighbors(v) {
            if is_outer[u] {
                rhs[(k, 0)] += pos[u][0];
                rhs[(k, 1)] += pos[u][1];
            } else {
                lap[(k, slot[u])] -= 1.0;
            }
        }
    }
    let sol = lap
        .lu()
        .solve(&rhs)
        .ok_or_else(|| SolveError::NearSingularChart("singular Tutte system".into()))?;
    for (k, &v) in inner.iter().enumerate() {
        pos[v] = [sol[(k, 0)], sol[(k, 1)]];
    }

    let mut centers: Vec<Vec3> = pos
        .iter()
        .map(|&[x, y]| {
            let q = x * x + y * y;
            Vec3::new(2.0 * x, 2.0 * y, q - 1.0) / (q + 1.0)
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &v in &inner {
        let p = SphPoint::new(centers[v]).expect("unit");
        let near = t
            .neighbors(v)
            .iter()
            .map(|&u| sph_dist(&p, &SphPoint::new(centers[u]).expect("unit")))
            .fold(f64::INFINITY, f64::min);
        let (e1, e2) = tangent_basis(&p);
        let amp = 0.02 * near;
        let w = e1 * rng.gen_range(-amp..=amp) + e2 * rng.gen_range(-amp..=amp);
        centers[v] = (centers[v] + w).normalize();
    }

    let caps: Vec<Cap> = centers
        .iter()
        .map(|&p| Cap {
            center: SphPoint::new(p).expect("unit"),
            radius: FRAC_PI_2,
        })
        .collect();
    let mut cfg = gauge_project(&Configuration::new(caps, gauge_face))?;

    for &v in &inner {
        let p = cfg.caps[v].center;
        let mean = t
            .neighbors(v)
            .iter()
            .map(|&u| sph_dist(&p, &cfg.caps[u].center))
            .sum::<f64>()
            / t.degree(v) as f64;
        cfg.caps[v].radius = (0.5 * mean).clamp(0.05, FRAC_PI_2);
    }
    // grow radii until every edge overlaps
    let cap_limit = FRAC_PI_2 - 1e-3;
    for _ in 0..400 {
        let mut grew = false;
        for &(u, v) in t.edges() {
            if inversive_distance(&cfg.caps[u], &cfg.caps[v]).abs() < 1.0 {
                continue;
            }
            for w in [u, v] {
                if !cfg.is_gauge_vertex(w) && cfg.caps[w].radius < cap_limit {
                    cfg.caps[w].radius = (cfg.caps[w].radius * 1.1).min(cap_limit);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    Ok(cfg)
}

/// Rotates `raw` so that `p_a` is the south pole, `p_b` lies on the
/// half-meridian `y = 0, x > 0` and `p_c` has `y > 0`. Radii are untouched. If
/// the rotated `p_c` lands at `y < 0` the result is reflected in the plane
/// `y = 0` (an orientation-reversing Möbius map).
fn rotate_into_gauge(raw: &Configuration) -> Result<Configuration, SolveError> {
    let [a, b, c] = raw.gauge_face;
    let pa = raw.caps[a].center.vec();
    let pb = raw.caps[b].center.vec();
    let ez = -pa;
    let bx = pb - pa * pa.dot(&pb);
    if bx.norm() < 1e-12 {
        return Err(SolveError::NearSingularChart("p_b is antipodal to p_a".into()));
    }
    let ex = bx.normalize();
    let ey = ez.cross(&ex);
    let mut rot = Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()]);
    if (rot * raw.caps[c].center.vec()).y < 0.0 {
        rot.row_mut(1).neg_mut();
    }
    let mut caps: Vec<Cap> = raw
        .caps
        .iter()
        .map(|k| Cap {
            center: SphPoint::new(rot * k.center.vec()).expect("rotation preserves norm"),
            radius: k.radius,
        })
        .collect();
    caps[a].center = SphPoint::from_xyz(0.0, 0.0, -1.0).expect("unit");
    let b_vec = caps[b].center.vec();
    caps[b].center = SphPoint::from_xyz(b_vec.x, 0.0, b_vec.z).expect("on meridian");
    Ok(Configuration::new(caps, raw.gauge_face))
}

/// Brings a configuration into normal form by a Möbius transformation.
///
/// When the gauge radii are not already π/2, the three gauge planes must meet
/// inside hyperbolic space; a boost moves their common point to the origin,
/// which makes all three circles great circles. A rotation finishes the job.
pub fn gauge_project(raw: &Configuration) -> Result<Configuration, SolveError> {
    let [a, b, c] = raw.gauge_face;
    for (u, v) in [(a, b), (b, c), (c, a)] {
        if inversive_distance(&raw.caps[u], &raw.caps[v]).abs() >= 1.0 {
            return Err(SolveError::GaugeNotOverlapping(u, v));
        }
    }
    let great = [a, b, c]
        .iter()
        .all(|&v| (raw.caps[v].radius - FRAC_PI_2).abs() <= 1e-12);
    let boosted = if great {
        raw.clone()
    } else {
        let normals = raw
            .caps
            .iter()
            .map(plane_normal)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SolveError::NotImplementable(e.to_string()))?;
        let q = face_vertex(&normals[a], &normals[b], &normals[c])
            .map_err(|_| SolveError::NotImplementable("the gauge planes do not meet".into()))?;
        let l = boost_to_origin(&q);
        let caps = normals.iter().map(|n| cap_of_normal(&lorentz_apply(&l, n))).collect();
        Configuration::new(caps, raw.gauge_face)
    };
    let mut cfg = rotate_into_gauge(&boosted)?;
    for v in [a, b, c] {
        cfg.caps[v].radius = FRAC_PI_2;
    }
    Ok(cfg)
}

/// Starting layout from a tangency packing, inflated so that every edge
/// overlaps slightly while non-adjacent caps stay apart. The gauge caps keep
/// their packing radii; the solver normalises them once the gauge angles
/// allow it. `None` when no packing could be laid out.
pub fn packing_configuration(
    t: &Triangulation,
    gauge_face: [usize; 3],
    seed: u64,
) -> Result<Option<Configuration>, SolveError> {
    let [a, b, c] = gauge_face;
    t.face_index(gauge_face).ok_or(SolveError::NotAFace(a, b, c))?;
    let Some(mut caps) = packing::tangency_packing(t) else {
        return Ok(None);
    };
    let kappa = (0.5 * packing::relative_clearance(t, &caps)).min(0.15);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for cap in &mut caps {
        let (e1, e2) = tangent_basis(&cap.center);
        let amp = 0.05 * kappa * cap.radius;
        let w = e1 * rng.gen_range(-amp..=amp) + e2 * rng.gen_range(-amp..=amp);
        let len = w.norm();
        if len > 0.0 {
            cap.center = cap.center.walk(&(w / len), len);
        }
        cap.radius *= 1.0 + kappa;
    }
    Ok(Some(rotate_into_gauge(&Configuration::new(caps, gauge_face))?))
}

/// Open conditions that must not be lost once they hold.
#[derive(Debug, Clone)]
struct Gates {
    faces_realizable: Vec<bool>,
    face_sign: Vec<i8>,
    non_adjacent_disjoint: Vec<bool>,
    gauge_sign: i8,
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

impl Gates {
    fn of(t: &Triangulation, cfg: &Configuration, angles: &[f64], non_adjacent: &[(usize, usize)]) -> Self {
        let faces_realizable = t
            .faces()
            .iter()
            .map(|&[i, j, k]| face_realizable(t, cfg, angles, [i, j, k]))
            .collect();
        let face_sign = t
            .faces()
            .iter()
            .map(|&[i, j, k]| {
                sign(signed_area(
                    &cfg.caps[i].center,
                    &cfg.caps[j].center,
                    &cfg.caps[k].center,
                ))
            })
            .collect();
        let non_adjacent_disjoint = non_adjacent
            .iter()
            .map(|&(u, v)| verify::caps_disjoint(&cfg.caps[u], &cfg.caps[v]))
            .collect();
        let [a, b, c] = cfg.gauge_face;
        let gauge_sign = sign(
            cfg.caps[a]
                .center
                .vec()
                .dot(&cfg.caps[b].center.vec().cross(&cfg.caps[c].center.vec())),
        );
        Self {
            faces_realizable,
            face_sign,
            non_adjacent_disjoint,
            gauge_sign,
        }
    }

    /// Whether every gate that holds in `self` still holds in `next`.
    fn kept_by(&self, next: &Gates) -> bool {
        let kept = |old: &[bool], new: &[bool]| old.iter().zip(new).all(|(&o, &n)| !o || n);
        kept(&self.faces_realizable, &next.faces_realizable)
            && kept(&self.non_adjacent_disjoint, &next.non_adjacent_disjoint)
            && self
                .face_sign
                .iter()
                .zip(&next.face_sign)
                .all(|(&o, &n)| o == 0 || o == n)
            && (self.gauge_sign == 0 || self.gauge_sign == next.gauge_sign)
    }
}

fn face_realizable(t: &Triangulation, cfg: &Configuration, angles: &[f64], [i, j, k]: [usize; 3]) -> bool {
    let e = |u, v| t.edge_id(u, v).expect("face edge");
    let r = [cfg.caps[i].radius, cfg.caps[j].radius, cfg.caps[k].radius];
    let th = [angles[e(i, j)], angles[e(j, k)], angles[e(k, i)]];
    matches!(tri_realizable(r, th), Ok(c) if c.triangle_inequalities && c.triangle_quantity > 0.0)
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.amax()
}

struct Solver<'a> {
    t: &'a Triangulation,
    /// Final target, for diagnostics.
    target: AngleAssignment,
    opts: SolveOptions,
    non_adjacent: Vec<(usize, usize)>,
    report: SolveReport,
}

struct LmOutcome {
    cfg: Configuration,
    residual_inf: f64,
    iterations: usize,
    converged: bool,
}

impl<'a> Solver<'a> {
    fn new(t: &'a Triangulation, target: &AngleAssignment, opts: SolveOptions) -> Self {
        let n = t.vertex_count();
        let mut non_adjacent = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if !t.is_adjacent(u, v) {
                    non_adjacent.push((u, v));
                }
            }
        }
        Self {
            t,
            target: target.clone(),
            opts,
            non_adjacent,
            report: SolveReport {
                seed: opts.seed,
                ..Default::default()
            },
        }
    }

    fn gates(&self, cfg: &Configuration, angles: &[f64]) -> Gates {
        Gates::of(self.t, cfg, angles, &self.non_adjacent)
    }

    /// Damped Gauss–Newton towards `target` from `start`.
    fn lm(&self, target: &AngleAssignment, start: &Configuration) -> Result<LmOutcome, SolveError> {
        let mut cfg = start.clone();
        let mut angles = cfg.angles(self.t)?;
        let mut gates = self.gates(&cfg, &angles);
        let mut r = residual(self.t, target, &cfg)?;
        let mut cost = r.norm_squared();
        let mut lambda = self.opts.initial_damping;
        let mut iterations = 0;
        while iterations < self.opts.max_iterations {
            if inf_norm(&r) <= self.opts.residual_tol {
                break;
            }
            iterations += 1;
            let j = jacobian(self.t, &cfg)?;
            let jt = j.transpose();
            let a = &jt * &j;
            let g = &jt * &r;
            let diag_floor = 1e-10 * a.diagonal().max().max(1e-300);
            let mut accepted = false;
            while iterations <= self.opts.max_iterations && lambda < 1e16 {
                let mut m = a.clone();
                for i in 0..m.nrows() {
                    m[(i, i)] += lambda * a[(i, i)].max(diag_floor);
                }
                let delta = match m.cholesky() {
                    Some(ch) => -ch.solve(&g),
                    None => {
                        lambda *= 10.0;
                        continue;
                    }
                };
                if let Some(trial) = self.try_step(&cfg, &delta, target, &gates, cost) {
                    (cfg, angles, r, cost) = trial;
                    gates = self.gates(&cfg, &angles);
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
                lambda *= 10.0;
                iterations += 1;
            }
            if !accepted {
                break;
            }
        }
        let residual_inf = inf_norm(&r);
        Ok(LmOutcome {
            cfg,
            residual_inf,
            iterations,
            converged: residual_inf <= self.opts.residual_tol,
        })
    }

    #[allow(clippy::type_complexity)]
    fn try_step(
        &self,
        cfg: &Configuration,
        delta: &DVector<f64>,
        target: &AngleAssignment,
        gates: &Gates,
        cost: f64,
    ) -> Option<(Configuration, Vec<f64>, DVector<f64>, f64)> {
        let next = apply_step(cfg, delta)?;
        let angles = next.angles(self.t).ok()?;
        let r = DVector::from_iterator(angles.len(), angles.iter().zip(target.values()).map(|(a, b)| a - b));
        let next_cost = r.norm_squared();
        if next_cost.is_nan() || next_cost >= cost {
            return None;
        }
        if !gates.kept_by(&self.gates(&next, &angles)) {
            return None;
        }
        Some((next, angles, r, next_cost))
    }

    fn pattern_gates_hold(&self, cfg: &Configuration) -> Result<(), String> {
        let contact = verify::check_contact_graph(self.t, cfg);
        if !contact.pass {
            return Err(format!(
                "contact graph incorrect: {} violations",
                contact.violations.len()
            ));
        }
        let angles = cfg.angles(self.t).map_err(|e| e.to_string())?;
        for (f, &face) in self.t.faces().iter().enumerate() {
            if !face_realizable(self.t, cfg, &angles, face) {
                return Err(format!("face {f} is not realizable"));
            }
        }
        Ok(())
    }

    fn partial(&self, cfg: &Configuration) -> Box<Partial> {
        let mut report = self.report.clone();
        report.residual_inf = residual(self.t, &self.target, cfg)
            .map(|r| inf_norm(&r))
            .unwrap_or(f64::INFINITY);
        report.finish(self.t, cfg);
        Box::new(Partial {
            config: cfg.clone(),
            report,
        })
    }

    /// Follows `lerp(from, to, λ)` for λ from 0 to 1 with adaptive steps.
    fn track(
        &mut self,
        start: Configuration,
        from: &AngleAssignment,
        to: &AngleAssignment,
        phase: Phase,
        s_of: impl Fn(f64) -> f64,
        min_step: f64,
    ) -> Result<Configuration, SolveError> {
        let mut cur = start;
        let mut lam = 0.0;
        let mut step: f64 = 0.1;
        while lam < 1.0 {
            let next = (lam + step).min(1.0);
            let tgt = from.lerp(to, next)?;
            let out = self.lm(&tgt, &cur)?;
            let ok = out.converged && (phase == Phase::Warmup || self.pattern_gates_hold(&out.cfg).is_ok());
            if ok {
                cur = out.cfg;
                lam = next;
                let max_ng = cur.max_non_gauge_radius();
                if phase == Phase::Homotopy && max_ng >= FRAC_PI_2 {
                    self.report.radius_bound_violations += 1;
                }
                self.report.steps.push(StepRecord {
                    phase,
                    s: s_of(lam),
                    iterations: out.iterations,
                    residual_inf: out.residual_inf,
                    max_non_gauge_radius: max_ng,
                });
                step = (step * 1.5).min(0.5);
            } else {
                self.report.rejected_steps += 1;
                step /= 2.0;
                if step < min_step {
                    let partial = self.partial(&cur);
                    return Err(SolveError::HomotopyStalled { s: s_of(lam), partial });
                }
            }
        }
        Ok(cur)
    }

    fn finish(
        mut self,
        cfg: Configuration,
        target: &AngleAssignment,
    ) -> Result<(Configuration, SolveReport), SolveError> {
        let r = residual(self.t, target, &cfg)?;
        self.report.residual_inf = inf_norm(&r);
        let j = jacobian(self.t, &cfg)?;
        let sv = j.singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        self.report.jacobian_condition = Some(if lo > 0.0 { hi / lo } else { f64::INFINITY });
        self.report.finish(self.t, &cfg);
        Ok((cfg, self.report))
    }
}

fn check_target(t: &Triangulation, target: &AngleAssignment) -> Result<(), SolveError> {
    let report = check_w(t, target, CheckOptions::default())?;
    if !report.pass() {
        return Err(SolveError::ConditionsViolated(
            report.violations.iter().map(|v| v.describe()).collect(),
        ));
    }
    Ok(())
}

/// Computes a gauge-normalised pattern with overlap angles `target`.
pub fn solve(
    t: &Triangulation,
    target: &AngleAssignment,
    opts: &SolveOptions,
) -> Result<(Configuration, SolveReport), SolveError> {
    check_target(t, target)?;
    let gauge = opts.gauge_face.unwrap_or(t.faces()[0]);
    let (start, layout) = match packing_configuration(t, gauge, opts.seed)? {
        Some(cfg) => (cfg, StartLayout::Packing),
        None => (initial_configuration(t, gauge, opts.seed)?, StartLayout::Tutte),
    };
    let (cfg, mut report) = solve_from(t, target, start, opts)?;
    report.start = layout;
    Ok((cfg, report))
}

/// As [`solve`], starting from a given configuration. Its gauge caps need not
/// have radius π/2: the iteration keeps them fixed until the homotopy start,
/// where the result is moved into normal form.
pub fn solve_from(
    t: &Triangulation,
    target: &AngleAssignment,
    start: Configuration,
    opts: &SolveOptions,
) -> Result<(Configuration, SolveReport), SolveError> {
    check_target(t, target)?;
    let mut solver = Solver::new(t, target, *opts);
    let s0 = opts.homotopy_start;
    let start_target = target.interpolate(s0)?;

    let direct = solver.lm(&start_target, &start)?;
    let at_s0 = if direct.converged && solver.pattern_gates_hold(&direct.cfg).is_ok() {
        solver.report.steps.push(StepRecord {
            phase: Phase::Homotopy,
            s: s0,
            iterations: direct.iterations,
            residual_inf: direct.residual_inf,
            max_non_gauge_radius: direct.cfg.max_non_gauge_radius(),
        });
        direct.cfg
    } else {
        let own = AngleAssignment::new(t.edges(), start.angles(t)?)?;
        let cfg = solver.track(start, &own, &start_target, Phase::Warmup, |l| l, 1e-6)?;
        if let Err(reason) = solver.pattern_gates_hold(&cfg) {
            let partial = solver.partial(&cfg);
            return Err(SolveError::LeftFeasibleRegion { reason, partial });
        }
        cfg
    };
    let at_s0 = gauge_project(&at_s0)?;
    if at_s0.max_non_gauge_radius() >= FRAC_PI_2 {
        solver.report.radius_bound_violations += 1;
    }
    let cfg = if s0 < 1.0 {
        solver.track(
            at_s0,
            &start_target,
            target,
            Phase::Homotopy,
            |l| s0 + l * (1.0 - s0),
            opts.min_homotopy_step / (1.0 - s0),
        )?
    } else {
        at_s0
    };
    solver.finish(cfg, target)
}

/// Moves a solved configuration for `from` to one for `to` along the
/// straight path between the two targets.
pub fn continue_solution(
    t: &Triangulation,
    cfg: Configuration,
    from: &AngleAssignment,
    to: &AngleAssignment,
    opts: &SolveOptions,
) -> Result<(Configuration, SolveReport), SolveError> {
    check_target(t, to)?;
    let mut solver = Solver::new(t, to, *opts);
    let cfg = solver.track(cfg, from, to, Phase::Continuation, |l| l, opts.min_homotopy_step)?;
    solver.finish(cfg, to)
}

/// Caps of the regular octahedral pattern with overlap angle `theta`, centres
/// on the coordinate axes in [`crate::catalog::octahedron`] order.
pub fn symmetric_octahedron(theta: f64) -> Vec<Cap> {
    let rho = (1.0 / theta.cos().sqrt()).atan();
    crate::catalog::octahedron_positions()
        .into_iter()
        .map(|p| Cap {
            center: SphPoint::try_from(p).expect("unit"),
            radius: rho,
        })
        .collect()
}

/// Random configuration near `cfg` with the same chart, used for testing the
/// Jacobian away from solutions.
pub fn perturb(cfg: &Configuration, scale: f64, seed: u64) -> Option<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = chart_dimension(cfg.len());
    let delta = DVector::from_fn(dim, |_, _| rng.gen_range(-scale..=scale));
    apply_step(cfg, &delta)
}
