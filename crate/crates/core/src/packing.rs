//! Tangency circle packing of a triangulated sphere.
//!
//! One vertex of minimum degree is sent to the outside of the unit disc, its
//! neighbours become horocycles and the rest get hyperbolic radii with angle
//! sum 2π (the maximal packing). The disc picture is then lifted to the
//! sphere and balanced by a Lorentz boost.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Complex;

use crate::complex::Triangulation;
use crate::polyhedron::{boost_to_origin, cap_of_normal, lorentz_apply, plane_normal, MinkowskiVec};
use crate::sphere_geom::{sph_dist, Cap, SphPoint, Vec3};

type C64 = Complex<f64>;

/// Angle sums must match 2π to this accuracy.
const ANGLE_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 20_000;

/// Angle at a circle of s-radius `sv` (`s = e^{−h}`, zero for a horocycle)
/// in the triangle formed with tangent neighbours `su`, `sw`.
pub fn corner_angle(sv: f64, su: f64, sw: f64) -> f64 {
    let p = sv * su;
    let q = sv * sw;
    let r = su * sw;
    let num = (1.0 + p * p) * (1.0 + q * q) - 2.0 * sv * sv * (1.0 + r * r);
    let den = (1.0 - p * p) * (1.0 - q * q);
    (num / den).clamp(-1.0, 1.0).acos()
}

struct Layout {
    inf: usize,
    boundary: Vec<bool>,
    s: Vec<f64>,
}

impl Layout {
    fn angle_sum(&self, t: &Triangulation, v: usize, sv: f64) -> f64 {
        let nb = t.neighbors(v);
        (0..nb.len())
            .map(|i| corner_angle(sv, self.s[nb[i]], self.s[nb[(i + 1) % nb.len()]]))
            .sum()
    }

    /// Gauss–Seidel sweeps; each interior radius is solved exactly against
    /// its current neighbours by bisection (the angle sum increases with `s`).
    fn relax(&mut self, t: &Triangulation) -> bool {
        let interior: Vec<usize> = (0..t.vertex_count())
            .filter(|&v| v != self.inf && !self.boundary[v])
            .collect();
        for _ in 0..MAX_SWEEPS {
            let worst = interior
                .iter()
                .map(|&v| (self.angle_sum(t, v, self.s[v]) - 2.0 * PI).abs())
                .fold(0.0, f64::max);
            if worst < ANGLE_TOL {
                return true;
            }
            for &v in &interior {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.angle_sum(t, v, mid) < 2.0 * PI {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                self.s[v] = 0.5 * (lo + hi);
            }
        }
        false
    }
}

/// Disc automorphism taking `a` to 0.
fn to_origin(a: C64, z: C64) -> C64 {
    (z - a) / (C64::new(1.0, 0.0) - a.conj() * z)
}

fn from_origin(a: C64, z: C64) -> C64 {
    (z + a) / (C64::new(1.0, 0.0) + a.conj() * z)
}

/// Euclidean circle through three points.
fn circumcircle(a: C64, b: C64, c: C64) -> (C64, f64) {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    let (nb, nc) = (b.norm_sqr(), c.norm_sqr());
    let o = C64::new(c.im * nb - b.im * nc, b.re * nc - c.re * nb) / d;
    (o + a, o.norm())
}

/// Inverse stereographic projection; the unit circle goes to the equator and
/// the disc to the southern hemisphere.
fn lift(w: C64) -> Vec3 {
    let q = w.norm_sqr();
    Vec3::new(2.0 * w.re, 2.0 * w.im, q - 1.0) / (q + 1.0)
}

fn lift_circle(center: C64, radius: f64) -> Cap {
    let dir = if center.norm() > 1e-15 {
        center / center.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let near = lift(dir * (center.norm() - radius));
    let far = lift(dir * (center.norm() + radius));
    Cap {
        center: SphPoint::new(near + far).expect("endpoints are not antipodal"),
        radius: 0.5 * near.dot(&far).clamp(-1.0, 1.0).acos(),
    }
}

/// Tangency packing with one cap per vertex, adjacent caps touching and
/// non-adjacent ones apart. `None` when the layout cannot be completed from
/// interior circles (some boundary vertex sees no interior neighbour).
pub fn tangency_packing(t: &Triangulation) -> Option<Vec<Cap>> {
    let n = t.vertex_count();
    let inf = (0..n).min_by_key(|&v| t.degree(v))?;
    let mut boundary = vec![false; n];
    for &u in t.neighbors(inf) {
        boundary[u] = true;
    }
    let is_interior = |v: usize| v != inf && !boundary[v];
    let root = (0..n).find(|&v| is_interior(v))?;
    let mut layout = Layout {
        inf,
        s: (0..n).map(|v| if is_interior(v) { 0.5 } else { 0.0 }).collect(),
        boundary: boundary.clone(),
    };
    if !layout.relax(t) {
        return None;
    }
    let s = &layout.s;
    let h = |v: usize| -s[v].ln();

    // hyperbolic centres of interior circles, ideal points of horocycles
    let mut pos: Vec<Option<C64>> = vec![None; n];
    let place = |v: usize, dir: C64, from: usize, at: C64| -> C64 {
        let z = if is_interior(v) {
            dir * ((h(from) + h(v)) / 2.0).tanh()
        } else {
            dir
        };
        from_origin(at, z)
    };
    pos[root] = Some(C64::new(0.0, 0.0));
    let first = t.neighbors(root)[0];
    pos[first] = Some(place(first, C64::new(1.0, 0.0), root, C64::new(0.0, 0.0)));
    let mut queue: VecDeque<usize> = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let at = pos[v].expect("queued vertices are placed");
        let nb = t.neighbors(v);
        let d = nb.len();
        let start = match (0..d).find(|&i| pos[nb[i]].is_some()) {
            Some(i) => i,
            None => continue,
        };
        // walk the rotation at v, turning by the corner angle each time
        let mut dir = to_origin(at, pos[nb[start]].unwrap());
        dir /= dir.norm();
        for k in 0..d {
            let (u, w) = (nb[(start + k) % d], nb[(start + k + 1) % d]);
            if u == inf || w == inf {
                break;
            }
            let turn = corner_angle(s[v], s[u], s[w]);
            dir *= C64::from_polar(1.0, turn);
            if pos[w].is_none() {
                pos[w] = Some(place(w, dir, v, at));
                if is_interior(w) {
                    queue.push_back(w);
                }
            }
        }
        // and the other way, in case `inf` cut the walk short
        let mut dir = to_origin(at, pos[nb[start]].unwrap());
        dir /= dir.norm();
        for k in 0..d {
            let (u, w) = (nb[(start + d - k) % d], nb[(start + 2 * d - k - 1) % d]);
            if u == inf || w == inf {
                break;
            }
            let turn = corner_angle(s[v], s[u], s[w]);
            dir *= C64::from_polar(1.0, -turn);
            if pos[w].is_none() {
                pos[w] = Some(place(w, dir, v, at));
                if is_interior(w) {
                    queue.push_back(w);
                }
            }
        }
    }

    // Euclidean circles in the disc, each drawn around an interior circle
    // moved to the origin
    let mut caps = Vec::with_capacity(n);
    for v in 0..n {
        if v == inf {
            caps.push(Cap {
                center: SphPoint::from_xyz(0.0, 0.0, 1.0).expect("unit"),
                radius: FRAC_PI_2,
            });
            continue;
        }
        let p = pos[v]?;
        let points = if is_interior(v) {
            let e = (h(v) / 2.0).tanh();
            [C64::new(e, 0.0), C64::new(-e, 0.0), C64::new(0.0, e)].map(|z| from_origin(p, z))
        } else {
            let u = *t.neighbors(v).iter().find(|&&u| is_interior(u) && pos[u].is_some())?;
            let a = pos[u]?;
            let zeta = to_origin(a, p);
            let rho = (1.0 - (h(u) / 2.0).tanh()) / 2.0;
            let c = zeta * (1.0 - rho);
            let pts = [zeta, zeta * (1.0 - 2.0 * rho), c + zeta * C64::new(0.0, rho)];
            pts.map(|z| from_origin(a, z))
        };
        let (c, r) = circumcircle(points[0], points[1], points[2]);
        caps.push(lift_circle(c, r));
    }
    Some(balance(caps))
}

/// Lorentz boost moving the Euclidean mean of the cap centres towards the
/// origin, so that no region of the sphere is crowded.
fn balance(mut caps: Vec<Cap>) -> Vec<Cap> {
    let mean = |caps: &[Cap]| caps.iter().map(|c| c.center.vec()).sum::<Vec3>() / caps.len() as f64;
    let mut step = 1.0;
    for _ in 0..200 {
        let m = mean(&caps);
        if m.norm() < 1e-9 || step < 1e-9 {
            break;
        }
        let mut best: Option<(f64, Vec<Cap>)> = None;
        for sign in [1.0, -1.0] {
            let u = m * (sign * step);
            let c = MinkowskiVec::new(u.x, u.y, u.z, (1.0 + u.norm_squared()).sqrt());
            let l = boost_to_origin(&c);
            let moved: Option<Vec<Cap>> = caps
                .iter()
                .map(|k| plane_normal(k).ok().map(|nv| cap_of_normal(&lorentz_apply(&l, &nv))))
                .collect();
            if let Some(moved) = moved {
                let norm = mean(&moved).norm();
                if norm < m.norm() && best.as_ref().is_none_or(|(b, _)| norm < *b) {
                    best = Some((norm, moved));
                }
            }
        }
        match best {
            Some((_, moved)) => caps = moved,
            None => step /= 2.0,
        }
    }
    caps
}

/// Smallest gap `d − r_u − r_v` over non-adjacent pairs, relative to `r_u + r_v`.
pub fn relative_clearance(t: &Triangulation, caps: &[Cap]) -> f64 {
    let mut worst = f64::INFINITY;
    for u in 0..caps.len() {
        for v in u + 1..caps.len() {
            if !t.is_adjacent(u, v) {
                let sum = caps[u].radius + caps[v].radius;
                worst = worst.min((sph_dist(&caps[u].center, &caps[v].center) - sum) / sum);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{bipyramid, icosahedron, octahedron};
    use crate::sphere_geom::inversive_distance;

    fn check(t: &Triangulation) {
        let caps = tangency_packing(t).expect("packing");
        for &(u, v) in t.edges() {
            let i = inversive_distance(&caps[u], &caps[v]);
            assert!((i - 1.0).abs() < 1e-8, "edge ({u}, {v}): {i}");
        }
        assert!(relative_clearance(t, &caps) > 0.0);
    }

    #[test]
    fn corner_angle_matches_law_of_cosines() {
        let (hv, hu, hw): (f64, f64, f64) = (0.7, 1.3, 0.4);
        let (a, b, c) = (hv + hu, hv + hw, hu + hw);
        let direct = ((a.cosh() * b.cosh() - c.cosh()) / (a.sinh() * b.sinh())).acos();
        let got = corner_angle((-hv).exp(), (-hu).exp(), (-hw).exp());
        assert!((got - direct).abs() < 1e-12);
        // next to two horocycles
        assert!((corner_angle(0.5, 0.0, 0.0) - (1.0f64 - 0.5).acos()).abs() < 1e-15);
    }

    #[test]
    fn packings_are_tangent() {
        check(&octahedron());
        check(&icosahedron());
        for n in [3, 5, 8, 12] {
            check(&bipyramid(n));
        }
    }

    #[test]
    fn octahedron_packing_is_regular() {
        let caps = tangency_packing(&octahedron()).unwrap();
        for c in &caps {
            assert!((c.radius - PI / 4.0).abs() < 1e-6, "{}", c.radius);
        }
    }
}
