//! Exhaustive oracles for the combinatorial checks. They use only the face
//! list, adjacency and rotation order, never the library's own enumerations.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::f64::consts::PI;

use kat_sphere::angles::AngleAssignment;
use kat_sphere::complex::{dualize, Triangulation};

/// Rotation and reflection normal form of a cyclic vertex sequence.
pub fn canonical_cycle(c: &[usize]) -> Vec<usize> {
    let k = c.len();
    let mut best: Option<Vec<usize>> = None;
    for start in 0..k {
        for dir in [1isize, -1] {
            let seq: Vec<usize> = (0..k as isize)
                .map(|i| c[(start as isize + dir * i).rem_euclid(k as isize) as usize])
                .collect();
            if best.as_ref().is_none_or(|b| seq < *b) {
                best = Some(seq);
            }
        }
    }
    best.unwrap()
}

/// Every simple `k`-cycle by trying all vertex sequences.
pub fn all_cycles(t: &Triangulation, k: usize) -> BTreeSet<Vec<usize>> {
    fn go(t: &Triangulation, k: usize, path: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if path.len() == k {
            if t.is_adjacent(path[k - 1], path[0]) {
                out.insert(canonical_cycle(path));
            }
            return;
        }
        for v in 0..t.vertex_count() {
            if !path.contains(&v) && t.is_adjacent(*path.last().unwrap(), v) {
                path.push(v);
                go(t, k, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for s in 0..t.vertex_count() {
        go(t, k, &mut vec![s], &mut out);
    }
    out
}

/// Vertices strictly on each side of a cycle. Seeds come from the rotation at
/// each cycle vertex, then spread through the graph minus the cycle.
pub fn sides(t: &Triangulation, cycle: &[usize]) -> (usize, usize) {
    let k = cycle.len();
    let on: HashSet<usize> = cycle.iter().copied().collect();
    let mut seeds = [Vec::new(), Vec::new()];
    for i in 0..k {
        let (prev, v, next) = (cycle[(i + k - 1) % k], cycle[i], cycle[(i + 1) % k]);
        let rot = t.neighbors(v);
        let d = rot.len();
        let ip = rot.iter().position(|&x| x == prev).unwrap();
        let inx = rot.iter().position(|&x| x == next).unwrap();
        // walking the rotation from `next` to `prev` sweeps one side
        let mut j = (inx + 1) % d;
        while j != ip {
            if !on.contains(&rot[j]) {
                seeds[0].push(rot[j]);
            }
            j = (j + 1) % d;
        }
        let mut j = (ip + 1) % d;
        while j != inx {
            if !on.contains(&rot[j]) {
                seeds[1].push(rot[j]);
            }
            j = (j + 1) % d;
        }
    }
    let reach = |seeds: &[usize]| {
        let mut seen: HashSet<usize> = seeds.iter().copied().collect();
        let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &w in t.neighbors(v) {
                if !on.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    };
    let (a, b) = (reach(&seeds[0]), reach(&seeds[1]));
    assert!(a.is_disjoint(&b), "cycle {cycle:?} does not separate its sides");
    (a.len().min(b.len()), a.len().max(b.len()))
}

pub fn separating(t: &Triangulation, k: usize) -> BTreeSet<(Vec<usize>, (usize, usize))> {
    all_cycles(t, k)
        .into_iter()
        .map(|c| {
            let s = sides(t, &c);
            (c, s)
        })
        .filter(|(_, s)| s.0 >= 1)
        .collect()
}

/// `(u, v, w)` with `u < w` non-adjacent and both adjacent to `v`.
pub fn arcs2(t: &Triangulation) -> BTreeSet<(usize, usize, usize)> {
    let n = t.vertex_count();
    let mut out = BTreeSet::new();
    for v in 0..n {
        for u in 0..n {
            for w in u + 1..n {
                if u != v && w != v && t.is_adjacent(u, v) && t.is_adjacent(v, w) && !t.is_adjacent(u, w) {
                    out.insert((u, v, w));
                }
            }
        }
    }
    out
}

/// Prismatic circuits read off the dual polyhedron: cyclic sequences of `k`
/// dual faces, consecutive ones sharing an edge, whose `k` shared edges have
/// `2k` distinct endpoints.
pub fn prismatic(t: &Triangulation, k: usize) -> BTreeSet<Vec<usize>> {
    let dual = dualize(t);
    let faces = dual.faces();
    let shared = |a: usize, b: usize| -> Option<(usize, usize)> {
        let fa = &faces[a];
        let fb = &faces[b];
        for i in 0..fa.len() {
            let (x, y) = (fa[i], fa[(i + 1) % fa.len()]);
            for j in 0..fb.len() {
                let (p, q) = (fb[j], fb[(j + 1) % fb.len()]);
                if (x, y) == (q, p) || (x, y) == (p, q) {
                    return Some((x, y));
                }
            }
        }
        None
    };
    let mut out = BTreeSet::new();
    let n = faces.len();
    let mut path = Vec::new();
    fn go(
        n: usize,
        k: usize,
        shared: &dyn Fn(usize, usize) -> Option<(usize, usize)>,
        path: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        if path.len() == k {
            let mut ends = HashSet::new();
            for i in 0..k {
                match shared(path[i], path[(i + 1) % k]) {
                    Some((x, y)) => {
                        if !ends.insert(x) || !ends.insert(y) {
                            return;
                        }
                    }
                    None => return,
                }
            }
            out.insert(canonical_cycle(path));
            return;
        }
        for f in 0..n {
            if !path.contains(&f) && shared(*path.last().unwrap(), f).is_some() {
                path.push(f);
                go(n, k, shared, path, out);
                path.pop();
            }
        }
    }
    for s in 0..n {
        path.clear();
        path.push(s);
        go(n, k, &shared, &mut path, &mut out);
    }
    out
}

/// Verdicts of c1..c4 evaluated inequality by inequality.
pub struct ConditionOracle<'a> {
    t: &'a Triangulation,
    arcs: BTreeSet<(usize, usize, usize)>,
    sep3: Vec<Vec<usize>>,
    sep4: Vec<Vec<usize>>,
}

impl<'a> ConditionOracle<'a> {
    pub fn new(t: &'a Triangulation) -> Self {
        Self {
            t,
            arcs: arcs2(t),
            sep3: separating(t, 3).into_iter().map(|(c, _)| c).collect(),
            sep4: separating(t, 4).into_iter().map(|(c, _)| c).collect(),
        }
    }

    pub fn verdicts(&self, theta: &AngleAssignment) -> [bool; 4] {
        let t = self.t;
        let th = |u: usize, v: usize| theta.get(t.edge_id(u, v).unwrap());
        let arc_sum = |&(u, v, w): &(usize, usize, usize)| th(u, v) + th(v, w);
        let mut c1 = self.arcs.iter().all(|a| arc_sum(a) <= PI);
        // five vertices: the double tetrahedron
        if t.vertex_count() == 5 && !self.arcs.is_empty() {
            c1 &= self.arcs.iter().any(|a| arc_sum(a) < PI);
        }
        let c2 = t.faces().iter().all(|&[i, j, k]| {
            let (a, b, c) = (th(i, j), th(j, k), th(k, i));
            a + b + c > PI && a + b - c < PI && b + c - a < PI && c + a - b < PI
        });
        let cyc_sum = |c: &Vec<usize>| (0..c.len()).map(|i| th(c[i], c[(i + 1) % c.len()])).sum::<f64>();
        let c3 = self.sep3.iter().all(|c| cyc_sum(c) < PI);
        let c4 = self.sep4.iter().all(|c| cyc_sum(c) < 2.0 * PI);
        [c1, c2, c3, c4]
    }
}
