//! Small named triangulations used by examples, tests and the CLI.

use crate::complex::Triangulation;

/// Octahedron on `+x, -x, +y, -y, +z, -z` (vertices 0..6 in that order).
pub fn octahedron() -> Triangulation {
    let mut faces = Vec::with_capacity(8);
    for sx in [1i32, -1] {
        for sy in [1i32, -1] {
            for sz in [1i32, -1] {
                let a = if sx > 0 { 0 } else { 1 };
                let b = if sy > 0 { 2 } else { 3 };
                let c = if sz > 0 { 4 } else { 5 };
                faces.push(if sx * sy * sz > 0 { [a, b, c] } else { [a, c, b] });
            }
        }
    }
    Triangulation::new("octahedron", &faces).expect("octahedron")
}

/// Unit vectors of the octahedron vertices, matching [`octahedron`].
pub fn octahedron_positions() -> Vec<[f64; 3]> {
    vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ]
}

/// Unit vectors of the regular icosahedron, matching [`icosahedron`].
pub fn icosahedron_positions() -> Vec<[f64; 3]> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::with_capacity(12);
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            pts.push([0.0, s1, s2 * phi]);
            pts.push([s1, s2 * phi, 0.0]);
            pts.push([s2 * phi, 0.0, s1]);
        }
    }
    pts.iter()
        .map(|p| {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            [p[0] / n, p[1] / n, p[2] / n]
        })
        .collect()
}

pub fn icosahedron() -> Triangulation {
    let pts = icosahedron_positions();
    let d2 = |a: &[f64; 3], b: &[f64; 3]| (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>();
    let edge2 = (0..12)
        .filter(|&j| j != 0)
        .map(|j| d2(&pts[0], &pts[j]))
        .fold(f64::MAX, f64::min);
    let close = |i: usize, j: usize| (d2(&pts[i], &pts[j]) - edge2).abs() < 1e-9;
    let mut faces = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            for k in j + 1..12 {
                if close(i, j) && close(j, k) && close(i, k) {
                    let (a, b, c) = (pts[i], pts[j], pts[k]);
                    let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                        + a[2] * (b[0] * c[1] - b[1] * c[0]);
                    faces.push(if det > 0.0 { [i, j, k] } else { [i, k, j] });
                }
            }
        }
    }
    Triangulation::new("icosahedron", &faces).expect("icosahedron")
}

/// Bipyramid over an `n`-gon: equator `0..n`, apexes `n` (north) and `n + 1`.
/// `bipyramid(3)` is the double tetrahedron.
pub fn bipyramid(n: usize) -> Triangulation {
    assert!(n >= 3);
    let mut faces = Vec::with_capacity(2 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push([i, j, n]);
        faces.push([j, i, n + 1]);
    }
    Triangulation::new(format!("bipyramid{n}"), &faces).expect("bipyramid")
}

/// Stacked triangulation: start from a tetrahedron and insert `k` vertices,
/// each into the face chosen by `choose(step, face_count)`.
pub fn stacked(k: usize, choose: impl Fn(usize, usize) -> usize) -> Triangulation {
    assert!(k >= 1, "a tetrahedron alone is too small");
    let mut faces = vec![[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]];
    for step in 0..k {
        let v = 4 + step;
        let fi = choose(step, faces.len()) % faces.len();
        let [a, b, c] = faces.swap_remove(fi);
        faces.push([a, b, v]);
        faces.push([b, c, v]);
        faces.push([c, a, v]);
    }
    Triangulation::new(format!("stacked{k}"), &faces).expect("stacked")
}

/// The catalogue of complexes with at most nine vertices exercised by the
/// brute-force cross checks.
pub fn small_catalog() -> Vec<Triangulation> {
    let mut out = vec![octahedron()];
    for n in 3..=7 {
        out.push(bipyramid(n));
    }
    for k in 1..=5 {
        out.push(stacked(k, |s, m| (s * 7 + 3) % m));
        out.push(stacked(k, |s, m| m - 1 - (s % m)));
    }
    out
}
