//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kat_sphere::angles::{check_w, AngleAssignment, CheckOptions, Condition};
use kat_sphere::catalog::{bipyramid, icosahedron, octahedron, small_catalog};
use kat_sphere::cli::degeneration_study;
use kat_sphere::complex::{dualize, prismatic_circuits, Triangulation};
use kat_sphere::polyhedron::{build_polyhedron, det_closed_form, gram, HyperbolicPolyhedron};
use kat_sphere::solver::{
    apply_step, chart_dimension, jacobian, perturb, solve, Configuration, SolveOptions, SolveReport,
};
use kat_sphere::sphere_geom::{
    common_boundary_margin, face_angles_admissible, inversive_distance, layout3, sph_dist, tri_realizable,
    triangle_quantity, triangle_quantity_product, zeta, zeta_product,
};
use kat_sphere::verify::{self, Tolerances};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn octahedron_angles(theta: f64) -> (Triangulation, AngleAssignment) {
    let t = octahedron();
    let a = AngleAssignment::constant(t.edges(), theta).unwrap();
    (t, a)
}

/// Equator edges get `eq`, edges at an apex get `apex`.
fn bipyramid_angles(n: usize, eq: f64, apex: f64) -> (Triangulation, AngleAssignment) {
    let t = bipyramid(n);
    let values = t
        .edges()
        .iter()
        .map(|&(u, v)| if u.max(v) >= n { apex } else { eq })
        .collect();
    let a = AngleAssignment::new(t.edges(), values).unwrap();
    (t, a)
}

struct Solved {
    t: Triangulation,
    theta: AngleAssignment,
    cfg: Configuration,
    report: SolveReport,
    elapsed: Duration,
}

fn solved(t: Triangulation, theta: AngleAssignment) -> Result<Solved, String> {
    let start = Instant::now();
    let (cfg, report) = solve(&t, &theta, &SolveOptions::default()).map_err(|e| format!("{}: {e}", t.name()))?;
    Ok(Solved {
        t,
        theta,
        cfg,
        report,
        elapsed: start.elapsed(),
    })
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 3];
    for _ in 0..1000 {
        let th: [f64; 3] = [0; 3].map(|_| rng.gen_range(0.0..PI));
        let det = gram(th).lu().determinant();
        worst[0] = worst[0].max((det - det_closed_form(th)).abs());
        worst[1] = worst[1].max((zeta(th) - zeta_product(th)).abs());
        let l: [f64; 3] = [0; 3].map(|_| rng.gen_range(0.0..PI));
        worst[2] = worst[2].max((triangle_quantity(l) - triangle_quantity_product(l)).abs());
    }
    let elapsed = start.elapsed();
    ensure(worst.iter().all(|&w| w <= 1e-12), || {
        format!("identity errors {worst:?}")
    })?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "max errors det {:.1e}, zeta {:.1e}, four-sine {:.1e}; {elapsed:.0?}",
        worst[0], worst[1], worst[2]
    ))
}

fn criterion2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut done = 0;
    let (mut worst_len, mut worst_ang, mut min_margin) = (0.0f64, 0.0f64, f64::INFINITY);
    while done < 1000 {
        let th: [f64; 3] = [0; 3].map(|_| rng.gen_range(0.0..PI));
        if !face_angles_admissible(th) {
            continue;
        }
        let r: [f64; 3] = [0; 3].map(|_| rng.gen_range(0.01..PI - 0.01));
        done += 1;
        let cert = tri_realizable(r, th).map_err(|e| format!("r {r:?} θ {th:?}: {e}"))?;
        ensure(cert.triangle_inequalities && cert.triangle_quantity > 0.0, || {
            format!("r {r:?} θ {th:?}: certificate {cert:?}")
        })?;
        let lay = layout3(r, th).map_err(|e| format!("r {r:?} θ {th:?}: {e}"))?;
        let caps = lay.caps();
        for (m, (a, b)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
            let d = sph_dist(&caps[a].center, &caps[b].center);
            worst_len = worst_len.max((d - cert.lengths[m]).abs());
            let ang = inversive_distance(&caps[a], &caps[b]).clamp(-1.0, 1.0).acos();
            worst_ang = worst_ang.max((ang - th[m]).abs());
        }
        min_margin = min_margin.min(common_boundary_margin(&caps));
    }
    ensure(worst_len <= 1e-10 && worst_ang <= 1e-10, || {
        format!("layout errors: length {worst_len:.1e}, angle {worst_ang:.1e}")
    })?;
    ensure(min_margin > 1e-9, || {
        format!("three boundaries nearly concurrent: {min_margin:.1e}")
    })?;
    Ok(format!(
        "1000 triples; length error {worst_len:.1e}, angle error {worst_ang:.1e}, min boundary margin {min_margin:.1e}"
    ))
}

fn criterion3(s: &Solved) -> Outcome {
    let theta = 2.0 * PI / 5.0;
    ensure(s.report.residual_inf < 1e-8, || {
        format!("residual {:.1e}", s.report.residual_inf)
    })?;
    let angles = s.cfg.angles(&s.t).map_err(|e| e.to_string())?;
    let ang_err = angles.iter().map(|a| (a - theta).abs()).fold(0.0, f64::max);
    ensure(ang_err <= 1e-8, || format!("angle error {ang_err:.1e}"))?;
    let margin = verify::separation_margin(&s.t, &s.cfg);
    ensure(
        (margin - 0.61803).abs() <= 1e-5 && (margin - 2.0 * theta.cos()).abs() <= 1e-6,
        || format!("separation margin {margin}"),
    )?;
    // radii of the centred pattern against arccot √cos θ
    let q = build_polyhedron(&s.t, &s.cfg, &s.theta).map_err(|e| e.to_string())?;
    let rho = (1.0 / theta.cos().sqrt()).atan();
    let rad_err = q
        .centered()
        .caps()
        .iter()
        .map(|c| (c.radius - rho).abs())
        .fold(0.0, f64::max);
    ensure(rad_err <= 1e-8, || format!("centred radius error {rad_err:.1e}"))?;
    ensure(s.elapsed < Duration::from_secs(10), || format!("took {:?}", s.elapsed))?;
    Ok(format!(
        "residual {:.1e}, angle error {ang_err:.1e}, margin {margin:.9}, centred radius error {rad_err:.1e}; {:.0?}",
        s.report.residual_inf, s.elapsed
    ))
}

fn criterion4(s: &Solved) -> Outcome {
    let w = check_w(&s.t, &s.theta, CheckOptions::default()).map_err(|e| e.to_string())?;
    ensure(w.pass(), || format!("angles rejected: {:?}", w.violations))?;
    ensure(!s.t.separating_cycles(3).is_empty(), || "no separating triangle".into())?;
    let r = verify::verify(&s.t, &s.cfg, &Tolerances::default());
    ensure(r.in_me && r.in_m_theta && r.in_mg && r.in_mig, || {
        format!("membership {:?}", (r.in_me, r.in_m_theta, r.in_mg, r.in_mig))
    })?;
    ensure(r.cr.pass && r.is_t_type && r.gates_pass(), || {
        format!("cr {} t-type {} margin {}", r.cr.pass, r.is_t_type, r.separation_margin)
    })?;
    Ok(format!(
        "residual {:.1e}, {} separating triangle(s) with empty triple intersection, margin {:.4}",
        s.report.residual_inf,
        r.cr.cycles.len(),
        r.separation_margin
    ))
}

fn criterion5(s: &Solved) -> Outcome {
    let contact = verify::check_contact_graph(&s.t, &s.cfg);
    ensure(contact.pass, || format!("contact violations {:?}", contact.violations))?;
    // brute force over all pairs
    let (mut overlapping, mut disjoint) = (0, 0);
    let n = s.t.vertex_count();
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (&s.cfg.caps[u], &s.cfg.caps[v]);
            let i = inversive_distance(a, b);
            let d = sph_dist(&a.center, &b.center);
            if s.t.is_adjacent(u, v) {
                ensure(i.abs() < 1.0 && d > (a.radius - b.radius).abs(), || {
                    format!("edge {u}-{v}: I = {i}")
                })?;
                overlapping += 1;
            } else {
                ensure(d > a.radius + b.radius, || format!("pair {u}-{v} meets"))?;
                disjoint += 1;
            }
        }
    }
    ensure((overlapping, disjoint) == (30, 36), || {
        format!("{overlapping} edges, {disjoint} pairs")
    })?;
    let irr = verify::check_irreducible(&s.t, &s.cfg, 20_000);
    ensure(irr.pass && irr.samples == 20_000, || {
        format!("witnesses {:?}", irr.witnesses)
    })?;
    for (v, w) in irr.witnesses.iter().enumerate() {
        let x = w.ok_or_else(|| format!("no witness for {v}"))?;
        ensure(sph_dist(&x, &s.cfg.caps[v].center) < s.cfg.caps[v].radius, || {
            format!("witness {v} outside its cap")
        })?;
        for (u, c) in s.cfg.caps.iter().enumerate() {
            ensure(u == v || sph_dist(&x, &c.center) > c.radius, || {
                format!("witness {v} covered by {u}")
            })?;
        }
    }
    Ok(format!(
        "{overlapping} overlapping edges, {disjoint} disjoint pairs, 12/12 witnesses"
    ))
}

fn criterion6(s: &Solved) -> Outcome {
    let q: HyperbolicPolyhedron = build_polyhedron(&s.t, &s.cfg, &s.theta).map_err(|e| e.to_string())?;
    let (v, f, e) = q.counts();
    ensure((f, e, v) == (6, 12, 8), || format!("counts V {v} F {f} E {e}"))?;
    let max_norm = q
        .klein_vertices()
        .iter()
        .map(|k| Vector3::from(*k).norm())
        .fold(0.0, f64::max);
    ensure(max_norm < 1.0, || format!("vertex outside the ball: {max_norm}"))?;
    let slack = q.convexity_slack();
    ensure(slack <= 1e-9, || format!("convexity slack {slack:.1e}"))?;
    let dih = q.dihedral_max_error();
    ensure(dih <= 1e-8, || format!("dihedral error {dih:.1e}"))?;
    // centre the cube and align two face normals with the x and y axes
    let c = q.centered();
    let ex = c.face_normals[0].spatial().normalize();
    let ey = {
        let y = c.face_normals[2].spatial();
        (y - ex * ex.dot(&y)).normalize()
    };
    let rot = Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ex.cross(&ey).transpose()]);
    let expected = {
        let ct = (2.0 * PI / 5.0).cos();
        (ct / (1.0 + ct)).sqrt()
    };
    let mut worst = 0.0f64;
    for k in c.klein_vertices() {
        let k = rot * Vector3::from(k);
        for x in k.iter() {
            worst = worst.max((x.abs() - expected).abs());
        }
    }
    ensure(worst <= 1e-5, || format!("Klein coordinate error {worst:.1e}"))?;
    Ok(format!(
        "V/F/E 8/6/12, max Klein norm {max_norm:.5}, convexity slack {slack:.2}, dihedral error {dih:.1e}, \
         |coordinate| {expected:.5} ± {worst:.1e}"
    ))
}

/// Central differences of the angle map through the chart.
fn numeric_jacobian(t: &Triangulation, cfg: &Configuration, h: f64) -> Option<nalgebra::DMatrix<f64>> {
    let dim = chart_dimension(cfg.len());
    let mut out = nalgebra::DMatrix::zeros(t.edge_count(), dim);
    for j in 0..dim {
        let mut d = DVector::zeros(dim);
        d[j] = h;
        let plus = apply_step(cfg, &d)?.angles(t).ok()?;
        let minus = apply_step(cfg, &(-d)).and_then(|c| c.angles(t).ok())?;
        for e in 0..t.edge_count() {
            out[(e, j)] = (plus[e] - minus[e]) / (2.0 * h);
        }
    }
    Some(out)
}

fn criterion7(solutions: &[&Solved]) -> Outcome {
    let oct = solutions[0];
    let mut worst = 0.0f64;
    let mut tested = 0;
    let mut seed = 0;
    while tested < 20 {
        seed += 1;
        ensure(seed < 200, || "could not draw 20 valid perturbations".into())?;
        let Some(cfg) = perturb(&oct.cfg, 0.05, seed) else {
            continue;
        };
        let Ok(j) = jacobian(&oct.t, &cfg) else { continue };
        let Some(fd) = numeric_jacobian(&oct.t, &cfg, 1e-6) else {
            continue;
        };
        let scale = j.amax().max(1.0);
        worst = worst.max((&j - &fd).amax() / scale);
        tested += 1;
    }
    ensure(worst <= 1e-5, || format!("relative Jacobian error {worst:.1e}"))?;
    let mut worst_ratio = f64::INFINITY;
    for s in solutions {
        let sv = jacobian(&s.t, &s.cfg).map_err(|e| e.to_string())?.singular_values();
        let ratio = sv.min() / sv.max();
        worst_ratio = worst_ratio.min(ratio);
        ensure(ratio > 1e-8, || format!("{}: σmin/σmax = {ratio:.1e}", s.t.name()))?;
    }
    Ok(format!(
        "20 perturbations, relative error {worst:.1e}; min σmin/σmax at solutions {worst_ratio:.1e}"
    ))
}

fn criterion8(solutions: &[&Solved]) -> Outcome {
    let mut parts = Vec::new();
    for s in solutions {
        let n = s.report.radius_bound_violations;
        ensure(n == 0, || format!("{}: {n} violations", s.t.name()))?;
        let steps = s.report.steps.len();
        parts.push(format!("{} {steps} steps", s.t.name()));
    }
    Ok(format!("no radius bound violations ({})", parts.join(", ")))
}

fn criterion9() -> Outcome {
    let theta = 2.0 * PI / 5.0;
    let (t, a) = octahedron_angles(theta);
    let ts = [0.0, 0.5, 0.9, 0.99];
    let (rows, failure) =
        degeneration_study(&t, &a, PI / 2.0, &ts, &SolveOptions::default()).map_err(|e| e.to_string())?;
    ensure(failure.is_none() && rows.len() == ts.len(), || {
        format!("stopped early: {failure:?}")
    })?;
    let mut worst = 0.0f64;
    for (r, &s) in rows.iter().zip(&ts) {
        let th = (1.0 - s) * theta + s * PI / 2.0;
        worst = worst.max((r.separation_margin - 2.0 * th.cos()).abs());
    }
    ensure(worst <= 1e-4, || format!("margin error {worst:.1e}"))?;
    for w in rows.windows(2) {
        ensure(w[1].separation_margin < w[0].separation_margin, || {
            "margin not decreasing".into()
        })?;
        ensure(w[1].max_non_gauge_radius > w[0].max_non_gauge_radius, || {
            "radius not increasing".into()
        })?;
    }
    let margins: Vec<String> = rows.iter().map(|r| format!("{:.6}", r.separation_margin)).collect();
    Ok(format!("margins [{}], error {worst:.1e}", margins.join(", ")))
}

fn criterion10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut curves, mut verdicts, mut fails) = (0, 0, [0usize; 4]);
    for t in small_catalog() {
        let name = t.name().to_string();
        let lib_arcs: BTreeSet<_> = t
            .arcs2()
            .iter()
            .map(|a| (a.vertices[0], a.vertices[1], a.vertices[2]))
            .collect();
        ensure(lib_arcs == common::arcs2(&t), || format!("{name}: arcs differ"))?;
        curves += lib_arcs.len();
        for k in [3, 4] {
            let lib: BTreeSet<_> = t
                .separating_cycles(k)
                .iter()
                .map(|c| (common::canonical_cycle(&c.vertices), c.sides.unwrap()))
                .collect();
            ensure(lib == common::separating(&t, k), || {
                format!("{name}: separating {k}-cycles differ")
            })?;
            curves += lib.len();
            let lib: BTreeSet<_> = prismatic_circuits(&dualize(&t), k)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|c| common::canonical_cycle(&c.vertices))
                .collect();
            ensure(lib == common::prismatic(&t, k), || {
                format!("{name}: prismatic {k}-circuits differ")
            })?;
            curves += lib.len();
        }
        let oracle = common::ConditionOracle::new(&t);
        for _ in 0..100 {
            let lo = rng.gen_range(0.15..0.55) * PI;
            let spread = rng.gen_range(0.0..0.25) * PI;
            let values = (0..t.edge_count()).map(|_| lo + rng.gen_range(0.0..=spread)).collect();
            let theta = AngleAssignment::new(t.edges(), values).unwrap();
            let lib = check_w(&t, &theta, CheckOptions::default()).map_err(|e| e.to_string())?;
            let got = [Condition::C1, Condition::C2, Condition::C3, Condition::C4].map(|c| lib.passed(c).unwrap());
            let want = oracle.verdicts(&theta);
            ensure(got == want, || format!("{name}: verdicts {got:?} vs direct {want:?}"))?;
            for (i, ok) in want.iter().enumerate() {
                fails[i] += usize::from(!ok);
            }
            verdicts += 1;
        }
    }
    Ok(format!(
        "{curves} curves matched; {verdicts} angle functions, failures per condition c1..c4 {fails:?}"
    ))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let ms = start.elapsed().as_secs_f64() * 1e3;
    match &outcome {
        Ok(detail) => println!("PASS {name} ({ms:.0} ms): {detail}"),
        Err(reason) => println!("FAIL {name} ({ms:.0} ms): {reason}"),
    }
    outcome.is_ok()
}

fn main() {
    let oct = solved(octahedron(), octahedron_angles(2.0 * PI / 5.0).1);
    let bip = {
        let (t, a) = bipyramid_angles(3, 0.3, 1.5);
        solved(t, a)
    };
    let ico = {
        let t = icosahedron();
        let a = AngleAssignment::constant(t.edges(), 0.45 * PI).unwrap();
        solved(t, a)
    };
    let need = |s: &Result<Solved, String>| -> Result<(), String> { s.as_ref().map(|_| ()).map_err(Clone::clone) };

    let mut ok = true;
    ok &= run("criterion 1: closed-form identities", criterion1);
    ok &= run("criterion 2: three-circle realizability", criterion2);
    ok &= run("criterion 3: octahedron at 2π/5", || {
        need(&oct)?;
        criterion3(oct.as_ref().unwrap())
    });
    ok &= run("criterion 4: double tetrahedron gates", || {
        need(&bip)?;
        criterion4(bip.as_ref().unwrap())
    });
    ok &= run("criterion 5: icosahedron contact graph and witnesses", || {
        need(&ico)?;
        criterion5(ico.as_ref().unwrap())
    });
    ok &= run("criterion 6: cube from the octahedral pattern", || {
        need(&oct)?;
        criterion6(oct.as_ref().unwrap())
    });
    ok &= run("criterion 7: Jacobian and conditioning", || {
        need(&oct)?;
        need(&bip)?;
        need(&ico)?;
        criterion7(&[oct.as_ref().unwrap(), bip.as_ref().unwrap(), ico.as_ref().unwrap()])
    });
    ok &= run("criterion 8: radius bound along the homotopy", || {
        need(&oct)?;
        need(&bip)?;
        need(&ico)?;
        criterion8(&[oct.as_ref().unwrap(), bip.as_ref().unwrap(), ico.as_ref().unwrap()])
    });
    ok &= run("criterion 9: degeneration toward right angles", criterion9);
    ok &= run("criterion 10: combinatorial oracles", criterion10);
    if !ok {
        std::process::exit(1);
    }
}
