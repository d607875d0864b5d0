use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kat_sphere::angles::AngleAssignment;
use kat_sphere::catalog::{bipyramid, octahedron};
use kat_sphere::complex::Triangulation;
use kat_sphere::formats::{angles_file, complex_file, read_json, write_json, AnglesFile, EdgeAngle, PatternFile};
use kat_sphere::polyhedron::parse_off;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn complex(&self, name: &str, t: &Triangulation) -> PathBuf {
        let p = self.path(name);
        write_json(&p, &complex_file(t)).unwrap();
        p
    }

    fn angles(&self, name: &str, theta: &AngleAssignment) -> PathBuf {
        let p = self.path(name);
        write_json(&p, &angles_file(theta)).unwrap();
        p
    }

    fn octahedron(&self, theta: f64) -> (PathBuf, PathBuf) {
        let t = octahedron();
        let a = AngleAssignment::constant(t.edges(), theta).unwrap();
        (
            self.complex("oct.json", &t),
            self.angles(&format!("oct-{theta}.json"), &a),
        )
    }
}

fn kat(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    kat_env(args, None)
}

fn kat_env(args: &[&dyn AsRef<std::ffi::OsStr>], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kat-sphere"));
    cmd.env_remove("KAT_SPHERE_SEED");
    if let Some(s) = seed {
        cmd.env("KAT_SPHERE_SEED", s);
    }
    for a in args {
        cmd.arg(a);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn solve_to(ws: &Workspace, theta: f64, out: &Path) -> Output {
    let (c, a) = ws.octahedron(theta);
    kat(&[&"solve", &c, &a, &"--out", &out])
}

#[test]
fn validate_accepts_and_rejects() {
    let ws = Workspace::new();
    let (c, good) = ws.octahedron(1.3);
    let o = kat(&[&"validate", &c, &good]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("C2: pass"));
    let (_, bad) = ws.octahedron(std::f64::consts::FRAC_PI_2);
    let o = kat(&[&"validate", &c, &bad]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn degrees_flag_converts_angles() {
    let ws = Workspace::new();
    let t = octahedron();
    let c = ws.complex("oct.json", &t);
    let a = ws.path("deg.json");
    let edges = t
        .edges()
        .iter()
        .map(|&(u, v)| EdgeAngle { u, v, theta: 72.0 })
        .collect();
    write_json(&a, &AnglesFile { edges }).unwrap();
    assert_eq!(code(&kat(&[&"validate", &c, &a, &"--degrees"])), 0);
    // 72 read as radians is far outside the domain
    assert_eq!(code(&kat(&[&"validate", &c, &a])), 3);
}

#[test]
fn unreadable_inputs_exit_3() {
    let ws = Workspace::new();
    let (c, a) = ws.octahedron(1.3);
    let broken = ws.path("broken.json");
    std::fs::write(&broken, "{ \"name\": \"x\", \"faces\": [[0, 1").unwrap();
    assert_eq!(code(&kat(&[&"validate", &broken, &a])), 3);
    assert_eq!(code(&kat(&[&"validate", &c, &ws.path("missing.json")])), 3);
    assert_eq!(code(&kat(&[&"frobnicate"])), 3);
    let out = ws.path("p.json");
    assert_eq!(code(&kat(&[&"solve", &c, &a, &"--out", &out, &"--gauge", &"0,1,5"])), 3);
}

#[test]
fn solve_writes_a_verified_pattern() {
    let ws = Workspace::new();
    let out = ws.path("pattern.json");
    let o = solve_to(&ws, 1.3, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("residual_inf"));
    let file: PatternFile = read_json(&out).unwrap();
    assert!(file.residual_inf < 1e-10 && file.error.is_none());
    assert_eq!(file.radii.len(), 6);
    let c = ws.path("oct.json");
    let o = kat(&[&"verify", &c, &out, &"--samples", &"2000"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("in_mig true"));
    // centres and circle crossings already supply every witness
    let o = kat(&[&"verify", &c, &out, &"--samples", &"0"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn verify_rejects_a_damaged_pattern() {
    let ws = Workspace::new();
    let out = ws.path("pattern.json");
    solve_to(&ws, 1.3, &out);
    let mut file: PatternFile = read_json(&out).unwrap();
    // swollen caps make opposite vertices overlap
    for r in &mut file.radii {
        *r = 1.5;
    }
    let bad = ws.path("bad.json");
    write_json(&bad, &file).unwrap();
    assert_eq!(code(&kat(&[&"verify", &ws.path("oct.json"), &bad])), 2);
}

#[test]
fn inadmissible_targets_exit_2() {
    let ws = Workspace::new();
    let out = ws.path("p.json");
    assert_eq!(code(&solve_to(&ws, std::f64::consts::FRAC_PI_2, &out)), 2);
}

#[test]
fn unreachable_tolerance_exits_4_with_the_best_iterate() {
    let ws = Workspace::new();
    let (c, a) = ws.octahedron(1.3);
    let out = ws.path("p.json");
    let o = kat(&[&"solve", &c, &a, &"--out", &out, &"--tol", &"1e-30"]);
    assert_eq!(code(&o), 4);
    let file: PatternFile = read_json(&out).unwrap();
    assert!(file.error.unwrap().contains("stalled"));
    assert!(file.residual_inf.is_finite());
}

#[test]
fn reruns_are_byte_identical() {
    let ws = Workspace::new();
    let (one, two) = (ws.path("one.json"), ws.path("two.json"));
    solve_to(&ws, 1.25, &one);
    solve_to(&ws, 1.25, &two);
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&two).unwrap());

    let c = ws.path("oct.json");
    let (s1, s2) = (ws.path("one.svg"), ws.path("two.svg"));
    assert_eq!(code(&kat(&[&"render", &c, &one, &"--out", &s1])), 0);
    assert_eq!(code(&kat(&[&"render", &c, &one, &"--out", &s2])), 0);
    let svg = std::fs::read_to_string(&s1).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<circle").count(), 6);
    assert_eq!(svg, std::fs::read_to_string(&s2).unwrap());
}

#[test]
fn seed_environment_variable_overrides_the_flag() {
    let ws = Workspace::new();
    let (c, a) = ws.octahedron(1.3);
    let (out, manifest) = (ws.path("p.json"), ws.path("run.json"));
    let o = kat_env(
        &[
            &"solve",
            &c,
            &a,
            &"--out",
            &out,
            &"--seed",
            &"3",
            &"--manifest",
            &manifest,
        ],
        Some("41"),
    );
    assert_eq!(code(&o), 0);
    let file: PatternFile = read_json(&out).unwrap();
    assert_eq!(file.report.unwrap().seed, 41);
    let m: serde_json::Value = read_json(&manifest).unwrap();
    assert_eq!(m["seed"], 41);
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["command"], "solve");
}

#[test]
fn polyhedron_exports_off() {
    let ws = Workspace::new();
    let (c, a) = ws.octahedron(1.3);
    let pattern = ws.path("p.json");
    solve_to(&ws, 1.3, &pattern);
    let off = ws.path("cube.off");
    let o = kat(&[&"polyhedron", &c, &pattern, &a, &"--off", &off]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("vertices 8 faces 6 edges 12"));
    let mesh = parse_off(&std::fs::read_to_string(&off).unwrap()).unwrap();
    assert_eq!((mesh.vertices.len(), mesh.faces.len()), (8, 6));
}

#[test]
fn degenerate_tabulates_and_refuses_bad_starts() {
    let ws = Workspace::new();
    let t = bipyramid(4);
    let c = ws.complex("bp.json", &t);
    let a = ws.angles("bp-a.json", &AngleAssignment::constant(t.edges(), 1.2).unwrap());
    let csv = ws.path("deg.csv");
    let o = kat(&[&"degenerate", &c, &a, &"--ts", &"0,0.5,0.9", &"--out", &csv]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",ok")));

    let outside = ws.angles("bp-bad.json", &AngleAssignment::constant(t.edges(), 0.5).unwrap());
    assert_eq!(code(&kat(&[&"degenerate", &c, &outside, &"--steps", &"2"])), 2);
    assert_eq!(code(&kat(&[&"degenerate", &c, &a, &"--ts", &"0,1.5"])), 3);
}
