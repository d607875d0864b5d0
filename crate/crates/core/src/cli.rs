//! Command-line front end: validate, solve, verify, polyhedron, render and
//! degenerate.
//!
//! Exit codes: 0 success, 2 condition or gate failure, 3 unreadable input,
//! 4 numerical failure, 5 inconclusive.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::angles::{check_a, check_w, AngleAssignment, CheckOptions, ConditionReport};
use crate::complex::Triangulation;
use crate::formats::{self, FormatError, PatternFile};
use crate::polyhedron::{build_polyhedron, export_off};
use crate::solver::{self, Configuration, SolveError, SolveOptions};
use crate::sphere_geom::{sph_dist, tangent_basis, Cap, SphPoint, Vec3};
use crate::verify::{self, fibonacci_sphere, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GATE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_INCONCLUSIVE: i32 = 5;

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "KAT_SPHERE_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "kat-sphere",
    version,
    about = "Circle patterns with obtuse overlap angles on the sphere"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the angle conditions for a triangulation (or, with --dual, a
    /// trivalent polyhedron).
    Validate {
        complex: PathBuf,
        angles: PathBuf,
        #[arg(long)]
        dual: bool,
        /// Tolerance for treating values as equal to the bound.
        #[arg(long, default_value_t = 0.0)]
        slack: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Compute a circle pattern realising the angles.
    Solve {
        complex: PathBuf,
        angles: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0.5)]
        s0: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gauge face as three comma-separated vertices; defaults to face 0.
        #[arg(long, value_delimiter = ',', num_args = 3)]
        gauge: Option<Vec<usize>>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check a pattern against the contact graph, irreducibility and the
    /// other gates.
    Verify {
        complex: PathBuf,
        pattern: PathBuf,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = verify::EPS_ANG)]
        eps_ang: f64,
        #[arg(long, default_value_t = crate::sphere_geom::EPS_TAN)]
        eps_tan: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Build the hyperbolic polyhedron of a verified pattern.
    Polyhedron {
        complex: PathBuf,
        pattern: PathBuf,
        angles: PathBuf,
        #[arg(long)]
        off: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Draw the pattern as SVG under stereographic projection.
    Render {
        complex: PathBuf,
        pattern: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 800.0)]
        size: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Solve along `(1 − t)Θ + t·end` and tabulate the degeneration signals.
    Degenerate {
        complex: PathBuf,
        angles: PathBuf,
        /// Constant angle at t = 1, usually on the boundary of the admissible set.
        #[arg(long, default_value_t = FRAC_PI_2)]
        end_angle: f64,
        /// Explicit parameter values, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "steps")]
        ts: Option<Vec<f64>>,
        /// Use t = i/k for i = 0..k.
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Angles in input files (and --end-angle) are in degrees.
    #[arg(long)]
    pub degrees: bool,
    /// Write a run manifest here.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Inputs, options, timings and outputs of one run.
#[derive(Debug, Default, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub options: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub timings_ms: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
    pub exit_code: i32,
}

struct Run {
    manifest: RunManifest,
    clock: Instant,
}

impl Run {
    fn new(command: &str) -> Self {
        Self {
            manifest: RunManifest {
                command: command.to_string(),
                ..Default::default()
            },
            clock: Instant::now(),
        }
    }

    fn input(&mut self, p: &Path) {
        self.manifest.inputs.push(p.display().to_string());
    }

    fn output(&mut self, p: &Path) {
        self.manifest.outputs.push(p.display().to_string());
    }

    fn option(&mut self, k: &str, v: impl ToString) {
        self.manifest.options.insert(k.to_string(), v.to_string());
    }

    fn lap(&mut self, stage: &str) {
        let ms = self.clock.elapsed().as_secs_f64() * 1e3;
        self.manifest.timings_ms.insert(stage.to_string(), ms);
        self.clock = Instant::now();
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: e.to_string(),
        }
    }
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn effective_seed(flag: u64) -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(flag)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let (name, manifest_path) = match &cli.command {
        Command::Validate { common, .. } => ("validate", common.manifest.clone()),
        Command::Solve { common, .. } => ("solve", common.manifest.clone()),
        Command::Verify { common, .. } => ("verify", common.manifest.clone()),
        Command::Polyhedron { common, .. } => ("polyhedron", common.manifest.clone()),
        Command::Render { common, .. } => ("render", common.manifest.clone()),
        Command::Degenerate { common, .. } => ("degenerate", common.manifest.clone()),
    };
    let mut run = Run::new(name);
    let code = match dispatch(cli.command, &mut run) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    run.manifest.exit_code = code;
    if let Some(p) = manifest_path {
        if let Err(e) = formats::write_json(&p, &run.manifest) {
            eprintln!("error: {e}");
        }
    }
    code
}

fn dispatch(cmd: Command, run: &mut Run) -> Result<i32, Failure> {
    match cmd {
        Command::Validate {
            complex,
            angles,
            dual,
            slack,
            common,
        } => cmd_validate(&complex, &angles, dual, slack, common.degrees, run),
        Command::Solve {
            complex,
            angles,
            tol,
            s0,
            seed,
            gauge,
            out,
            common,
        } => {
            let opts = SolveOptions {
                residual_tol: tol,
                homotopy_start: s0,
                seed: effective_seed(seed),
                gauge_face: gauge.map(|g| [g[0], g[1], g[2]]),
                ..SolveOptions::default()
            };
            cmd_solve(&complex, &angles, &opts, &out, common.degrees, run)
        }
        Command::Verify {
            complex,
            pattern,
            samples,
            eps_ang,
            eps_tan,
            out,
            ..
        } => {
            let tol = Tolerances {
                eps_tan,
                eps_ang,
                samples,
            };
            cmd_verify(&complex, &pattern, &tol, out.as_deref(), run)
        }
        Command::Polyhedron {
            complex,
            pattern,
            angles,
            off,
            out,
            common,
        } => cmd_polyhedron(
            &complex,
            &pattern,
            &angles,
            off.as_deref(),
            out.as_deref(),
            common.degrees,
            run,
        ),
        Command::Render {
            complex,
            pattern,
            out,
            size,
            ..
        } => cmd_render(&complex, &pattern, &out, size, run),
        Command::Degenerate {
            complex,
            angles,
            end_angle,
            ts,
            steps,
            seed,
            out,
            common,
        } => {
            let ts = ts.unwrap_or_else(|| (0..steps.max(1)).map(|i| i as f64 / steps.max(1) as f64).collect());
            let end = if common.degrees {
                end_angle.to_radians()
            } else {
                end_angle
            };
            let opts = SolveOptions {
                seed: effective_seed(seed),
                ..SolveOptions::default()
            };
            cmd_degenerate(&complex, &angles, end, &ts, &opts, out.as_deref(), common.degrees, run)
        }
    }
}

fn print_conditions(report: &ConditionReport) {
    for v in &report.verdicts {
        println!("{:?}: {}", v.condition, if v.pass { "pass" } else { "FAIL" });
    }
    for v in &report.violations {
        println!("  {}", v.describe());
    }
}

fn cmd_validate(
    complex: &Path,
    angles: &Path,
    dual: bool,
    slack: f64,
    degrees: bool,
    run: &mut Run,
) -> Result<i32, Failure> {
    run.input(complex);
    run.input(angles);
    run.option("dual", dual);
    run.option("slack", slack);
    let opts = CheckOptions { slack };
    let report = if dual {
        let p = formats::load_dual_complex(complex)?;
        let theta = formats::load_angles(angles, p.edges(), degrees)?;
        check_a(&p, &theta, opts).map_err(|e| fail(EXIT_PARSE, e.to_string()))?
    } else {
        let t = formats::load_complex(complex)?;
        let theta = formats::load_angles(angles, t.edges(), degrees)?;
        check_w(&t, &theta, opts).map_err(|e| fail(EXIT_PARSE, e.to_string()))?
    };
    run.lap("validate");
    print_conditions(&report);
    Ok(if report.pass() { EXIT_OK } else { EXIT_GATE })
}

fn load_inputs(
    complex: &Path,
    angles: &Path,
    degrees: bool,
    run: &mut Run,
) -> Result<(Triangulation, AngleAssignment), Failure> {
    run.input(complex);
    run.input(angles);
    let t = formats::load_complex(complex)?;
    let theta = formats::load_angles(angles, t.edges(), degrees)?;
    Ok((t, theta))
}

fn cmd_solve(
    complex: &Path,
    angles: &Path,
    opts: &SolveOptions,
    out: &Path,
    degrees: bool,
    run: &mut Run,
) -> Result<i32, Failure> {
    let (t, theta) = load_inputs(complex, angles, degrees, run)?;
    run.option("tol", opts.residual_tol);
    run.option("s0", opts.homotopy_start);
    if let Some(g) = opts.gauge_face {
        run.option("gauge", format!("{},{},{}", g[0], g[1], g[2]));
    }
    run.manifest.seed = Some(opts.seed);
    run.lap("load");
    let result = solver::solve(&t, &theta, opts);
    run.lap("solve");
    match result {
        Ok((cfg, report)) => {
            let residual = report.residual_inf;
            let file = PatternFile::from_config(&cfg, residual, Some(report));
            formats::write_json(out, &file)?;
            run.output(out);
            let v = verify::verify(&t, &cfg, &Tolerances::default());
            run.lap("verify");
            let radii = cfg.radii();
            println!("residual_inf {residual:e}");
            println!(
                "radii {}",
                radii.iter().map(|r| format!("{r:.6}")).collect::<Vec<_>>().join(" ")
            );
            println!("separation_margin {:.9}", v.separation_margin);
            if residual > opts.residual_tol {
                return Ok(EXIT_NUMERIC);
            }
            if !v.gates_pass() {
                eprintln!("verification gates failed");
                return Ok(EXIT_GATE);
            }
            Ok(EXIT_OK)
        }
        Err(SolveError::ConditionsViolated(msgs)) => {
            for m in msgs {
                println!("  {m}");
            }
            Err(fail(EXIT_GATE, "target angles are not admissible"))
        }
        Err(e @ (SolveError::HomotopyStalled { .. } | SolveError::LeftFeasibleRegion { .. })) => {
            let partial = match &e {
                SolveError::HomotopyStalled { partial, .. } | SolveError::LeftFeasibleRegion { partial, .. } => partial,
                _ => unreachable!(),
            };
            let mut file = PatternFile::from_config(
                &partial.config,
                partial.report.residual_inf,
                Some(partial.report.clone()),
            );
            file.error = Some(e.to_string());
            formats::write_json(out, &file)?;
            run.output(out);
            Err(fail(EXIT_NUMERIC, e.to_string()))
        }
        Err(SolveError::NotAFace(a, b, c)) => Err(fail(EXIT_PARSE, format!("({a}, {b}, {c}) is not a face"))),
        Err(e) => Err(fail(EXIT_NUMERIC, e.to_string())),
    }
}

fn cmd_verify(
    complex: &Path,
    pattern: &Path,
    tol: &Tolerances,
    out: Option<&Path>,
    run: &mut Run,
) -> Result<i32, Failure> {
    run.input(complex);
    run.input(pattern);
    run.option("samples", tol.samples);
    run.option("eps_tan", tol.eps_tan);
    run.option("eps_ang", tol.eps_ang);
    let t = formats::load_complex(complex)?;
    let cfg = formats::load_pattern(pattern)?;
    if cfg.len() != t.vertex_count() {
        return Err(fail(EXIT_PARSE, "pattern and complex have different vertex counts"));
    }
    let report = verify::verify(&t, &cfg, tol);
    run.lap("verify");
    if let Some(out) = out {
        formats::write_json(out, &report)?;
        run.output(out);
    }
    println!(
        "in_me {} in_m_theta {} in_mg {} in_mig {}",
        report.in_me, report.in_m_theta, report.in_mg, report.in_mig
    );
    println!("separation_margin {:.9}", report.separation_margin);
    println!(
        "witnesses {}/{}",
        report.irreducible.witnesses.iter().filter(|w| w.is_some()).count(),
        cfg.len()
    );
    println!("t_type {} cr {}", report.is_t_type, report.cr.pass);
    Ok(verify_exit_code(&report))
}

/// A pattern that passes every gate but lacks some irreducibility witness is
/// inconclusive rather than wrong: the witness search is only a sample.
pub fn verify_exit_code(report: &verify::VerificationReport) -> i32 {
    if report.in_mig {
        EXIT_OK
    } else if report.in_mg && report.irreducible.covering_cap.is_none() {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_GATE
    }
}

fn cmd_polyhedron(
    complex: &Path,
    pattern: &Path,
    angles: &Path,
    off: Option<&Path>,
    out: Option<&Path>,
    degrees: bool,
    run: &mut Run,
) -> Result<i32, Failure> {
    let (t, theta) = load_inputs(complex, angles, degrees, run)?;
    run.input(pattern);
    let cfg = formats::load_pattern(pattern)?;
    if cfg.len() != t.vertex_count() {
        return Err(fail(EXIT_PARSE, "pattern and complex have different vertex counts"));
    }
    let q = build_polyhedron(&t, &cfg, &theta).map_err(|e| fail(EXIT_GATE, e.to_string()))?;
    run.lap("build");
    let (v, f, e) = q.counts();
    println!("vertices {v} faces {f} edges {e}");
    println!("dihedral_max_error {:e}", q.dihedral_max_error());
    println!("convexity_slack {:e}", q.convexity_slack());
    if let Some(p) = out {
        formats::write_json(p, &q)?;
        run.output(p);
    }
    if let Some(p) = off {
        export_off(&q, p).map_err(|e| fail(EXIT_NUMERIC, e.to_string()))?;
        run.output(p);
    }
    Ok(EXIT_OK)
}

fn cmd_render(complex: &Path, pattern: &Path, out: &Path, size: f64, run: &mut Run) -> Result<i32, Failure> {
    run.input(complex);
    run.input(pattern);
    let t = formats::load_complex(complex)?;
    let cfg = formats::load_pattern(pattern)?;
    if cfg.len() != t.vertex_count() {
        return Err(fail(EXIT_PARSE, "pattern and complex have different vertex counts"));
    }
    let svg = render_svg(&t, &cfg, size);
    std::fs::write(out, svg).map_err(|e| fail(EXIT_NUMERIC, format!("{}: {e}", out.display())))?;
    run.output(out);
    run.lap("render");
    Ok(EXIT_OK)
}

/// Sphere point farthest from every boundary circle, among a fixed sample.
pub fn choose_pole(caps: &[Cap]) -> SphPoint {
    let score = |x: &SphPoint| {
        caps.iter()
            .map(|c| (sph_dist(x, &c.center) - c.radius).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = (f64::NEG_INFINITY, SphPoint::from_xyz(0.0, 0.0, 1.0).expect("unit"));
    for x in fibonacci_sphere(2000) {
        let s = score(&x);
        if s > best.0 {
            best = (s, x);
        }
    }
    best.1
}

struct Projector {
    ex: Vec3,
    ey: Vec3,
    ez: Vec3,
}

impl Projector {
    fn new(pole: &SphPoint) -> Self {
        let (ex, ey) = tangent_basis(pole);
        Self { ex, ey, ez: pole.vec() }
    }

    /// Stereographic projection from the pole onto the plane through the
    /// centre of the sphere.
    fn project(&self, p: &Vec3) -> [f64; 2] {
        let d = 1.0 - p.dot(&self.ez);
        [p.dot(&self.ex) / d, p.dot(&self.ey) / d]
    }
}

fn circumcircle([a, b, c]: [[f64; 2]; 3]) -> ([f64; 2], f64) {
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    let sq = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
    let ux = (sq(a) * (b[1] - c[1]) + sq(b) * (c[1] - a[1]) + sq(c) * (a[1] - b[1])) / d;
    let uy = (sq(a) * (c[0] - b[0]) + sq(b) * (a[0] - c[0]) + sq(c) * (b[0] - a[0])) / d;
    let r = ((a[0] - ux).powi(2) + (a[1] - uy).powi(2)).sqrt();
    ([ux, uy], r)
}

/// Centre and radius in the drawing plane.
pub type PlaneCircle = ([f64; 2], f64);

/// Image circles (centre, radius) of every cap boundary and the projected
/// contact edges, in plane coordinates.
pub fn projected_pattern(t: &Triangulation, cfg: &Configuration) -> (Vec<PlaneCircle>, Vec<Vec<[f64; 2]>>) {
    let proj = Projector::new(&choose_pole(&cfg.caps));
    let circles = cfg
        .caps
        .iter()
        .map(|c| {
            let (e1, e2) = tangent_basis(&c.center);
            let pts = [e1, e2, -e1].map(|d| proj.project(&c.center.walk(&d, c.radius).vec()));
            circumcircle(pts)
        })
        .collect();
    let edges = t
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (p, q) = (cfg.caps[u].center.vec(), cfg.caps[v].center.vec());
            (0..=16)
                .map(|i| {
                    let s = i as f64 / 16.0;
                    proj.project(&(p * (1.0 - s) + q * s).normalize())
                })
                .collect()
        })
        .collect();
    (circles, edges)
}

pub fn render_svg(t: &Triangulation, cfg: &Configuration, size: f64) -> String {
    let (circles, edges) = projected_pattern(t, cfg);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for (c, r) in &circles {
        for k in 0..2 {
            lo[k] = lo[k].min(c[k] - r);
            hi[k] = hi[k].max(c[k] + r);
        }
    }
    let margin = 0.02 * size;
    let scale = (size - 2.0 * margin) / (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let map = |p: [f64; 2]| [margin + (p[0] - lo[0]) * scale, size - margin - (p[1] - lo[1]) * scale];
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .expect("write to string");
    s.push_str("<g fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.2\">\n");
    for (v, (c, r)) in circles.iter().enumerate() {
        let [x, y] = map(*c);
        writeln!(
            s,
            r#"<circle data-vertex="{v}" cx="{x:.3}" cy="{y:.3}" r="{:.3}"/>"#,
            r * scale
        )
        .expect("write to string");
    }
    s.push_str("</g>\n<g fill=\"none\" stroke=\"#b03a2e\" stroke-width=\"0.8\">\n");
    for pts in &edges {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let [x, y] = map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        writeln!(s, r#"<polyline points="{}"/>"#, coords.join(" ")).expect("write to string");
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// One row of a degeneration table.
#[derive(Debug, Clone, Serialize)]
pub struct DegenerationRow {
    pub step: usize,
    pub t: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub max_non_gauge_radius: f64,
    pub separation_margin: f64,
    pub ring_ratio_max: f64,
    pub residual_inf: f64,
    pub status: String,
}

pub const DEGENERATION_HEADER: &str =
    "step,t,min_radius,max_radius,max_non_gauge_radius,separation_margin,ring_ratio_max,residual_inf,status";

impl DegenerationRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:e},{}",
            self.step,
            self.t,
            self.min_radius,
            self.max_radius,
            self.max_non_gauge_radius,
            self.separation_margin,
            self.ring_ratio_max,
            self.residual_inf,
            self.status
        )
    }
}

/// Solves the family `(1 − t)Θ + t·end` at each `t`, warm-starting each step
/// from the previous one. Stops at the first failure.
pub fn degeneration_study(
    t: &Triangulation,
    theta: &AngleAssignment,
    end_angle: f64,
    ts: &[f64],
    opts: &SolveOptions,
) -> Result<(Vec<DegenerationRow>, Option<String>), SolveError> {
    let end = AngleAssignment::constant(t.edges(), end_angle)?;
    let mut rows = Vec::new();
    let mut prev: Option<(Configuration, AngleAssignment)> = None;
    for (step, &s) in ts.iter().enumerate() {
        let target = theta.lerp(&end, s)?;
        let solved = match prev.take() {
            None => solver::solve(t, &target, opts),
            Some((cfg, from)) => solver::continue_solution(t, cfg, &from, &target, opts),
        };
        let (cfg, report) = match solved {
            Ok(x) => x,
            Err(SolveError::ConditionsViolated(m)) if step == 0 => return Err(SolveError::ConditionsViolated(m)),
            Err(e) => return Ok((rows, Some(format!("t = {s}: {e}")))),
        };
        rows.push(DegenerationRow {
            step,
            t: s,
            min_radius: report.min_radius,
            max_radius: report.max_radius,
            max_non_gauge_radius: report.max_non_gauge_radius,
            separation_margin: verify::separation_margin(t, &cfg),
            ring_ratio_max: report.ring_ratio_max,
            residual_inf: report.residual_inf,
            status: "ok".into(),
        });
        prev = Some((cfg, target));
    }
    Ok((rows, None))
}

#[allow(clippy::too_many_arguments)]
fn cmd_degenerate(
    complex: &Path,
    angles: &Path,
    end_angle: f64,
    ts: &[f64],
    opts: &SolveOptions,
    out: Option<&Path>,
    degrees: bool,
    run: &mut Run,
) -> Result<i32, Failure> {
    let (t, theta) = load_inputs(complex, angles, degrees, run)?;
    run.option("end_angle", end_angle);
    run.option("ts", ts.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
    run.manifest.seed = Some(opts.seed);
    if let Some(bad) = ts.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(fail(EXIT_PARSE, format!("t = {bad} is outside [0, 1]")));
    }
    let (rows, failure) = match degeneration_study(&t, &theta, end_angle, ts, opts) {
        Ok(x) => x,
        Err(SolveError::ConditionsViolated(_)) => {
            return Err(fail(EXIT_GATE, "the family starts outside the admissible set"))
        }
        Err(e) => return Err(fail(EXIT_NUMERIC, e.to_string())),
    };
    run.lap("degenerate");
    let mut csv = String::from(DEGENERATION_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv());
        csv.push('\n');
    }
    if let Some(msg) = &failure {
        writeln!(csv, "{},,,,,,,,stalled", rows.len()).expect("write to string");
        eprintln!("solver stopped: {msg}");
    }
    match out {
        Some(p) => {
            std::fs::write(p, &csv).map_err(|e| fail(EXIT_NUMERIC, format!("{}: {e}", p.display())))?;
            run.output(p);
        }
        None => print!("{csv}"),
    }
    Ok(if failure.is_some() { EXIT_NUMERIC } else { EXIT_OK })
}
