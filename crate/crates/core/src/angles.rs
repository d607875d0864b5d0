//! Overlap-angle functions and the admissibility conditions on them.
//!
//! The conditions are evaluated curve by curve over the classes produced by
//! the `complex` module:
//!
//! | condition | curves                     | inequality                          |
//! |-----------|----------------------------|-------------------------------------|
//! | c1        | arcs of two edges          | sum ≤ π                             |
//! | x1        | arcs of two edges          | sum < π                             |
//! | c2        | face boundaries            | sum > π, each pairwise sum < third + π |
//! | c3        | separating 3-cycles        | sum < π                             |
//! | c4        | separating 4-cycles        | sum < 2π                            |
//!
//! `W` is c1–c4, `W₀` is x1 and c2–c4. On a trivalent polyhedron the same
//! conditions are read through the dual (a1–a4).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{primalize, ComplexError, CurveKind, CurveReport, DualComplex, Edge, Triangulation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AngleError {
    #[error("angle domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("angle {theta} on edge ({u}, {v}) is outside (0, pi)")]
    OutOfRange { u: usize, v: usize, theta: f64 },
    #[error("interpolation parameter {0} is outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Edge → angle map, radians in the open interval `(0, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleAssignment {
    edges: Vec<Edge>,
    values: Vec<f64>,
}

impl AngleAssignment {
    /// `values[i]` is the angle of `edges[i]`.
    pub fn new(edges: &[Edge], values: Vec<f64>) -> Result<Self, AngleError> {
        if edges.len() != values.len() {
            return Err(AngleError::DomainMismatch(format!(
                "{} edges but {} angles",
                edges.len(),
                values.len()
            )));
        }
        for (&(u, v), &theta) in edges.iter().zip(&values) {
            if !(theta > 0.0 && theta < PI) {
                return Err(AngleError::OutOfRange { u, v, theta });
            }
        }
        Ok(Self {
            edges: edges.to_vec(),
            values,
        })
    }

    pub fn constant(edges: &[Edge], theta: f64) -> Result<Self, AngleError> {
        Self::new(edges, vec![theta; edges.len()])
    }

    /// Builds the assignment from `(u, v, θ)` triples in any order; every edge
    /// must be listed exactly once.
    pub fn from_triples(
        edges: &[Edge],
        triples: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, AngleError> {
        let index: std::collections::HashMap<Edge, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut values = vec![f64::NAN; edges.len()];
        for (u, v, theta) in triples {
            let key = crate::complex::edge_key(u, v);
            let i = *index
                .get(&key)
                .ok_or_else(|| AngleError::DomainMismatch(format!("({u}, {v}) is not an edge")))?;
            if !values[i].is_nan() {
                return Err(AngleError::DomainMismatch(format!("edge ({u}, {v}) listed twice")));
            }
            values[i] = theta;
        }
        if let Some(i) = values.iter().position(|x| x.is_nan()) {
            let (u, v) = edges[i];
            return Err(AngleError::DomainMismatch(format!("edge ({u}, {v}) has no angle")));
        }
        Self::new(edges, values)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, e: usize) -> f64 {
        self.values[e]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sΘ + (1 − s)·π/3` edgewise.
    pub fn interpolate(&self, s: f64) -> Result<Self, AngleError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(AngleError::ParameterOutOfRange(s));
        }
        let values = self.values.iter().map(|&t| s * t + (1.0 - s) * PI / 3.0).collect();
        Ok(Self {
            edges: self.edges.clone(),
            values,
        })
    }

    /// `(1 − t)·self + t·other` edgewise.
    pub fn lerp(&self, other: &Self, t: f64) -> Result<Self, AngleError> {
        if self.edges != other.edges {
            return Err(AngleError::DomainMismatch("lerp between different edge sets".into()));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(AngleError::ParameterOutOfRange(t));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (1.0 - t) * a + t * b)
            .collect();
        Ok(Self {
            edges: self.edges.clone(),
            values,
        })
    }

    fn check_domain(&self, edges: &[Edge]) -> Result<(), AngleError> {
        if self.edges != edges {
            return Err(AngleError::DomainMismatch(
                "angles are not defined on the edges of this complex".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    C1,
    X1,
    C2,
    C3,
    C4,
    A1,
    A2,
    A3,
    A4,
}

impl Condition {
    fn dual(self) -> Self {
        match self {
            Condition::C1 | Condition::X1 => Condition::A1,
            Condition::C2 => Condition::A2,
            Condition::C3 => Condition::A3,
            Condition::C4 => Condition::A4,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
}

/// One failed inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub curve: CurveReport,
    /// Coefficients (±1) of the curve's edge angles in the tested quantity.
    pub coefficients: Vec<i8>,
    /// The tested quantity `Σ coefficient·θ(edge)`.
    pub sum: f64,
    pub relation: Relation,
    pub bound: f64,
    /// For conditions read through a dual complex: the crossed dual edges.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_edges: Option<Vec<Edge>>,
}

impl Violation {
    pub fn describe(&self) -> String {
        let rel = match self.relation {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
        };
        format!(
            "{:?} on {:?} {:?}: {:.12} {rel} {:.12} fails",
            self.condition, self.curve.kind, self.curve.vertices, self.sum, self.bound
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub condition: Condition,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub verdicts: Vec<Verdict>,
    pub violations: Vec<Violation>,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn passed(&self, c: Condition) -> Option<bool> {
        self.verdicts.iter().find(|v| v.condition == c).map(|v| v.pass)
    }

    fn finish(conditions: &[Condition], violations: Vec<Violation>) -> Self {
        let verdicts = conditions
            .iter()
            .map(|&condition| Verdict {
                condition,
                pass: !violations.iter().any(|v| v.condition == condition),
            })
            .collect();
        Self { verdicts, violations }
    }
}

/// Comparison slack. Quantities within `slack` of the bound count as equal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub slack: f64,
}

impl CheckOptions {
    fn holds(&self, lhs: f64, rel: Relation, bound: f64) -> bool {
        match rel {
            Relation::Lt => lhs < bound - self.slack,
            Relation::Le => lhs <= bound + self.slack,
            Relation::Gt => lhs > bound + self.slack,
        }
    }
}

fn curve_sum(theta: &AngleAssignment, curve: &CurveReport, coefficients: &[i8]) -> f64 {
    curve
        .edges
        .iter()
        .zip(coefficients)
        .map(|(&e, &c)| c as f64 * theta.get(e))
        .sum()
}

struct Checker<'a> {
    theta: &'a AngleAssignment,
    opts: CheckOptions,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn test(
        &mut self,
        condition: Condition,
        curve: &CurveReport,
        coefficients: Vec<i8>,
        rel: Relation,
        bound: f64,
    ) -> bool {
        let sum = curve_sum(self.theta, curve, &coefficients);
        let ok = self.opts.holds(sum, rel, bound);
        if !ok {
            self.out.push(Violation {
                condition,
                curve: curve.clone(),
                coefficients,
                sum,
                relation: rel,
                bound,
                dual_edges: None,
            });
        }
        ok
    }

    fn arcs(&mut self, t: &Triangulation, strict: bool) {
        let arcs = t.arcs2();
        if strict {
            for a in &arcs {
                self.test(Condition::X1, a, vec![1, 1], Relation::Lt, PI);
            }
            return;
        }
        for a in &arcs {
            self.test(Condition::C1, a, vec![1, 1], Relation::Le, PI);
        }
        // the double tetrahedron additionally needs one strict inequality
        if t.is_double_tetrahedron() && !arcs.is_empty() {
            let any_strict = arcs
                .iter()
                .any(|a| self.opts.holds(curve_sum(self.theta, a, &[1, 1]), Relation::Lt, PI));
            if !any_strict {
                for a in &arcs {
                    let sum = curve_sum(self.theta, a, &[1, 1]);
                    if self.opts.holds(sum, Relation::Le, PI) {
                        self.out.push(Violation {
                            condition: Condition::C1,
                            curve: a.clone(),
                            coefficients: vec![1, 1],
                            sum,
                            relation: Relation::Lt,
                            bound: PI,
                            dual_edges: None,
                        });
                    }
                }
            }
        }
    }

    fn faces(&mut self, t: &Triangulation) {
        for face in t.face_curves() {
            self.test(Condition::C2, &face, vec![1, 1, 1], Relation::Gt, PI);
            for drop in 0..3 {
                let coefficients = (0..3).map(|m| if m == drop { -1 } else { 1 }).collect();
                self.test(Condition::C2, &face, coefficients, Relation::Lt, PI);
            }
        }
    }

    fn separating(&mut self, t: &Triangulation) {
        for c in t.separating_cycles(3) {
            self.test(Condition::C3, &c, vec![1; 3], Relation::Lt, PI);
        }
        for c in t.separating_cycles(4) {
            self.test(Condition::C4, &c, vec![1; 4], Relation::Lt, 2.0 * PI);
        }
    }
}

/// Membership in `W`: conditions c1–c4.
pub fn check_w(t: &Triangulation, theta: &AngleAssignment, opts: CheckOptions) -> Result<ConditionReport, AngleError> {
    theta.check_domain(t.edges())?;
    let mut ck = Checker {
        theta,
        opts,
        out: Vec::new(),
    };
    ck.arcs(t, false);
    ck.faces(t);
    ck.separating(t);
    Ok(ConditionReport::finish(
        &[Condition::C1, Condition::C2, Condition::C3, Condition::C4],
        ck.out,
    ))
}

/// Membership in `W₀`: strict x1 on every arc, then c2–c4.
pub fn check_w0(t: &Triangulation, theta: &AngleAssignment, opts: CheckOptions) -> Result<ConditionReport, AngleError> {
    theta.check_domain(t.edges())?;
    let mut ck = Checker {
        theta,
        opts,
        out: Vec::new(),
    };
    ck.arcs(t, true);
    ck.faces(t);
    ck.separating(t);
    Ok(ConditionReport::finish(
        &[Condition::X1, Condition::C2, Condition::C3, Condition::C4],
        ck.out,
    ))
}

/// Moves a dual-edge angle function onto the edges of the primal triangulation.
pub fn transport_to_primal(
    p: &DualComplex,
    t: &Triangulation,
    dual_theta: &AngleAssignment,
) -> Result<AngleAssignment, AngleError> {
    dual_theta.check_domain(p.edges())?;
    let triples = (0..p.edges().len()).map(|e| {
        let (a, b) = p.primal_edge(e);
        (a, b, dual_theta.get(e))
    });
    AngleAssignment::from_triples(t.edges(), triples)
}

/// Conditions a1–a4 on a trivalent polyhedron, checked as c1–c4 on its dual
/// triangulation. Violations carry the crossed dual edges.
pub fn check_a(
    p: &DualComplex,
    dual_theta: &AngleAssignment,
    opts: CheckOptions,
) -> Result<ConditionReport, AngleError> {
    let t = primalize(p)?;
    let theta = transport_to_primal(p, &t, dual_theta)?;
    let mut report = check_w(&t, &theta, opts)?;
    for v in &mut report.violations {
        v.condition = v.condition.dual();
        v.dual_edges = Some(
            v.curve
                .edges
                .iter()
                .map(|&e| {
                    let [f, g] = t.edge_faces(e);
                    crate::complex::edge_key(f, g)
                })
                .collect(),
        );
        if let CurveKind::Separating3 | CurveKind::Separating4 = v.curve.kind {
            v.curve.kind = CurveKind::Prismatic(v.curve.vertices.len());
        }
    }
    for verdict in &mut report.verdicts {
        verdict.condition = verdict.condition.dual();
    }
    Ok(report)
}
