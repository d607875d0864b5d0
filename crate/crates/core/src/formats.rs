//! JSON file formats shared by the command-line tools.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angles::{AngleAssignment, AngleError};
use crate::complex::{ComplexError, DualComplex, Edge, Triangulation};
use crate::solver::{Configuration, SolveReport};
use crate::sphere_geom::{Cap, GeomError, SphPoint};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Angles(#[from] AngleError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub name: String,
    pub faces: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualComplexFile {
    pub name: String,
    pub dual_faces: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAngle {
    pub u: usize,
    pub v: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnglesFile {
    pub edges: Vec<EdgeAngle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternFile {
    pub centers: Vec<[f64; 3]>,
    pub radii: Vec<f64>,
    pub gauge_face: [usize; 3],
    pub residual_inf: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<SolveReport>,
    /// Present when the pattern is the best iterate of a failed solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PatternFile {
    pub fn from_config(cfg: &Configuration, residual_inf: f64, report: Option<SolveReport>) -> Self {
        Self {
            centers: cfg.caps.iter().map(|c| c.center.to_array()).collect(),
            radii: cfg.radii(),
            gauge_face: cfg.gauge_face,
            residual_inf,
            report,
            error: None,
        }
    }

    pub fn to_config(&self) -> Result<Configuration, FormatError> {
        if self.centers.len() != self.radii.len() {
            return Err(FormatError::Invalid(format!(
                "{} centres but {} radii",
                self.centers.len(),
                self.radii.len()
            )));
        }
        if self.gauge_face.iter().any(|&v| v >= self.radii.len()) {
            return Err(FormatError::Invalid("gauge face index out of range".into()));
        }
        let caps = self
            .centers
            .iter()
            .zip(&self.radii)
            .map(|(&c, &r)| Cap::new(SphPoint::try_from(c)?, r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Configuration::new(caps, self.gauge_face))
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FormatError> {
    serde_json::from_str(&read(path)?).map_err(|source| FormatError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_complex(path: &Path) -> Result<Triangulation, FormatError> {
    let f: ComplexFile = read_json(path)?;
    Ok(Triangulation::new(f.name, &f.faces)?)
}

pub fn load_dual_complex(path: &Path) -> Result<DualComplex, FormatError> {
    let f: DualComplexFile = read_json(path)?;
    Ok(DualComplex::new(f.name, f.dual_faces)?)
}

/// Angles for `edges`; with `degrees` the file values are converted.
pub fn load_angles(path: &Path, edges: &[Edge], degrees: bool) -> Result<AngleAssignment, FormatError> {
    let f: AnglesFile = read_json(path)?;
    let scale = if degrees { std::f64::consts::PI / 180.0 } else { 1.0 };
    Ok(AngleAssignment::from_triples(
        edges,
        f.edges.iter().map(|e| (e.u, e.v, e.theta * scale)),
    )?)
}

pub fn angles_file(theta: &AngleAssignment) -> AnglesFile {
    AnglesFile {
        edges: theta
            .edges()
            .iter()
            .zip(theta.values())
            .map(|(&(u, v), &theta)| EdgeAngle { u, v, theta })
            .collect(),
    }
}

pub fn complex_file(t: &Triangulation) -> ComplexFile {
    ComplexFile {
        name: t.name().to_string(),
        faces: t.faces().to_vec(),
    }
}

pub fn load_pattern(path: &Path) -> Result<Configuration, FormatError> {
    read_json::<PatternFile>(path)?.to_config()
}
