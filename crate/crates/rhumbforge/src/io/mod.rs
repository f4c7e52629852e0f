//! Scene configuration, geometry export, and curve re-import.
//!
//! A scene is described in JSON: one surface, any number of courses to
//! integrate on it, and export settings. Meshes are written as Wavefront OBJ
//! (triangles, counter-clockwise with respect to the tangent frame), curves
//! as CSV (`u,v,x,y,z,s`, nine decimal places) or as OBJ polylines. Exported
//! CSV curves can be read back for re-measurement.
//!
//! ```json
//! {
//!   "surface": {
//!     "a": 1.0, "b": 0.0,
//!     "f": "cos(y)", "g": "sin(y)",
//!     "y_domain": [-3.0, 3.0],
//!     "x_domain": [-6.283185307179586, 6.283185307179586]
//!   },
//!   "loxodromes": [
//!     {
//!       "family": "meridian",
//!       "angle": 0.7853981633974483,
//!       "branch": "minus",
//!       "start": [0.0, 0.0],
//!       "span": [-3.141592653589793, 3.141592653589793]
//!     }
//!   ],
//!   "export": { "nx": 64, "ny": 64, "mesh_path": "torus.obj" }
//! }
//! ```
//!
//! `x_domain`, `branch`, `tolerances`, and the whole `loxodromes` and
//! `export` sections are optional.

pub mod cli;

use crate::expr::{parse_expression, Interval, ParseError, ProfileCurve, ProfileError};
use crate::loxodrome::{Branch, Family, LoxodromeSpec, SpecError};
use crate::numerics::{IntegratorConfig, Polyline, PolylineError, Sample};
use crate::surface::{SurfaceError, TwistedSurface, Vec3};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

/// Surface definition record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceConfig {
    pub a: f64,
    pub b: f64,
    /// Profile component `f(y)` as expression text.
    pub f: String,
    /// Profile component `g(y)` as expression text.
    pub g: String,
    pub y_domain: Interval,
    /// Sweep interval; defaults to `[-2 pi, 2 pi]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_domain: Option<Interval>,
}

impl SurfaceConfig {
    pub fn build(&self) -> Result<TwistedSurface, ConfigError> {
        let f = parse_expression(&self.f).map_err(|source| ConfigError::Expression {
            which: "f",
            source,
        })?;
        let g = parse_expression(&self.g).map_err(|source| ConfigError::Expression {
            which: "g",
            source,
        })?;
        let profile = ProfileCurve::new(f, g, self.y_domain)?;
        Ok(TwistedSurface::new(self.a, self.b, profile, self.x_domain)?)
    }
}

/// Course definition record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoxodromeConfig {
    pub family: Family,
    /// Constant cut angle in radians, strictly between 0 and pi.
    pub angle: f64,
    #[serde(default)]
    pub branch: Branch,
    /// Start point `[x0, y0]` in surface coordinates.
    pub start: [f64; 2],
    /// Span of the integration parameter (`x` for meridian courses, `y` for
    /// parallel courses).
    pub span: Interval,
    #[serde(default)]
    pub tolerances: IntegratorConfig,
}

impl LoxodromeConfig {
    pub fn build(&self) -> Result<LoxodromeSpec, ConfigError> {
        self.tolerances.validate()?;
        Ok(LoxodromeSpec::new(
            self.family,
            self.angle,
            self.branch,
            (self.start[0], self.start[1]),
            self.span,
            self.tolerances.clone(),
        )?)
    }
}

/// Curve export format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveFormat {
    #[default]
    Csv,
    Obj,
}

impl fmt::Display for CurveFormat {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveFormat::Csv => write!(out, "csv"),
            CurveFormat::Obj => write!(out, "obj"),
        }
    }
}

impl FromStr for CurveFormat {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text {
            "csv" => Ok(CurveFormat::Csv),
            "obj" => Ok(CurveFormat::Obj),
            other => Err(format!("unknown curve format '{other}' (expected 'csv' or 'obj')")),
        }
    }
}

/// Export settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportConfig {
    #[serde(default = "default_resolution")]
    pub nx: usize,
    #[serde(default = "default_resolution")]
    pub ny: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_path: Option<PathBuf>,
    #[serde(default)]
    pub curve_format: CurveFormat,
    /// Output path per course, matched to `loxodromes` by position.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curve_paths: Vec<PathBuf>,
}

fn default_resolution() -> usize {
    64
}

impl Default for ExportConfig {
    fn default() -> Self {
        ExportConfig {
            nx: default_resolution(),
            ny: default_resolution(),
            mesh_path: None,
            curve_format: CurveFormat::Csv,
            curve_paths: Vec::new(),
        }
    }
}

/// Top-level scene: one surface, its courses, and export settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub loxodromes: Vec<LoxodromeConfig>,
    #[serde(default)]
    pub export: ExportConfig,
}

/// Fully built scene, ready to evaluate.
#[derive(Debug, Clone)]
pub struct Scene {
    pub surface: TwistedSurface,
    pub specs: Vec<LoxodromeSpec>,
    pub export: ExportConfig,
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Validates every record and builds the surface and course specs.
    pub fn build(&self) -> Result<Scene, ConfigError> {
        if self.export.nx < 2 || self.export.ny < 2 {
            return Err(ConfigError::Resolution {
                nx: self.export.nx,
                ny: self.export.ny,
            });
        }
        let surface = self.surface.build()?;
        let specs = self
            .loxodromes
            .iter()
            .map(|course| course.build())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Scene {
            surface,
            specs,
            export: self.export.clone(),
        })
    }
}

/// Rejected scene configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("could not read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid expression for {which}: {source}")]
    Expression {
        which: &'static str,
        source: ParseError,
    },
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Integrator(#[from] crate::numerics::ConfigError),
    #[error("mesh resolution {nx} x {ny} is too coarse: need at least 2 x 2")]
    Resolution { nx: usize, ny: usize },
}

/// Export failure.
#[derive(Debug, Error)]
pub enum ExportError {
    #[error("could not write {path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("mesh resolution {nx} x {ny} is too coarse: need at least 2 x 2")]
    Resolution { nx: usize, ny: usize },
}

/// Writes a triangulated surface mesh as Wavefront OBJ.
///
/// Vertices are laid out row-major with `x` varying fastest: vertex
/// `j * nx + i` (0-based) sits at grid point `(x_i, y_j)`. Each grid cell
/// becomes two triangles wound counter-clockwise with respect to the normal
/// direction `T_x x T_y`. Coordinates are printed with nine decimal places.
pub fn write_surface_mesh<W: Write>(
    surface: &TwistedSurface,
    nx: usize,
    ny: usize,
    out: &mut W,
) -> Result<(), ExportError> {
    if nx < 2 || ny < 2 {
        return Err(ExportError::Resolution { nx, ny });
    }
    let x_domain = surface.x_domain();
    let y_domain = surface.y_domain();
    for j in 0..ny {
        let y = y_domain.lerp(j as f64 / (ny - 1) as f64);
        for i in 0..nx {
            let x = x_domain.lerp(i as f64 / (nx - 1) as f64);
            let p = surface
                .eval_point(x, y)
                .map_err(|source| SurfaceError::Eval { x, y, source })?;
            writeln!(out, "v {:.9} {:.9} {:.9}", p.x, p.y, p.z)?;
        }
    }
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = j * nx + i + 1;
            let b = a + 1;
            let c = b + nx;
            let d = a + nx;
            writeln!(out, "f {a} {b} {c}")?;
            writeln!(out, "f {a} {c} {d}")?;
        }
    }
    Ok(())
}

/// [`write_surface_mesh`] to a file path.
pub fn export_surface_mesh(
    surface: &TwistedSurface,
    nx: usize,
    ny: usize,
    path: &Path,
) -> Result<(), ExportError> {
    let mut buffer = Vec::new();
    write_surface_mesh(surface, nx, ny, &mut buffer)?;
    fs::write(path, buffer).map_err(|source| ExportError::File {
        path: path.to_path_buf(),
        source,
    })
}

const CSV_HEADER: &str = "u,v,x,y,z,s";

/// Writes a course as CSV with header `u,v,x,y,z,s`, one row per sample,
/// nine decimal places.
pub fn write_curve_csv<W: Write>(curve: &Polyline, out: &mut W) -> Result<(), ExportError> {
    writeln!(out, "{CSV_HEADER}")?;
    for sample in curve.samples() {
        writeln!(
            out,
            "{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
            sample.u, sample.v, sample.point.x, sample.point.y, sample.point.z, sample.s
        )?;
    }
    Ok(())
}

/// Writes a course as an OBJ polyline: one `v` line per sample and a single
/// `l` record chaining them.
pub fn write_curve_obj<W: Write>(curve: &Polyline, out: &mut W) -> Result<(), ExportError> {
    for sample in curve.samples() {
        writeln!(
            out,
            "v {:.9} {:.9} {:.9}",
            sample.point.x, sample.point.y, sample.point.z
        )?;
    }
    write!(out, "l")?;
    for index in 1..=curve.len() {
        write!(out, " {index}")?;
    }
    writeln!(out)?;
    Ok(())
}

/// Writes a course to a file in the requested format.
pub fn export_curve(curve: &Polyline, path: &Path, format: CurveFormat) -> Result<(), ExportError> {
    let mut buffer = Vec::new();
    match format {
        CurveFormat::Csv => write_curve_csv(curve, &mut buffer)?,
        CurveFormat::Obj => write_curve_obj(curve, &mut buffer)?,
    }
    fs::write(path, buffer).map_err(|source| ExportError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Failed curve re-import.
#[derive(Debug, Error)]
pub enum CurveReadError {
    #[error("could not read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Read(#[from] std::io::Error),
    #[error("missing or malformed header (expected '{CSV_HEADER}')")]
    Header,
    #[error("line {line}: expected 6 comma-separated numbers")]
    Malformed { line: usize },
    #[error(transparent)]
    Polyline(#[from] PolylineError),
}

/// Reads a curve previously written by [`write_curve_csv`].
pub fn read_curve_csv<R: BufRead>(reader: R) -> Result<Polyline, CurveReadError> {
    let mut lines = reader.lines();
    match lines.next() {
        Some(Ok(header)) if header.trim_end() == CSV_HEADER => {}
        Some(Err(source)) => return Err(CurveReadError::Read(source)),
        _ => return Err(CurveReadError::Header),
    }
    let mut samples = Vec::new();
    for (index, line) in lines.enumerate() {
        let line = line?;
        let text = line.trim_end();
        if text.is_empty() {
            continue;
        }
        let mut fields = [0.0f64; 6];
        let mut count = 0;
        for (slot, field) in fields.iter_mut().zip(text.split(',')) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| CurveReadError::Malformed { line: index + 2 })?;
            count += 1;
        }
        if count != 6 || text.split(',').count() != 6 {
            return Err(CurveReadError::Malformed { line: index + 2 });
        }
        samples.push(Sample {
            u: fields[0],
            v: fields[1],
            point: Vec3::new(fields[2], fields[3], fields[4]),
            s: fields[5],
        });
    }
    Ok(Polyline::new(samples)?)
}

/// Reads a CSV curve from a file path.
pub fn load_curve_csv(path: &Path) -> Result<Polyline, CurveReadError> {
    let file = fs::File::open(path).map_err(|source| CurveReadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_curve_csv(io::BufReader::new(file))
}
