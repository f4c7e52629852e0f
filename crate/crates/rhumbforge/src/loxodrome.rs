//! Constant-angle courses (loxodromes) on twisted surfaces.
//!
//! The y-constant coordinate curves are called *meridians* here and the
//! x-constant curves *parallels* (see the crate docs for why the naming
//! follows the sweep parameter). A loxodrome is specified by the coordinate
//! family it cuts at a constant angle:
//!
//! * [`Family::Meridian`] courses cut every meridian at the angle and are
//!   integrated as `dy/dx` over a sweep-angle span.
//! * [`Family::Parallel`] courses cut every parallel at the angle and are
//!   integrated as `dx/dy` over a profile-parameter span.
//!
//! Requiring a constant cut angle makes the slope a root of a quadratic, so
//! each field splits into two branches. [`Branch::Minus`] takes the negative
//! sign on the square-root term of the factored slope formulas below and is
//! the default.

use crate::expr::{EvalError, Interval};
use crate::numerics::{integrate_loxodrome, IntegrationError, IntegratorConfig};
use crate::surface::TwistedSurface;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Relative threshold below which the slope denominator counts as singular.
const DENOMINATOR_EPS: f64 = 1e-12;

/// Determinant threshold below which a course start counts as degenerate;
/// see [`SlopeField::for_spec`].
pub const DEGENERATE_START_DET: f64 = 1e-12;

/// Coordinate-curve family a course cuts at its constant angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Cut the y-constant curves; integrate `dy/dx` in the sweep angle.
    Meridian,
    /// Cut the x-constant curves; integrate `dx/dy` in the profile parameter.
    Parallel,
}

impl fmt::Display for Family {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Meridian => write!(out, "meridian"),
            Family::Parallel => write!(out, "parallel"),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text {
            "meridian" => Ok(Family::Meridian),
            "parallel" => Ok(Family::Parallel),
            other => Err(format!(
                "unknown family '{other}' (expected 'meridian' or 'parallel')"
            )),
        }
    }
}

/// Sign of the square-root term in the factored slope formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    #[default]
    Minus,
}

impl Branch {
    pub fn root_sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Plus => write!(out, "plus"),
            Branch::Minus => write!(out, "minus"),
        }
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text {
            "plus" => Ok(Branch::Plus),
            "minus" => Ok(Branch::Minus),
            other => Err(format!(
                "unknown branch '{other}' (expected 'plus' or 'minus')"
            )),
        }
    }
}

/// Slope-field evaluation failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SlopeError {
    #[error("point (x, y) = ({x}, {y}) is irregular: metric determinant {det:e} is not positive")]
    Irregular { x: f64, y: f64, det: f64 },
    #[error("slope denominator vanishes at (x, y) = ({x}, {y}): the course runs tangent to the integration coordinate")]
    SingularDenominator { x: f64, y: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn slope_from_metric(
    surface: &TwistedSurface,
    x: f64,
    y: f64,
    angle: f64,
    branch: Branch,
    family: Family,
) -> Result<f64, SlopeError> {
    let m = surface.metric(x, y)?;
    let det = m.det();
    if det <= 0.0 {
        return Err(SlopeError::Irregular { x, y, det });
    }
    let (s, c) = angle.sin_cos();
    let sin_sq = s * s;
    let sin_two = 2.0 * s * c;
    // The numerator coefficient is the metric coefficient of the coordinate
    // family being cut.
    let lead = match family {
        Family::Meridian => m.g11,
        Family::Parallel => m.g22,
    };
    let num = -2.0 * lead * m.g12 * sin_sq + branch.root_sign() * lead * det.sqrt() * sin_two;
    let den = 2.0 * (m.g12 * m.g12 - m.g11 * m.g22 * c * c);
    if den.abs() < DENOMINATOR_EPS * m.g11 * m.g22 {
        return Err(SlopeError::SingularDenominator { x, y });
    }
    let slope = num / den;
    if slope.is_finite() {
        Ok(slope)
    } else {
        Err(SlopeError::SingularDenominator { x, y })
    }
}

/// Slope `dy/dx` of a course cutting the y-constant curves at `angle`.
///
/// ```text
/// dy/dx = (-2 g11 g12 sin^2(angle) -+ g11 sqrt(det) sin(2 angle))
///         / (2 (g12^2 - g11 g22 cos^2(angle)))
/// ```
///
/// with `-+` resolved by `branch` ([`Branch::Minus`] takes the minus sign)
/// and `sin(2 angle)` kept signed.
pub fn meridian_slope(
    surface: &TwistedSurface,
    x: f64,
    y: f64,
    angle: f64,
    branch: Branch,
) -> Result<f64, SlopeError> {
    slope_from_metric(surface, x, y, angle, branch, Family::Meridian)
}

/// Slope `dx/dy` of a course cutting the x-constant curves at `angle`.
///
/// ```text
/// dx/dy = (-2 g22 g12 sin^2(angle) -+ g22 sqrt(det) sin(2 angle))
///         / (2 (g12^2 - g11 g22 cos^2(angle)))
/// ```
pub fn parallel_slope(
    surface: &TwistedSurface,
    x: f64,
    y: f64,
    angle: f64,
    branch: Branch,
) -> Result<f64, SlopeError> {
    slope_from_metric(surface, x, y, angle, branch, Family::Parallel)
}

/// Rejected course specification.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecError {
    #[error("course angle {angle} must lie strictly between 0 and pi")]
    AngleOutOfRange { angle: f64 },
    #[error("course start ({x}, {y}) must be finite")]
    NonFiniteStart { x: f64, y: f64 },
    #[error("integration start {u} lies outside the span [{lo}, {hi}]")]
    StartOutsideSpan { u: f64, lo: f64, hi: f64 },
}

/// A constant-angle course to integrate: which family it cuts, at what
/// angle, on which branch, from where, and over what parameter span.
#[derive(Debug, Clone, PartialEq)]
pub struct LoxodromeSpec {
    family: Family,
    angle: f64,
    branch: Branch,
    start: (f64, f64),
    span: Interval,
    config: IntegratorConfig,
}

impl LoxodromeSpec {
    /// Validates and builds a course specification.
    ///
    /// `start` is always `(x0, y0)` in surface coordinates. The integration
    /// parameter is `x` for meridian courses and `y` for parallel courses;
    /// its start value must lie within `span`. The angle must lie strictly
    /// between 0 and pi (the endpoint angles degenerate the quadratic).
    pub fn new(
        family: Family,
        angle: f64,
        branch: Branch,
        start: (f64, f64),
        span: Interval,
        config: IntegratorConfig,
    ) -> Result<Self, SpecError> {
        if !angle.is_finite() || angle <= 0.0 || angle >= std::f64::consts::PI {
            return Err(SpecError::AngleOutOfRange { angle });
        }
        if !start.0.is_finite() || !start.1.is_finite() {
            return Err(SpecError::NonFiniteStart {
                x: start.0,
                y: start.1,
            });
        }
        let spec = LoxodromeSpec {
            family,
            angle,
            branch,
            start,
            span,
            config,
        };
        if !span.contains(spec.start_u()) {
            return Err(SpecError::StartOutsideSpan {
                u: spec.start_u(),
                lo: span.lo(),
                hi: span.hi(),
            });
        }
        Ok(spec)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// Start point `(x0, y0)` in surface coordinates.
    pub fn start(&self) -> (f64, f64) {
        self.start
    }

    pub fn span(&self) -> Interval {
        self.span
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn with_config(mut self, config: IntegratorConfig) -> Self {
        self.config = config;
        self
    }

    /// Start value of the integration parameter.
    pub fn start_u(&self) -> f64 {
        match self.family {
            Family::Meridian => self.start.0,
            Family::Parallel => self.start.1,
        }
    }

    /// Start value of the integrated (dependent) coordinate.
    pub fn start_v(&self) -> f64 {
        match self.family {
            Family::Meridian => self.start.1,
            Family::Parallel => self.start.0,
        }
    }
}

/// Maps course coordinates `(u, v)` to surface coordinates `(x, y)`.
fn surface_coords(family: Family, u: f64, v: f64) -> (f64, f64) {
    match family {
        Family::Meridian => (u, v),
        Family::Parallel => (v, u),
    }
}

/// A course's slope field `dv/du`, with any branch fold baked in.
///
/// Courses started where the determinant (nearly) vanishes sit on a fold of
/// the slope quadratic: the two branches meet there with slope zero, and the
/// solution that continues smoothly through the fold switches root. When the
/// start determinant is below [`DEGENERATE_START_DET`], the field therefore
/// evaluates the flipped branch for `u` above the start and the requested
/// branch elsewhere, which keeps the field single-valued along the course
/// and the one-sided slope derivatives matched at the start.
#[derive(Debug, Clone, Copy)]
pub struct SlopeField<'a> {
    surface: &'a TwistedSurface,
    family: Family,
    angle: f64,
    branch: Branch,
    fold_at: Option<f64>,
}

impl<'a> SlopeField<'a> {
    /// Field for a course spec, detecting a degenerate start.
    pub fn for_spec(
        surface: &'a TwistedSurface,
        spec: &LoxodromeSpec,
    ) -> Result<Self, SlopeError> {
        let (x0, y0) = spec.start();
        let det = surface.metric(x0, y0)?.det();
        let fold_at = if det < DEGENERATE_START_DET {
            Some(spec.start_u())
        } else {
            None
        };
        Ok(SlopeField {
            surface,
            family: spec.family(),
            angle: spec.angle(),
            branch: spec.branch(),
            fold_at,
        })
    }

    /// Field with no fold, regardless of where evaluation starts.
    pub fn plain(surface: &'a TwistedSurface, family: Family, angle: f64, branch: Branch) -> Self {
        SlopeField {
            surface,
            family,
            angle,
            branch,
            fold_at: None,
        }
    }

    pub fn surface(&self) -> &'a TwistedSurface {
        self.surface
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Branch requested for the course (before any fold).
    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// Parameter value of the degenerate start, if one was detected.
    pub fn fold_at(&self) -> Option<f64> {
        self.fold_at
    }

    /// Branch actually evaluated at parameter `u`.
    pub fn effective_branch(&self, u: f64) -> Branch {
        match self.fold_at {
            Some(u0) if u > u0 => self.branch.flipped(),
            _ => self.branch,
        }
    }

    /// Slope `dv/du` at course coordinates `(u, v)`.
    pub fn slope(&self, u: f64, v: f64) -> Result<f64, SlopeError> {
        let (x, y) = surface_coords(self.family, u, v);
        slope_from_metric(
            self.surface,
            x,
            y,
            self.angle,
            self.effective_branch(u),
            self.family,
        )
    }

    /// Length of the surface velocity `dT/du` along the course, given the
    /// slope `m = dv/du` at `(u, v)`.
    pub fn speed(&self, u: f64, v: f64, m: f64) -> Result<f64, SlopeError> {
        let (x, y) = surface_coords(self.family, u, v);
        let g = self.surface.metric(x, y)?;
        let q = match self.family {
            Family::Meridian => g.g11 + 2.0 * g.g12 * m + g.g22 * m * m,
            Family::Parallel => g.g22 + 2.0 * g.g12 * m + g.g11 * m * m,
        };
        // Rounding can push the quadratic form a hair negative where the
        // tangent nearly vanishes.
        Ok(q.max(0.0).sqrt())
    }

    /// Angle at which the course actually cuts its coordinate family at
    /// `(u, v)`, recomputed from the embedded tangent vectors.
    ///
    /// The course tangent is oriented by increasing `u`, so the result is
    /// either the requested angle or its supplement: the slope satisfies a
    /// squared angle relation, and traversing the same course backwards
    /// swaps the two. Callers comparing against a requested angle should
    /// accept both.
    pub fn cut_angle(&self, u: f64, v: f64) -> Result<f64, SlopeError> {
        let m = self.slope(u, v)?;
        let (x, y) = surface_coords(self.family, u, v);
        let (tx, ty) = self.surface.eval_partials(x, y)?;
        let (tangent, reference) = match self.family {
            Family::Meridian => (tx + ty * m, tx),
            Family::Parallel => (tx * m + ty, ty),
        };
        crate::surface::angle_between(tangent, reference).map_err(|_| {
            SlopeError::Irregular {
                x,
                y,
                det: 0.0,
            }
        })
    }
}

/// Course-angle solving failure.
#[derive(Debug, Error)]
pub enum CourseError {
    #[error("endpoint misses at the bracket angles have the same sign ({f_lo:e} and {f_hi:e}); no course in the bracket reaches the target")]
    NoBracket { f_lo: f64, f_hi: f64 },
    #[error("integration failed at course angle {angle}: {source}")]
    Integration {
        angle: f64,
        source: IntegrationError,
    },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

const COURSE_ANGLE_TOL: f64 = 1e-10;

/// Finds the course angle in `bracket` whose integrated endpoint hits
/// `target`, by bisection on the endpoint mismatch.
///
/// The endpoint is the integrated coordinate at the far end of `span` (the
/// end farther from the start value). The two bracket angles must produce
/// endpoint misses of opposite sign. A zero-length span reaches any target
/// trivially; the bracket midpoint is returned in that case. The returned
/// angle is accurate to `1e-10` radians.
#[allow(clippy::too_many_arguments)]
pub fn solve_course(
    surface: &TwistedSurface,
    family: Family,
    start: (f64, f64),
    span: Interval,
    target: f64,
    branch: Branch,
    bracket: (f64, f64),
    config: &IntegratorConfig,
) -> Result<f64, CourseError> {
    let (mut lo, mut hi) = bracket;
    if hi < lo {
        std::mem::swap(&mut lo, &mut hi);
    }
    if span.length() == 0.0 {
        return Ok(0.5 * (lo + hi));
    }

    let endpoint_miss = |angle: f64| -> Result<f64, CourseError> {
        let spec = LoxodromeSpec::new(family, angle, branch, start, span, config.clone())?;
        let far_end = if spec.start_u() == span.hi() {
            span.lo()
        } else {
            span.hi()
        };
        let run = integrate_loxodrome(surface, &spec)
            .map_err(|source| CourseError::Integration { angle, source })?;
        let sample = if far_end >= spec.start_u() {
            run.polyline.last()
        } else {
            run.polyline.first()
        };
        Ok(sample.v - target)
    };

    let f_lo = endpoint_miss(lo)?;
    let f_hi = endpoint_miss(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(CourseError::NoBracket { f_lo, f_hi });
    }

    while hi - lo > COURSE_ANGLE_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = endpoint_miss(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
