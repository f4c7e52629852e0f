//! Reference courses whose solutions are known in closed form.
//!
//! Three fixtures pair a surface with a course specification that can be
//! solved by separating variables, together with the closed-form solution,
//! its explicit space-curve form, and frozen endpoint and arc-length values.
//! They anchor the regression suite and the `examples` CLI table: an
//! integrator change that drifts past the stated tolerances fails loudly.
//!
//! The module also carries a small surface catalog used by randomized
//! property tests and the `verify` CLI command.

use crate::expr::{parse_expression, Interval, ProfileCurve};
use crate::loxodrome::{Branch, Family, LoxodromeSpec, SlopeField};
use crate::numerics::{
    elliptic_e_incomplete, integrate_loxodrome, IntegrationError, IntegratorConfig, LoxodromeRun,
    Polyline, Sample,
};
use crate::surface::{TwistedSurface, Vec3};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Identifier of a built-in reference course.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExampleId {
    One,
    Two,
    Three,
}

impl ExampleId {
    pub const ALL: [ExampleId; 3] = [ExampleId::One, ExampleId::Two, ExampleId::Three];
}

impl fmt::Display for ExampleId {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleId::One => write!(out, "1"),
            ExampleId::Two => write!(out, "2"),
            ExampleId::Three => write!(out, "3"),
        }
    }
}

impl FromStr for ExampleId {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text {
            "1" => Ok(ExampleId::One),
            "2" => Ok(ExampleId::Two),
            "3" => Ok(ExampleId::Three),
            other => Err(format!("unknown example '{other}' (expected 1, 2, or 3)")),
        }
    }
}

/// Acceptance window for comparing a computed value against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `|actual - reference| <= tol * |reference|`.
    Relative(f64),
    /// `|actual - reference| <= tol`.
    Absolute(f64),
}

impl Tolerance {
    pub fn admits(self, reference: f64, actual: f64) -> bool {
        match self {
            Tolerance::Relative(tol) => (actual - reference).abs() <= tol * reference.abs(),
            Tolerance::Absolute(tol) => (actual - reference).abs() <= tol,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Relative(tol) => write!(out, "{:.2}% relative", tol * 100.0),
            Tolerance::Absolute(tol) => write!(out, "{tol:e} absolute"),
        }
    }
}

/// A reference course: surface, course specification, closed-form solution,
/// and the values the integration is expected to reproduce.
#[derive(Debug, Clone)]
pub struct ReferenceExample {
    id: ExampleId,
    title: &'static str,
    surface: TwistedSurface,
    spec: LoxodromeSpec,
    closed_form: fn(f64) -> f64,
    curve_3d: fn(f64) -> Vec3,
    reference_endpoints: (f64, f64),
    endpoint_tolerance: Tolerance,
    reference_arc_length: f64,
    arc_length_tolerance: Tolerance,
}

impl ReferenceExample {
    pub fn id(&self) -> ExampleId {
        self.id
    }

    /// Short human-readable description for tables and logs.
    pub fn title(&self) -> &'static str {
        self.title
    }

    pub fn surface(&self) -> &TwistedSurface {
        &self.surface
    }

    pub fn spec(&self) -> &LoxodromeSpec {
        &self.spec
    }

    /// Exact solution `v(u)` of the course's slope ODE.
    pub fn closed_form(&self, u: f64) -> f64 {
        (self.closed_form)(u)
    }

    /// Explicit space-curve form of the solution, written out component by
    /// component rather than routed through the surface evaluator, so the two
    /// paths check each other.
    pub fn curve_point(&self, u: f64) -> Vec3 {
        (self.curve_3d)(u)
    }

    /// Expected course endpoint values `(v at span low, v at span high)`.
    pub fn reference_endpoints(&self) -> (f64, f64) {
        self.reference_endpoints
    }

    pub fn endpoint_tolerance(&self) -> Tolerance {
        self.endpoint_tolerance
    }

    pub fn reference_arc_length(&self) -> f64 {
        self.reference_arc_length
    }

    pub fn arc_length_tolerance(&self) -> Tolerance {
        self.arc_length_tolerance
    }

    /// Slope field of the course, fold detection included.
    pub fn slope_field(&self) -> SlopeField<'_> {
        SlopeField::for_spec(&self.surface, &self.spec)
            .expect("reference fixtures start at evaluable points")
    }

    /// Integrates the course with its stored configuration.
    pub fn integrate(&self) -> Result<LoxodromeRun, IntegrationError> {
        integrate_loxodrome(&self.surface, &self.spec)
    }
}

fn build_surface(
    a: f64,
    b: f64,
    f: &str,
    g: &str,
    y_domain: (f64, f64),
    x_domain: Option<(f64, f64)>,
) -> TwistedSurface {
    let profile = ProfileCurve::new(
        parse_expression(f).expect("catalog expressions parse"),
        parse_expression(g).expect("catalog expressions parse"),
        Interval::new(y_domain.0, y_domain.1).expect("catalog intervals are ordered"),
    )
    .expect("catalog profiles are regular");
    let x_domain = x_domain
        .map(|(lo, hi)| Interval::new(lo, hi).expect("catalog intervals are ordered"));
    TwistedSurface::new(a, b, profile, x_domain).expect("catalog surfaces are regular")
}

// Course 1 lives on the twisted line (profile (y, 0), offset 0, twist rate
// 1/2). Its slope separates as dy/y = (1/2) sqrt(3 + 2 cos x) tan(pi/6) dx,
// and sqrt(3 + 2 cos x) = sqrt(5) sqrt(1 - (4/5) sin^2(x/2)) turns the
// integral into an incomplete elliptic integral of the second kind:
// y(x) = exp(sqrt(5/3) E(x/2 | 4/5)).
fn course_one_v(x: f64) -> f64 {
    let e = elliptic_e_incomplete(0.5 * x, 0.8)
        .expect("parameter 4/5 keeps the integrand real for all amplitudes");
    ((5.0f64 / 3.0).sqrt() * e).exp()
}

fn course_one_point(x: f64) -> Vec3 {
    let y = course_one_v(x);
    let (sh, ch) = (0.5 * x).sin_cos();
    Vec3::new(y * ch * x.cos(), y * ch * x.sin(), y * sh)
}

// Course 2 lives on the torus (profile (cos y, sin y), offset 1, no twist).
// With tan(pi/4) = 1 the slope separates as dy / (1 + cos y) = dx, giving
// y(x) = 2 arctan x from the start (0, 0).
fn course_two_v(x: f64) -> f64 {
    2.0 * x.atan()
}

fn course_two_point(x: f64) -> Vec3 {
    let w = 1.0 + (2.0 * x.atan()).cos();
    Vec3::new(w * x.cos(), w * x.sin(), (2.0 * x.atan()).sin())
}

// Course 3 cuts the parallels of the lobed revolution surface (profile
// (cos^2 y, sin^2 y), offset -1). The slope separates as
// dx = 2 sqrt(2) cot y tan(pi/3) dy, giving x(y) = 2 sqrt(6) ln(sin y) from
// the start x(pi/2) = 0.
fn course_three_v(y: f64) -> f64 {
    2.0 * 6.0f64.sqrt() * y.sin().ln()
}

fn course_three_point(y: f64) -> Vec3 {
    let x = course_three_v(y);
    let s2 = y.sin().powi(2);
    Vec3::new(-s2 * x.cos(), -s2 * x.sin(), s2)
}

/// Returns one of the three built-in reference courses.
pub fn example_fixture(id: ExampleId) -> ReferenceExample {
    let config = IntegratorConfig::default();
    match id {
        ExampleId::One => {
            let surface = build_surface(0.0, 0.5, "y", "0", (1e-4, 25.0), None);
            let spec = LoxodromeSpec::new(
                Family::Meridian,
                PI / 6.0,
                Branch::Minus,
                (0.0, 1.0),
                Interval::new(-2.0 * PI, 2.0 * PI).expect("ordered"),
                config,
            )
            .expect("fixture specification is valid");
            ReferenceExample {
                id,
                title: "meridian-cutting course on the twisted line",
                surface,
                spec,
                closed_form: course_one_v,
                curve_3d: course_one_point,
                reference_endpoints: (0.047_698_9, 20.964_9),
                endpoint_tolerance: Tolerance::Relative(5e-3),
                reference_arc_length: 41.834_3,
                arc_length_tolerance: Tolerance::Relative(1.5e-3),
            }
        }
        ExampleId::Two => {
            let surface = build_surface(1.0, 0.0, "cos(y)", "sin(y)", (-3.0, 3.0), None);
            let spec = LoxodromeSpec::new(
                Family::Meridian,
                PI / 4.0,
                Branch::Minus,
                (0.0, 0.0),
                Interval::new(-PI, PI).expect("ordered"),
                config,
            )
            .expect("fixture specification is valid");
            ReferenceExample {
                id,
                title: "meridian-cutting course on the torus",
                surface,
                spec,
                closed_form: course_two_v,
                curve_3d: course_two_point,
                reference_endpoints: (-2.525_25, 2.525_25),
                endpoint_tolerance: Tolerance::Absolute(1e-3),
                reference_arc_length: 7.142_5,
                arc_length_tolerance: Tolerance::Relative(1.5e-3),
            }
        }
        ExampleId::Three => {
            let surface = build_surface(
                -1.0,
                0.0,
                "cos(y)^2",
                "sin(y)^2",
                (PI / 16.0, 2.0 * PI / 3.0),
                Some((-3.0 * PI, PI)),
            );
            let spec = LoxodromeSpec::new(
                Family::Parallel,
                PI / 3.0,
                Branch::Minus,
                (0.0, PI / 2.0),
                Interval::new(PI / 16.0, 2.0 * PI / 3.0).expect("ordered"),
                config,
            )
            .expect("fixture specification is valid");
            ReferenceExample {
                id,
                title: "parallel-cutting course on the lobed revolution surface",
                surface,
                spec,
                closed_form: course_three_v,
                curve_3d: course_three_point,
                reference_endpoints: (-8.006_37, -0.704_674),
                endpoint_tolerance: Tolerance::Relative(1e-3),
                reference_arc_length: 3.427_88,
                arc_length_tolerance: Tolerance::Relative(1.5e-3),
            }
        }
    }
}

/// Samples the explicit space-curve form of a reference course on a uniform
/// grid over its span, with chordal cumulative length.
pub fn embed_loxodrome(example: &ReferenceExample) -> Polyline {
    const SAMPLES: usize = 257;
    let span = example.spec.span();
    let mut samples = Vec::with_capacity(SAMPLES);
    let mut s = 0.0;
    let mut previous: Option<Vec3> = None;
    for i in 0..SAMPLES {
        let u = span.lerp(i as f64 / (SAMPLES - 1) as f64);
        let point = example.curve_point(u);
        if let Some(prev) = previous {
            s += (point - prev).norm();
        }
        previous = Some(point);
        samples.push(Sample {
            u,
            v: example.closed_form(u),
            point,
            s,
        });
    }
    Polyline::new(samples).expect("uniform grid yields a valid polyline")
}

/// Named surfaces for randomized property tests: the three fixture surfaces
/// plus a sphere, a twisted wave, and a catenoid.
pub fn surface_catalog() -> Vec<(&'static str, TwistedSurface)> {
    vec![
        (
            "twisted line",
            example_fixture(ExampleId::One).surface.clone(),
        ),
        ("torus", example_fixture(ExampleId::Two).surface.clone()),
        (
            "lobed revolution",
            example_fixture(ExampleId::Three).surface.clone(),
        ),
        (
            "sphere",
            build_surface(0.0, 0.0, "cos(y)", "sin(y)", (-1.45, 1.45), None),
        ),
        (
            "twisted wave",
            build_surface(0.5, 1.0, "2+cos(y)", "y/2", (-3.0, 3.0), None),
        ),
        (
            "catenoid",
            build_surface(0.0, 0.0, "(exp(y)+exp(-y))/2", "y", (-2.0, 2.0), None),
        ),
    ]
}
