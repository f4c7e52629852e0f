//! Loxodromes on twisted surfaces.
//!
//! A twisted surface sweeps a planar profile curve `(f(y), g(y))` around the
//! z-axis while rotating the profile within its carrying plane at a rate
//! proportional to the sweep angle. Surfaces of revolution are the zero-rate
//! special case. A loxodrome is a curve on the surface that cuts one family of
//! coordinate curves at a constant angle.
//!
//! The crate is organized bottom-up:
//!
//! * [`expr`] parses profile expressions in one variable `y`, differentiates
//!   them symbolically, and evaluates them with explicit domain errors.
//! * [`surface`] evaluates twisted-surface points, first partials, and the
//!   coefficients of the first fundamental form.
//! * [`loxodrome`] turns a constant-angle requirement into slope fields
//!   `dy/dx` (courses cutting the y-constant curves) and `dx/dy` (courses
//!   cutting the x-constant curves), and solves for the course angle that
//!   reaches a requested endpoint.
//! * [`numerics`] integrates slope fields with an embedded Dormand-Prince 5(4)
//!   scheme, measures arc length by adaptive quadrature, and evaluates the
//!   incomplete elliptic integral of the second kind.
//! * [`oracle`] packages three analytically solvable reference courses with
//!   their closed forms and frozen endpoint and length values.
//! * [`io`] reads scene configurations from JSON, writes OBJ meshes and CSV
//!   polylines, and exposes the command-line interface.
//!
//! # Coordinate-curve naming
//!
//! Throughout this crate the y-constant coordinate curves are called
//! *meridians* and the x-constant curves *parallels*. On a twisted surface
//! the curve traced by the sweep parameter `x` is the one that winds around
//! the axis like a great-circle meridian winds around a globe, so the naming
//! follows the sweep rather than the classical surface-of-revolution
//! convention. [`loxodrome::Family::Meridian`] courses therefore integrate
//! `dy/dx` and cut the y-constant curves at the requested angle.
//!
//! # Example
//!
//! ```
//! use rhumbforge::expr::{parse_expression, Interval, ProfileCurve};
//! use rhumbforge::loxodrome::{Branch, Family, LoxodromeSpec};
//! use rhumbforge::numerics::{integrate_loxodrome, IntegratorConfig};
//! use rhumbforge::surface::TwistedSurface;
//! use std::f64::consts::PI;
//!
//! let profile = ProfileCurve::new(
//!     parse_expression("cos(y)").unwrap(),
//!     parse_expression("sin(y)").unwrap(),
//!     Interval::new(-3.0, 3.0).unwrap(),
//! )
//! .unwrap();
//! let surface = TwistedSurface::new(1.0, 0.0, profile, None).unwrap();
//!
//! let spec = LoxodromeSpec::new(
//!     Family::Meridian,
//!     PI / 4.0,
//!     Branch::Minus,
//!     (0.0, 0.0),
//!     Interval::new(0.0, PI).unwrap(),
//!     IntegratorConfig::default(),
//! )
//! .unwrap();
//!
//! let run = integrate_loxodrome(&surface, &spec).unwrap();
//! let expected = 2.0 * PI.atan();
//! assert!((run.polyline.last().v - expected).abs() < 1e-6);
//! ```

pub mod expr;
pub mod io;
pub mod loxodrome;
pub mod numerics;
pub mod oracle;
pub mod surface;

pub use expr::{parse_expression, Expr, Interval, ProfileCurve};
pub use loxodrome::{Branch, Family, LoxodromeSpec, SlopeField};
pub use numerics::{arc_length, integrate_loxodrome, IntegratorConfig, Polyline};
pub use surface::{angle_between, MetricCoeffs, TwistedSurface, Vec3};
