//! Twisted surfaces and their first fundamental form.
//!
//! A twisted surface is swept by the map
//!
//! ```text
//! T(x, y) = ((a + f cos(bx) - g sin(bx)) cos x,
//!            (a + f cos(bx) - g sin(bx)) sin x,
//!             f sin(bx) + g cos(bx))
//! ```
//!
//! where `(f(y), g(y))` is a regular planar profile, `a` offsets the profile
//! from the rotation axis, and `b` is the twist rate coupling the sweep angle
//! `x` to a rotation of the profile plane. `b = 0` recovers the classical
//! surface of revolution.

use crate::expr::{EvalError, Interval, ProfileCurve};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

/// Point or vector in Euclidean 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Euclidean inner product.
    pub fn inner(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Euclidean length.
    pub fn norm(self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;

    fn add(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;

    fn sub(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;

    fn mul(self, scale: f64) -> Vec3 {
        Vec3::new(self.x * scale, self.y * scale, self.z * scale)
    }
}

/// The angle between two vectors is undefined when either has zero length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("angle between vectors is undefined for a zero vector")]
pub struct ZeroVectorError;

/// Returns the angle in `[0, pi]` between two nonzero vectors.
pub fn angle_between(u: Vec3, v: Vec3) -> Result<f64, ZeroVectorError> {
    if u.norm() == 0.0 || v.norm() == 0.0 {
        return Err(ZeroVectorError);
    }
    // The atan2 form stays fully accurate where acos of the normalized
    // inner product loses digits, near parallel and antiparallel pairs.
    Ok(u.cross(v).norm().atan2(u.inner(v)))
}

/// Coefficients of the first fundamental form at a surface point.
///
/// `g11 = <T_x, T_x>`, `g12 = <T_x, T_y>`, `g22 = <T_y, T_y>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricCoeffs {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl MetricCoeffs {
    /// Determinant `g11 g22 - g12^2`; positive exactly at regular points.
    pub fn det(self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }
}

/// Rejected surface construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("surface evaluation failed at (x, y) = ({x}, {y}): {source}")]
    Eval { x: f64, y: f64, source: EvalError },
    #[error("surface is irregular at ({x}, {y}): metric determinant {det:e} is not positive")]
    Irregular { x: f64, y: f64, det: f64 },
    #[error("regularity grid needs at least 2 samples per axis, got {nx} x {ny}")]
    InvalidGrid { nx: usize, ny: usize },
}

/// Twisted surface with offset `a`, twist rate `b`, and a regular profile.
///
/// Construction checks that the metric determinant is positive on a sample
/// grid over `x_domain` times the profile domain (default 64 x 64); a
/// non-positive determinant at any grid node is rejected. Like the profile
/// regularity check, this is a sampling heuristic. Evaluation itself does not
/// restrict `x`: the sweep is defined for every real angle, and `x_domain`
/// only bounds where meshes and courses are traced.
#[derive(Debug, Clone)]
pub struct TwistedSurface {
    a: f64,
    b: f64,
    profile: ProfileCurve,
    x_domain: Interval,
}

impl TwistedSurface {
    pub const DEFAULT_GRID: usize = 64;

    /// Builds a surface, checking regularity on the default grid.
    ///
    /// `x_domain` defaults to `[-2 pi, 2 pi]`.
    pub fn new(
        a: f64,
        b: f64,
        profile: ProfileCurve,
        x_domain: Option<Interval>,
    ) -> Result<Self, SurfaceError> {
        let x_domain = x_domain
            .unwrap_or_else(|| Interval::new(-2.0 * PI, 2.0 * PI).expect("constant interval"));
        Self::with_grid(
            a,
            b,
            profile,
            x_domain,
            Self::DEFAULT_GRID,
            Self::DEFAULT_GRID,
        )
    }

    /// Builds a surface with an explicit regularity grid resolution.
    pub fn with_grid(
        a: f64,
        b: f64,
        profile: ProfileCurve,
        x_domain: Interval,
        nx: usize,
        ny: usize,
    ) -> Result<Self, SurfaceError> {
        if nx < 2 || ny < 2 {
            return Err(SurfaceError::InvalidGrid { nx, ny });
        }
        let surface = TwistedSurface {
            a,
            b,
            profile,
            x_domain,
        };
        let y_domain = surface.profile.domain();
        for i in 0..ny {
            let y = y_domain.lerp(i as f64 / (ny - 1) as f64);
            for j in 0..nx {
                let x = x_domain.lerp(j as f64 / (nx - 1) as f64);
                let metric = surface
                    .metric(x, y)
                    .map_err(|source| SurfaceError::Eval { x, y, source })?;
                let det = metric.det();
                if det <= 0.0 {
                    return Err(SurfaceError::Irregular { x, y, det });
                }
            }
        }
        Ok(surface)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn profile(&self) -> &ProfileCurve {
        &self.profile
    }

    /// Sweep-angle interval where meshes and courses are traced.
    pub fn x_domain(&self) -> Interval {
        self.x_domain
    }

    /// Profile-parameter interval (the surface's y-domain).
    pub fn y_domain(&self) -> Interval {
        self.profile.domain()
    }

    /// Evaluates the surface point `T(x, y)`.
    pub fn eval_point(&self, x: f64, y: f64) -> Result<Vec3, EvalError> {
        let f = self.profile.f_at(y)?;
        let g = self.profile.g_at(y)?;
        let (sb, cb) = (self.b * x).sin_cos();
        let w = self.a + f * cb - g * sb;
        let h = f * sb + g * cb;
        let (sx, cx) = x.sin_cos();
        Ok(Vec3::new(w * cx, w * sx, h))
    }

    /// Evaluates the first partial derivatives `(T_x, T_y)`.
    pub fn eval_partials(&self, x: f64, y: f64) -> Result<(Vec3, Vec3), EvalError> {
        let f = self.profile.f_at(y)?;
        let g = self.profile.g_at(y)?;
        let df = self.profile.f_prime_at(y)?;
        let dg = self.profile.g_prime_at(y)?;
        let (sb, cb) = (self.b * x).sin_cos();
        let w = self.a + f * cb - g * sb;
        let h = f * sb + g * cb;
        let wy = df * cb - dg * sb;
        let hy = df * sb + dg * cb;
        let (sx, cx) = x.sin_cos();
        let tx = Vec3::new(
            -self.b * h * cx - w * sx,
            -self.b * h * sx + w * cx,
            self.b * (w - self.a),
        );
        let ty = Vec3::new(wy * cx, wy * sx, hy);
        Ok((tx, ty))
    }

    /// Evaluates the first fundamental form at `(x, y)`.
    ///
    /// Uses the closed form
    ///
    /// ```text
    /// g11 = (2a^2 + (1 + 2b^2 + cos 2bx) f^2 + (1 + 2b^2 - cos 2bx) g^2
    ///        - 4 a g sin(bx) + 4 f cos(bx) (a - g sin(bx))) / 2
    /// g12 = b (f g' - f' g)
    /// g22 = f'^2 + g'^2
    /// ```
    ///
    /// which agrees with the inner products of [`Self::eval_partials`].
    pub fn metric(&self, x: f64, y: f64) -> Result<MetricCoeffs, EvalError> {
        let f = self.profile.f_at(y)?;
        let g = self.profile.g_at(y)?;
        let df = self.profile.f_prime_at(y)?;
        let dg = self.profile.g_prime_at(y)?;
        let a = self.a;
        let b = self.b;
        let (sb, cb) = (b * x).sin_cos();
        let c2b = (2.0 * b * x).cos();
        let g11 = 0.5
            * (2.0 * a * a
                + (1.0 + 2.0 * b * b + c2b) * f * f
                + (1.0 + 2.0 * b * b - c2b) * g * g
                - 4.0 * a * g * sb
                + 4.0 * f * cb * (a - g * sb));
        let g12 = b * (f * dg - df * g);
        let g22 = df * df + dg * dg;
        Ok(MetricCoeffs { g11, g12, g22 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn profile(f: &str, g: &str, lo: f64, hi: f64) -> ProfileCurve {
        ProfileCurve::new(
            parse_expression(f).unwrap(),
            parse_expression(g).unwrap(),
            Interval::new(lo, hi).unwrap(),
        )
        .unwrap()
    }

    fn torus_like() -> TwistedSurface {
        TwistedSurface::new(1.0, 0.0, profile("cos(y)", "sin(y)", -3.0, 3.0), None).unwrap()
    }

    fn twisted_line() -> TwistedSurface {
        TwistedSurface::new(
            0.0,
            0.5,
            profile("y", "0", 0.1, 25.0),
            Some(Interval::new(-2.0 * PI, 2.0 * PI).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn vector_operations() {
        let u = Vec3::new(1.0, 2.0, 2.0);
        let v = Vec3::new(2.0, 0.0, 0.0);
        assert!((u.norm() - 3.0).abs() < 1e-15);
        assert!((u.inner(v) - 2.0).abs() < 1e-15);
        let w = Vec3::new(1.0, 0.0, 0.0).cross(Vec3::new(0.0, 1.0, 0.0));
        assert!((w - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn angle_between_vectors() {
        let right = angle_between(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 3.0, 0.0)).unwrap();
        assert!((right - PI / 2.0).abs() < 1e-15);
        let opposite = angle_between(Vec3::new(1.0, 1.0, 0.0), Vec3::new(-2.0, -2.0, 0.0)).unwrap();
        assert!((opposite - PI).abs() < 1e-12);
        assert!(angle_between(Vec3::default(), Vec3::new(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn evaluates_known_points() {
        let torus = torus_like();
        let p = torus.eval_point(0.0, 0.0).unwrap();
        assert!((p - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-15);

        let q = torus.eval_point(PI / 2.0, 0.0).unwrap();
        assert!((q - Vec3::new(0.0, 2.0, 0.0)).norm() < 1e-15);

        // With twist rate 1/2, a quarter of the profile rotation happens by
        // x = pi, carrying the profile point onto the axis direction.
        let line = twisted_line();
        let r = line.eval_point(PI, 2.0).unwrap();
        assert!((r - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn partials_match_finite_differences() {
        let surfaces = [torus_like(), twisted_line()];
        let h = 1e-6;
        for surface in &surfaces {
            for &(x, y) in &[(0.3, 0.9), (-1.2, 2.1), (2.8, 1.4)] {
                let (tx, ty) = surface.eval_partials(x, y).unwrap();
                let px = (surface.eval_point(x + h, y).unwrap()
                    - surface.eval_point(x - h, y).unwrap())
                    * (0.5 / h);
                let py = (surface.eval_point(x, y + h).unwrap()
                    - surface.eval_point(x, y - h).unwrap())
                    * (0.5 / h);
                assert!((tx - px).norm() < 1e-5 * (1.0 + tx.norm()));
                assert!((ty - py).norm() < 1e-5 * (1.0 + ty.norm()));
            }
        }
    }

    #[test]
    fn metric_matches_partial_inner_products() {
        let surfaces = [torus_like(), twisted_line()];
        for surface in &surfaces {
            for &(x, y) in &[(0.0, 1.0), (1.7, 0.4), (-2.4, 2.9)] {
                let (tx, ty) = surface.eval_partials(x, y).unwrap();
                let m = surface.metric(x, y).unwrap();
                assert!((m.g11 - tx.inner(tx)).abs() < 1e-9 * (1.0 + m.g11.abs()));
                assert!((m.g12 - tx.inner(ty)).abs() < 1e-9 * (1.0 + m.g12.abs()));
                assert!((m.g22 - ty.inner(ty)).abs() < 1e-9 * (1.0 + m.g22.abs()));
            }
        }
    }

    #[test]
    fn twisted_line_metric_closed_form() {
        // For profile (y, 0) with a = 0, b = 1/2:
        // g11 = y^2 (3 + 2 cos x) / 4, g12 = 0, g22 = 1.
        let line = twisted_line();
        let m = line.metric(0.0, 2.0).unwrap();
        assert!((m.g11 - 5.0).abs() < 1e-12);
        assert!(m.g12.abs() < 1e-15);
        assert!((m.g22 - 1.0).abs() < 1e-15);

        let m2 = line.metric(1.1, 3.0).unwrap();
        let expected = 9.0 * (3.0 + 2.0 * (1.1f64).cos()) / 4.0;
        assert!((m2.g11 - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_twist_makes_the_metric_diagonal() {
        let torus = torus_like();
        for &(x, y) in &[(0.0, 0.0), (1.3, -1.1), (-2.9, 2.2)] {
            let m = torus.metric(x, y).unwrap();
            assert_eq!(m.g12, 0.0);
        }
    }

    #[test]
    fn construction_rejects_irregular_grid_points() {
        // Profile (y, 0) collapses to the axis at y = 0, where the proper
        // distance around the sweep vanishes and the determinant is zero.
        let err = TwistedSurface::new(0.0, 0.5, profile("y", "0", 0.0, 1.0), None).unwrap_err();
        match err {
            SurfaceError::Irregular { y, det, .. } => {
                assert_eq!(y, 0.0);
                assert_eq!(det, 0.0);
            }
            other => panic!("expected irregular surface, got {other:?}"),
        }
    }

    #[test]
    fn default_x_domain_spans_two_turns() {
        let torus = torus_like();
        assert!((torus.x_domain().lo() + 2.0 * PI).abs() < 1e-15);
        assert!((torus.x_domain().hi() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_evaluation_is_rejected() {
        let torus = torus_like();
        assert!(matches!(
            torus.eval_point(0.0, 4.0),
            Err(EvalError::OutOfDomain { .. })
        ));
    }
}
