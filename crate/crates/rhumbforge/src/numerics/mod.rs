//! Adaptive integration of loxodrome slope fields and arc-length measures.
//!
//! Courses are integrated with an embedded Dormand-Prince 5(4) scheme under a
//! proportional step controller. The integrated state is the pair `[v, s]`:
//! the dependent coordinate and the running arc length, so every accepted
//! step carries its own cumulative length. The accepted steps themselves form
//! the returned polyline; `max_step` keeps them dense enough to serve as
//! plot-ready samples and as nodes for the independent arc-length
//! re-measurement in [`arc_length`].

mod dopri5;
mod elliptic;
mod quad;

pub use elliptic::{elliptic_e_incomplete, EllipticError};
pub use quad::{adaptive_gauss_kronrod, adaptive_simpson, QuadError};

use crate::expr::EvalError;
use crate::loxodrome::{LoxodromeSpec, SlopeError, SlopeField, DEGENERATE_START_DET};
use crate::surface::{TwistedSurface, Vec3};
use dopri5::{try_step, State};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Step-size and tolerance settings for course integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Absolute tolerance per component of the local error test.
    #[serde(default = "default_tol")]
    pub abs_tol: f64,
    /// Relative tolerance per component of the local error test.
    #[serde(default = "default_tol")]
    pub rel_tol: f64,
    /// Upper bound on the step size; also the sample density of the result.
    #[serde(default = "default_max_step")]
    pub max_step: f64,
    /// Lower bound on the step size before integration gives up.
    #[serde(default = "default_min_step")]
    pub min_step: f64,
    /// Upper bound on attempted steps per course.
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_step() -> f64 {
    0.05
}

fn default_min_step() -> f64 {
    1e-12
}

fn default_max_steps() -> usize {
    1_000_000
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            abs_tol: default_tol(),
            rel_tol: default_tol(),
            max_step: default_max_step(),
            min_step: default_min_step(),
            max_steps: default_max_steps(),
        }
    }
}

impl IntegratorConfig {
    /// Checks that tolerances and step bounds are positive and ordered.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let ok = self.abs_tol > 0.0
            && self.abs_tol.is_finite()
            && self.rel_tol > 0.0
            && self.rel_tol.is_finite()
            && self.max_step > 0.0
            && self.max_step.is_finite()
            && self.min_step > 0.0
            && self.min_step <= self.max_step
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(ConfigError {
                config: self.clone(),
            })
        }
    }
}

/// Rejected integrator configuration.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid integrator configuration {config:?}: tolerances and step bounds must be positive, finite, and ordered")]
pub struct ConfigError {
    pub config: IntegratorConfig,
}

/// One accepted integration node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Integration parameter (`x` for meridian courses, `y` for parallel).
    pub u: f64,
    /// Integrated coordinate (`y` for meridian courses, `x` for parallel).
    pub v: f64,
    /// Embedded surface point at `(u, v)`.
    pub point: Vec3,
    /// Cumulative arc length from the polyline's first sample.
    pub s: f64,
}

/// Rejected polyline construction.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PolylineError {
    #[error("a polyline needs at least one sample")]
    Empty,
    #[error("sample parameters must strictly increase (violated at index {index})")]
    ParameterOrder { index: usize },
    #[error("arc length must start at zero and never decrease (violated at index {index})")]
    ArcLengthOrder { index: usize },
}

/// Integrated course: samples with strictly increasing `u` and cumulative
/// arc length starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Sample>", into = "Vec<Sample>")]
pub struct Polyline {
    samples: Vec<Sample>,
}

impl Polyline {
    pub fn new(samples: Vec<Sample>) -> Result<Self, PolylineError> {
        if samples.is_empty() {
            return Err(PolylineError::Empty);
        }
        if samples[0].s.abs() > 1e-9 {
            return Err(PolylineError::ArcLengthOrder { index: 0 });
        }
        for index in 1..samples.len() {
            if samples[index].u <= samples[index - 1].u {
                return Err(PolylineError::ParameterOrder { index });
            }
            if samples[index].s < samples[index - 1].s {
                return Err(PolylineError::ArcLengthOrder { index });
            }
        }
        Ok(Polyline { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &Sample {
        self.samples.first().expect("polylines are never empty")
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("polylines are never empty")
    }

    /// Total arc length accumulated by the integrator.
    pub fn total_length(&self) -> f64 {
        self.last().s
    }

    /// Sample with parameter closest to `u`.
    pub fn nearest(&self, u: f64) -> &Sample {
        let mut best = self.first();
        let mut best_dist = f64::INFINITY;
        for sample in &self.samples {
            let dist = (sample.u - u).abs();
            if dist < best_dist {
                best_dist = dist;
                best = sample;
            }
        }
        best
    }
}

impl TryFrom<Vec<Sample>> for Polyline {
    type Error = PolylineError;

    fn try_from(samples: Vec<Sample>) -> Result<Self, Self::Error> {
        Polyline::new(samples)
    }
}

impl From<Polyline> for Vec<Sample> {
    fn from(polyline: Polyline) -> Self {
        polyline.samples
    }
}

/// Why an integration stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FailureKind {
    #[error("integrator configuration is invalid: tolerances and step bounds must be positive, finite, and ordered")]
    InvalidConfig,
    #[error("step size underflowed below min_step at u = {u}")]
    StepUnderflow { u: f64 },
    #[error("course hit a singular point near (u, v) = ({u}, {v}): metric determinant below 1e-12")]
    SingularityHit { u: f64, v: f64 },
    #[error("course left the surface domain near (u, v) = ({u}, {v})")]
    DomainExit { u: f64, v: f64 },
    #[error("course exceeded the step budget of {max_steps}")]
    MaxStepsExceeded { max_steps: usize },
}

/// Early termination, carrying whatever was integrated before the stop.
#[derive(Debug, Clone, Error)]
#[error("{kind}")]
pub struct IntegrationError {
    pub kind: FailureKind,
    /// Slope-field failure that triggered the stop, when one did.
    #[source]
    pub cause: Option<SlopeError>,
    /// Accepted samples in ascending `u` with rebased arc length; possibly
    /// empty when the start itself is invalid.
    pub partial: Vec<Sample>,
}

/// Result of a completed course integration.
#[derive(Debug, Clone)]
pub struct LoxodromeRun {
    pub polyline: Polyline,
    /// Sum of accepted local error magnitudes for the integrated coordinate;
    /// a conservative bound on the endpoint error.
    pub err_estimate: f64,
    /// Accepted steps across both legs.
    pub steps: usize,
    /// Rejected (re-attempted) steps across both legs.
    pub rejected_steps: usize,
    /// Parameter value of the degenerate start, if one was detected.
    pub fold_at: Option<f64>,
}

fn failure_from_slope(err: &SlopeError, u: f64, v: f64) -> FailureKind {
    match err {
        SlopeError::Eval(EvalError::OutOfDomain { .. })
        | SlopeError::Eval(EvalError::Domain { .. }) => FailureKind::DomainExit { u, v },
        SlopeError::Eval(EvalError::NonFinite)
        | SlopeError::Irregular { .. }
        | SlopeError::SingularDenominator { .. } => FailureKind::SingularityHit { u, v },
    }
}

struct Leg {
    /// Samples ordered from the start outward, raw signed arc length.
    samples: Vec<Sample>,
    err_acc: f64,
    steps: usize,
    rejected: usize,
}

/// Integrates the course described by `spec` across its span.
///
/// The start may sit anywhere inside the span; the two legs (down to the
/// span's low end, up to its high end) are integrated separately and merged
/// into one polyline ascending in `u`, with the arc length rebased to start
/// at zero at the low end. A start where the metric determinant is below
/// `1e-12` is treated as a fold of the slope quadratic (see
/// [`SlopeField::for_spec`]); away from the start, determinants below that
/// threshold stop the course with [`FailureKind::SingularityHit`].
pub fn integrate_loxodrome(
    surface: &TwistedSurface,
    spec: &LoxodromeSpec,
) -> Result<LoxodromeRun, IntegrationError> {
    spec.config().validate().map_err(|_| IntegrationError {
        kind: FailureKind::InvalidConfig,
        cause: None,
        partial: Vec::new(),
    })?;

    // The span must stay inside the domain of the integration parameter.
    let u_domain = match spec.family() {
        crate::loxodrome::Family::Meridian => surface.x_domain(),
        crate::loxodrome::Family::Parallel => surface.y_domain(),
    };
    let span = spec.span();
    if !u_domain.contains(span.lo()) || !u_domain.contains(span.hi()) {
        let u = if u_domain.contains(span.lo()) {
            span.hi()
        } else {
            span.lo()
        };
        return Err(IntegrationError {
            kind: FailureKind::DomainExit {
                u,
                v: spec.start_v(),
            },
            cause: None,
            partial: Vec::new(),
        });
    }

    let field = SlopeField::for_spec(surface, spec).map_err(|err| IntegrationError {
        kind: failure_from_slope(&err, spec.start_u(), spec.start_v()),
        cause: Some(err),
        partial: Vec::new(),
    })?;

    let u0 = spec.start_u();
    let v0 = spec.start_v();

    let down = match integrate_leg(surface, &field, spec.config(), u0, v0, span.lo()) {
        Ok(leg) => leg,
        Err(failure) => {
            return Err(IntegrationError {
                kind: failure.kind,
                cause: failure.cause,
                partial: finalize(vec![failure.samples]),
            })
        }
    };
    let up = match integrate_leg(surface, &field, spec.config(), u0, v0, span.hi()) {
        Ok(leg) => leg,
        Err(failure) => {
            return Err(IntegrationError {
                kind: failure.kind,
                cause: failure.cause,
                partial: finalize(vec![down.samples, failure.samples]),
            })
        }
    };

    let err_estimate = (down.err_acc + up.err_acc).max(f64::EPSILON);
    let steps = down.steps + up.steps;
    let rejected_steps = down.rejected + up.rejected;
    let samples = finalize(vec![down.samples, up.samples]);
    let polyline = Polyline::new(samples).expect("legs produce a valid polyline");
    Ok(LoxodromeRun {
        polyline,
        err_estimate,
        steps,
        rejected_steps,
        fold_at: field.fold_at(),
    })
}

/// Merges leg samples into ascending order, dropping duplicated start
/// samples and rebasing the arc length to zero at the first sample.
fn finalize(legs: Vec<Vec<Sample>>) -> Vec<Sample> {
    let mut merged: Vec<Sample> = Vec::new();
    for leg in legs {
        merged.extend(leg);
    }
    if merged.is_empty() {
        return merged;
    }
    merged.sort_by(|a, b| a.u.total_cmp(&b.u));
    merged.dedup_by(|a, b| a.u == b.u);
    let s0 = merged[0].s;
    for sample in &mut merged {
        sample.s -= s0;
    }
    merged
}

struct LegFailure {
    kind: FailureKind,
    cause: Option<SlopeError>,
    samples: Vec<Sample>,
}

fn integrate_leg(
    surface: &TwistedSurface,
    field: &SlopeField,
    config: &IntegratorConfig,
    u0: f64,
    v0: f64,
    u_end: f64,
) -> Result<Leg, LegFailure> {
    let (x0, y0) = course_to_surface(field, u0, v0);
    let start_point = match surface.eval_point(x0, y0) {
        Ok(p) => p,
        Err(err) => {
            let cause = SlopeError::Eval(err);
            return Err(LegFailure {
                kind: failure_from_slope(&cause, u0, v0),
                cause: Some(cause),
                samples: Vec::new(),
            });
        }
    };
    let mut samples = vec![Sample {
        u: u0,
        v: v0,
        point: start_point,
        s: 0.0,
    }];
    let mut leg = Leg {
        samples: Vec::new(),
        err_acc: 0.0,
        steps: 0,
        rejected: 0,
    };
    if u_end == u0 {
        leg.samples = samples;
        return Ok(leg);
    }

    let direction = (u_end - u0).signum();
    let mut rhs = |u: f64, state: State| -> Result<State, SlopeError> {
        let m = field.slope(u, state[0])?;
        let speed = field.speed(u, state[0], m)?;
        Ok([m, speed])
    };

    let mut u = u0;
    let mut state: State = [v0, 0.0];
    let mut k_first = match rhs(u, state) {
        Ok(k) => k,
        Err(err) => {
            return Err(LegFailure {
                kind: failure_from_slope(&err, u0, v0),
                cause: Some(err),
                samples,
            })
        }
    };
    let mut h = config.max_step.min((u_end - u0).abs());
    let mut attempts = 0usize;

    while (u_end - u) * direction > 0.0 {
        attempts += 1;
        if attempts > config.max_steps {
            return Err(LegFailure {
                kind: FailureKind::MaxStepsExceeded {
                    max_steps: config.max_steps,
                },
                cause: None,
                samples,
            });
        }
        let remaining = (u_end - u).abs();
        let mut h_eff = h.min(remaining);
        // Stretch the final step over any sliver shorter than min_step, so
        // rounding in `u + h` near the span end cannot strand the course one
        // ulp short of it.
        if remaining - h_eff < config.min_step {
            h_eff = remaining;
        }
        if h_eff < config.min_step {
            return Err(LegFailure {
                kind: FailureKind::StepUnderflow { u },
                cause: None,
                samples,
            });
        }

        let outcome = match try_step(&mut rhs, u, state, k_first, direction * h_eff) {
            Ok(out) => out,
            Err(err) => {
                // A stage left the field's domain; approach the boundary by
                // shrinking, and stop just inside once steps bottom out.
                if h_eff <= 2.0 * config.min_step {
                    return Err(LegFailure {
                        kind: failure_from_slope(&err, u, state[0]),
                        cause: Some(err),
                        samples,
                    });
                }
                h = 0.5 * h_eff;
                leg.rejected += 1;
                continue;
            }
        };

        let scale_v = config.abs_tol
            + config.rel_tol * state[0].abs().max(outcome.y_new[0].abs());
        let scale_s = config.abs_tol
            + config.rel_tol * state[1].abs().max(outcome.y_new[1].abs());
        let err_norm = (0.5
            * ((outcome.err[0] / scale_v).powi(2) + (outcome.err[1] / scale_s).powi(2)))
        .sqrt();

        if err_norm > 1.0 {
            leg.rejected += 1;
            let factor = (0.9 * err_norm.powf(-0.2)).max(0.2);
            h = h_eff * factor;
            continue;
        }

        let u_next = if h_eff >= remaining {
            u_end
        } else {
            u + direction * h_eff
        };
        let v_next = outcome.y_new[0];

        // Post-acceptance checks at the step endpoint: the course must stay
        // on the regular part of the surface. The start itself is exempt,
        // which is what lets fold starts integrate outward.
        let (x, y) = course_to_surface(field, u_next, v_next);
        let check = match surface.metric(x, y) {
            Ok(metric) if metric.det() < DEGENERATE_START_DET => Some((
                FailureKind::SingularityHit {
                    u: u_next,
                    v: v_next,
                },
                None,
            )),
            Ok(_) => None,
            Err(err) => {
                let cause = SlopeError::Eval(err);
                Some((failure_from_slope(&cause, u_next, v_next), Some(cause)))
            }
        };
        if let Some((kind, cause)) = check {
            if h_eff <= 2.0 * config.min_step {
                return Err(LegFailure {
                    kind,
                    cause,
                    samples,
                });
            }
            h = 0.5 * h_eff;
            leg.rejected += 1;
            continue;
        }
        let point = match surface.eval_point(x, y) {
            Ok(p) => p,
            Err(err) => {
                let cause = SlopeError::Eval(err);
                let kind = failure_from_slope(&cause, u_next, v_next);
                if h_eff <= 2.0 * config.min_step {
                    return Err(LegFailure {
                        kind,
                        cause: Some(cause),
                        samples,
                    });
                }
                h = 0.5 * h_eff;
                leg.rejected += 1;
                continue;
            }
        };

        u = u_next;
        state = outcome.y_new;
        k_first = outcome.k_last;
        leg.steps += 1;
        leg.err_acc += outcome.err[0].abs();
        samples.push(Sample {
            u,
            v: state[0],
            point,
            s: state[1],
        });

        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h_eff * factor).min(config.max_step);
    }

    leg.samples = samples;
    Ok(leg)
}

fn course_to_surface(field: &SlopeField, u: f64, v: f64) -> (f64, f64) {
    match field.family() {
        crate::loxodrome::Family::Meridian => (u, v),
        crate::loxodrome::Family::Parallel => (v, u),
    }
}

/// Arc-length measurement failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArcLengthError {
    #[error(transparent)]
    Slope(#[from] SlopeError),
    #[error("arc-length quadrature did not converge on [{a}, {b}]")]
    NonConvergence { a: f64, b: f64 },
}

const ARC_LENGTH_TOL: f64 = 1e-10;

/// Re-measures the arc length of an integrated course by adaptive Simpson
/// quadrature of the surface speed, independent of the arc length the
/// integrator accumulated.
///
/// Between samples the course is modeled as a cubic Hermite interpolant of
/// `v(u)` whose endpoint slopes come from the slope field, and the speed
/// integrand re-evaluates the field at each quadrature node rather than
/// differencing the polyline. Tolerance `1e-10`, distributed over segments
/// by parameter length.
pub fn arc_length(field: &SlopeField, curve: &Polyline) -> Result<f64, ArcLengthError> {
    arc_length_with_tolerance(field, curve, ARC_LENGTH_TOL)
}

/// [`arc_length`] with an explicit quadrature tolerance.
pub fn arc_length_with_tolerance(
    field: &SlopeField,
    curve: &Polyline,
    tolerance: f64,
) -> Result<f64, ArcLengthError> {
    let samples = curve.samples();
    if samples.len() < 2 {
        return Ok(0.0);
    }
    let span = samples[samples.len() - 1].u - samples[0].u;
    let mut total = 0.0;
    let mut slope_left = field.slope(samples[0].u, samples[0].v)?;
    for pair in samples.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let slope_right = field.slope(b.u, b.v)?;
        let width = b.u - a.u;
        let tol = tolerance * (width / span).max(f64::EPSILON);
        let mut integrand = |t: f64| -> Result<f64, SlopeError> {
            let s = (t - a.u) / width;
            let s2 = s * s;
            let s3 = s2 * s;
            let v = (2.0 * s3 - 3.0 * s2 + 1.0) * a.v
                + (s3 - 2.0 * s2 + s) * width * slope_left
                + (-2.0 * s3 + 3.0 * s2) * b.v
                + (s3 - s2) * width * slope_right;
            let m = field.slope(t, v)?;
            field.speed(t, v, m)
        };
        total += adaptive_simpson(&mut integrand, a.u, b.u, tol).map_err(|err| match err {
            QuadError::NonConvergence { a, b } => ArcLengthError::NonConvergence { a, b },
            QuadError::Integrand(slope_err) => ArcLengthError::Slope(slope_err),
        })?;
        slope_left = slope_right;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expression, Interval, ProfileCurve};
    use crate::loxodrome::{Branch, Family};
    use std::f64::consts::PI;

    fn build_surface(
        a: f64,
        b: f64,
        f: &str,
        g: &str,
        y_lo: f64,
        y_hi: f64,
        x_domain: Option<Interval>,
    ) -> TwistedSurface {
        let profile = ProfileCurve::new(
            parse_expression(f).unwrap(),
            parse_expression(g).unwrap(),
            Interval::new(y_lo, y_hi).unwrap(),
        )
        .unwrap();
        TwistedSurface::new(a, b, profile, x_domain).unwrap()
    }

    fn torus_like() -> TwistedSurface {
        build_surface(1.0, 0.0, "cos(y)", "sin(y)", -3.0, 3.0, None)
    }

    fn spec(
        family: Family,
        angle: f64,
        start: (f64, f64),
        span: (f64, f64),
    ) -> LoxodromeSpec {
        LoxodromeSpec::new(
            family,
            angle,
            Branch::Minus,
            start,
            Interval::new(span.0, span.1).unwrap(),
            IntegratorConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        let bad = IntegratorConfig {
            abs_tol: 0.0,
            ..IntegratorConfig::default()
        };
        assert!(bad.validate().is_err());
        let inverted = IntegratorConfig {
            min_step: 1.0,
            max_step: 0.5,
            ..IntegratorConfig::default()
        };
        assert!(inverted.validate().is_err());
    }

    #[test]
    fn torus_course_tracks_its_closed_form() {
        // On the torus-like surface from (0, 0) at angle pi/4 the course is
        // y(x) = 2 arctan(x tan(pi/4)).
        let surface = torus_like();
        let run = integrate_loxodrome(
            &surface,
            &spec(Family::Meridian, PI / 4.0, (0.0, 0.0), (-PI, PI)),
        )
        .unwrap();
        assert!(run.fold_at.is_none());
        let mut worst: f64 = 0.0;
        for sample in run.polyline.samples() {
            let closed = 2.0 * sample.u.atan();
            worst = worst.max((sample.v - closed).abs());
        }
        assert!(worst < 1e-8, "worst deviation {worst:e}");

        // The endpoints land on the span ends exactly.
        assert_eq!(run.polyline.first().u, -PI);
        assert_eq!(run.polyline.last().u, PI);
        let expected_end = 2.0 * PI.atan();
        assert!((run.polyline.last().v - expected_end).abs() < 1e-8);
        assert!((run.polyline.first().v + expected_end).abs() < 1e-8);
    }

    #[test]
    fn arc_length_routes_agree_on_the_torus_course() {
        // Closed form: with y(x) = 2 arctan(x), the speed is
        // 2 sqrt(2) / (1 + x^2), so the length over [-pi, pi] is
        // 4 sqrt(2) arctan(pi).
        let surface = torus_like();
        let course = spec(Family::Meridian, PI / 4.0, (0.0, 0.0), (-PI, PI));
        let run = integrate_loxodrome(&surface, &course).unwrap();
        let expected = 4.0 * 2.0f64.sqrt() * PI.atan();
        assert!((run.polyline.total_length() - expected).abs() < 1e-8);

        // Re-measurement interpolates between the stored samples, so its
        // accuracy is set by the sample spacing.
        let field = SlopeField::for_spec(&surface, &course).unwrap();
        let measured = arc_length(&field, &run.polyline).unwrap();
        assert!((measured - expected).abs() < 1e-6);

        // A finer spacing tightens the re-measurement by two decades.
        let fine_config = IntegratorConfig {
            max_step: 0.01,
            ..IntegratorConfig::default()
        };
        let fine_course = course.with_config(fine_config);
        let fine_run = integrate_loxodrome(&surface, &fine_course).unwrap();
        let fine_measured = arc_length(&field, &fine_run.polyline).unwrap();
        assert!((fine_measured - expected).abs() < 1e-8);
    }

    #[test]
    fn span_end_is_reached_when_steps_round_one_ulp_short() {
        // Fifty accepted steps of 0.05 accumulate to one ulp below 2.5, and
        // the remaining sliver is narrower than min_step. The final step must
        // absorb it instead of reporting an underflow.
        let surface = build_surface(0.0, 0.0, "cos(y)", "sin(y)", -1.45, 1.45, None);
        let run = integrate_loxodrome(
            &surface,
            &spec(Family::Meridian, PI / 4.0, (0.0, 0.0), (0.0, 2.5)),
        )
        .unwrap();
        assert_eq!(run.polyline.last().u, 2.5);
        let expected = 2.5f64.sinh().atan();
        assert!((run.polyline.last().v - expected).abs() < 1e-8);
    }

    #[test]
    fn arc_length_is_additive() {
        let surface = torus_like();
        let whole_spec = spec(Family::Meridian, PI / 4.0, (0.0, 0.0), (-PI, PI));
        let whole = integrate_loxodrome(&surface, &whole_spec).unwrap();
        let left = integrate_loxodrome(
            &surface,
            &spec(Family::Meridian, PI / 4.0, (-PI, -2.0 * PI.atan()), (-PI, 0.0)),
        )
        .unwrap();
        let right = integrate_loxodrome(
            &surface,
            &spec(Family::Meridian, PI / 4.0, (0.0, 0.0), (0.0, PI)),
        )
        .unwrap();
        let sum = left.polyline.total_length() + right.polyline.total_length();
        assert!((whole.polyline.total_length() - sum).abs() < 1e-9);
    }

    #[test]
    fn near_zero_angle_course_stays_on_its_parallel() {
        let surface = torus_like();
        let run = integrate_loxodrome(
            &surface,
            &spec(Family::Meridian, 1e-8, (0.0, 0.5), (0.0, 2.0 * PI)),
        )
        .unwrap();
        let drift = (run.polyline.last().v - 0.5).abs();
        assert!(drift < 1e-6, "drift {drift:e}");
    }

    #[test]
    fn polyline_samples_lie_on_the_surface() {
        let surface = torus_like();
        let run = integrate_loxodrome(
            &surface,
            &spec(Family::Meridian, 0.9, (0.0, 0.0), (0.0, PI)),
        )
        .unwrap();
        assert!(run.steps > 20);
        for sample in run.polyline.samples() {
            let p = surface.eval_point(sample.u, sample.v).unwrap();
            assert!((p - sample.point).norm() < 1e-12);
        }
        // Arc length is strictly accumulated.
        assert_eq!(run.polyline.first().s, 0.0);
        assert!(run.polyline.total_length() > 0.0);
    }

    #[test]
    fn interior_start_merges_both_legs() {
        let surface = torus_like();
        let run = integrate_loxodrome(
            &surface,
            &spec(Family::Meridian, PI / 4.0, (0.0, 0.0), (-1.0, 2.0)),
        )
        .unwrap();
        assert_eq!(run.polyline.first().u, -1.0);
        assert_eq!(run.polyline.last().u, 2.0);
        // The start sample appears exactly once.
        let zeros = run
            .polyline
            .samples()
            .iter()
            .filter(|sample| sample.u == 0.0)
            .count();
        assert_eq!(zeros, 1);
        // s increases from the low end even though integration ran outward
        // from the middle.
        assert_eq!(run.polyline.first().s, 0.0);
        let nearest = run.polyline.nearest(0.0);
        assert!(nearest.s > 0.0);
    }

    #[test]
    fn tolerance_refinement_stays_within_the_error_estimate() {
        let surface = torus_like();
        let base = spec(Family::Meridian, PI / 4.0, (0.0, 0.0), (0.0, PI));
        let run = integrate_loxodrome(&surface, &base).unwrap();
        let tighter_config = IntegratorConfig {
            abs_tol: 0.5e-10,
            rel_tol: 0.5e-10,
            max_step: 0.025,
            ..IntegratorConfig::default()
        };
        let tighter = integrate_loxodrome(&surface, &base.clone().with_config(tighter_config))
            .unwrap();
        let diff = (run.polyline.last().v - tighter.polyline.last().v).abs();
        assert!(
            diff < run.err_estimate,
            "diff {diff:e} vs estimate {:e}",
            run.err_estimate
        );
    }

    #[test]
    fn domain_exit_reports_a_partial_course() {
        // At angle 1.2 from (0, 0), y(x) = 2 arctan(x tan 1.2) crosses the
        // profile boundary y = 3 near x = 5.48, inside the span.
        let surface = build_surface(
            1.0,
            0.0,
            "cos(y)",
            "sin(y)",
            -3.0,
            3.0,
            Some(Interval::new(-6.5, 6.5).unwrap()),
        );
        let err = integrate_loxodrome(
            &surface,
            &spec(Family::Meridian, 1.2, (0.0, 0.0), (0.0, 6.5)),
        )
        .unwrap_err();
        match err.kind {
            FailureKind::DomainExit { u, .. } => {
                let crossing = (1.5f64).tan() / (1.2f64).tan();
                assert!((u - crossing).abs() < 0.1, "stop at u = {u}");
            }
            other => panic!("expected domain exit, got {other}"),
        }
        let last = err.partial.last().expect("partial course is non-empty");
        assert!(last.v <= 3.0);
        assert!(last.v > 2.99);
    }

    #[test]
    fn singularity_stops_the_course() {
        // Heading poleward on the twisted line surface, y decays
        // exponentially and the determinant y^2 (3 + 2 cos x) / 4 crosses
        // 1e-12 near y = 2e-6, well before the span ends.
        let surface = build_surface(
            0.0,
            0.5,
            "y",
            "0",
            1e-9,
            30.0,
            Some(Interval::new(0.0, 50.0).unwrap()),
        );
        let err = integrate_loxodrome(
            &surface,
            &LoxodromeSpec::new(
                Family::Meridian,
                PI / 4.0,
                Branch::Plus,
                (0.0, 1.0),
                Interval::new(0.0, 50.0).unwrap(),
                IntegratorConfig::default(),
            )
            .unwrap(),
        )
        .unwrap_err();
        match err.kind {
            FailureKind::SingularityHit { v, .. } => {
                assert!(v < 1e-5, "stopped at y = {v:e}");
            }
            other => panic!("expected singularity, got {other}"),
        }
        assert!(err.partial.len() > 100);
    }

    #[test]
    fn span_outside_the_surface_domain_is_a_domain_exit() {
        let surface = torus_like();
        let course = LoxodromeSpec::new(
            Family::Meridian,
            0.5,
            Branch::Minus,
            (0.0, 0.0),
            Interval::new(0.0, 20.0).unwrap(),
            IntegratorConfig::default(),
        )
        .unwrap();
        let err = integrate_loxodrome(&surface, &course).unwrap_err();
        assert!(matches!(err.kind, FailureKind::DomainExit { .. }));
        assert!(err.partial.is_empty());
    }

    #[test]
    fn polyline_invariants_are_enforced() {
        let sample = |u: f64, s: f64| Sample {
            u,
            v: 0.0,
            point: Vec3::default(),
            s,
        };
        assert!(matches!(
            Polyline::new(vec![]),
            Err(PolylineError::Empty)
        ));
        assert!(matches!(
            Polyline::new(vec![sample(0.0, 0.0), sample(0.0, 1.0)]),
            Err(PolylineError::ParameterOrder { index: 1 })
        ));
        assert!(matches!(
            Polyline::new(vec![sample(0.0, 0.0), sample(1.0, -0.5)]),
            Err(PolylineError::ArcLengthOrder { index: 1 })
        ));
        assert!(matches!(
            Polyline::new(vec![sample(0.0, 3.0)]),
            Err(PolylineError::ArcLengthOrder { index: 0 })
        ));
        assert!(Polyline::new(vec![sample(0.0, 0.0), sample(1.0, 2.0)]).is_ok());
    }

    #[test]
    fn degenerate_span_yields_a_single_sample() {
        let surface = torus_like();
        let run = integrate_loxodrome(
            &surface,
            &spec(Family::Meridian, 0.7, (1.0, 0.3), (1.0, 1.0)),
        )
        .unwrap();
        assert_eq!(run.polyline.len(), 1);
        assert_eq!(run.polyline.total_length(), 0.0);
        let field = SlopeField::plain(&surface, Family::Meridian, 0.7, Branch::Minus);
        assert_eq!(arc_length(&field, &run.polyline).unwrap(), 0.0);
    }
}
