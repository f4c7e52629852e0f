//! Integrates a constant-angle course across a twisted surface and prints
//! selected samples, the endpoints, and the accumulated arc length.

use rhumbforge::loxodrome::SlopeField;
use rhumbforge::{
    integrate_loxodrome, parse_expression, Branch, Family, Interval, IntegratorConfig,
    LoxodromeSpec, ProfileCurve, TwistedSurface,
};
use std::f64::consts::PI;

fn main() {
    let profile = ProfileCurve::new(
        parse_expression("y").expect("profile f parses"),
        parse_expression("0").expect("profile g parses"),
        Interval::new(1e-4, 25.0).expect("profile domain is ordered"),
    )
    .expect("the profile is regular");
    let surface = TwistedSurface::new(0.0, 0.5, profile, None).expect("the surface is regular");

    let spec = LoxodromeSpec::new(
        Family::Meridian,
        PI / 6.0,
        Branch::Minus,
        (0.0, 1.0),
        Interval::new(-2.0 * PI, 2.0 * PI).expect("span is ordered"),
        IntegratorConfig::default(),
    )
    .expect("the course specification is valid");

    let run = integrate_loxodrome(&surface, &spec).expect("the course integrates");
    let curve = &run.polyline;

    println!("course: cuts the x-coordinate curves at pi/6, from (0, 1)");
    println!(
        "samples {}   accepted steps {}   rejected steps {}   error estimate {:.3e}",
        curve.len(),
        run.steps,
        run.rejected_steps,
        run.err_estimate
    );
    println!();
    println!("{:>10}  {:>14}  {:>14}", "x", "y", "arc length");
    let stride = (curve.len() / 10).max(1);
    for (index, sample) in curve.samples().iter().enumerate() {
        if index % stride == 0 || index == curve.len() - 1 {
            println!("{:>10.6}  {:>14.9}  {:>14.9}", sample.u, sample.v, sample.s);
        }
    }

    println!();
    println!(
        "endpoints: y({:.6}) = {:.9},  y({:.6}) = {:.9}",
        curve.first().u,
        curve.first().v,
        curve.last().u,
        curve.last().v
    );
    println!("arc length: {:.9}", curve.total_length());

    // The cut angle must hold along the whole course.
    let field = SlopeField::for_spec(&surface, &spec).expect("the start point is regular");
    let mut worst: f64 = 0.0;
    for sample in curve.samples() {
        let measured = field
            .cut_angle(sample.u, sample.v)
            .expect("the cut angle is defined along the course");
        worst = worst.max((measured - spec.angle()).abs());
    }
    println!("largest cut-angle deviation: {worst:.3e}");
}
