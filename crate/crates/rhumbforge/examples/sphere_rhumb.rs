//! Traces the classical rhumb line on a sphere and checks it against the
//! Mercator closed form: along a course cutting the rings of latitude at a
//! constant angle, ln(sec y + tan y) grows linearly in longitude.

use rhumbforge::{
    integrate_loxodrome, parse_expression, Branch, Family, Interval, IntegratorConfig,
    LoxodromeSpec, ProfileCurve, TwistedSurface,
};
use std::f64::consts::PI;

fn main() {
    // The unit sphere as an untwisted surface: profile (cos y, sin y).
    let profile = ProfileCurve::new(
        parse_expression("cos(y)").expect("profile f parses"),
        parse_expression("sin(y)").expect("profile g parses"),
        Interval::new(-1.45, 1.45).expect("profile domain is ordered"),
    )
    .expect("the profile is regular");
    let surface = TwistedSurface::new(0.0, 0.0, profile, None).expect("the surface is regular");

    let angle = PI / 4.0;
    let spec = LoxodromeSpec::new(
        Family::Meridian,
        angle,
        Branch::Minus,
        (0.0, 0.0),
        Interval::new(0.0, 2.5).expect("span is ordered"),
        IntegratorConfig::default(),
    )
    .expect("the course specification is valid");

    let run = integrate_loxodrome(&surface, &spec).expect("the course integrates");
    let curve = &run.polyline;

    println!("rhumb line on the unit sphere, cutting latitude rings at pi/4");
    println!();
    println!(
        "{:>8}  {:>14}  {:>14}  {:>12}",
        "x", "latitude y", "gd(x tan)", "difference"
    );

    // Inverting ln(sec y + tan y) = x tan(angle) gives the Gudermannian.
    let stride = (curve.len() / 12).max(1);
    let mut worst: f64 = 0.0;
    for (index, sample) in curve.samples().iter().enumerate() {
        let closed = (sample.u * angle.tan()).sinh().atan();
        worst = worst.max((sample.v - closed).abs());
        if index % stride == 0 || index == curve.len() - 1 {
            println!(
                "{:>8.4}  {:>14.9}  {:>14.9}  {:>12.3e}",
                sample.u,
                sample.v,
                closed,
                (sample.v - closed).abs()
            );
        }
    }
    println!();
    println!("largest deviation from the Mercator closed form: {worst:.3e}");

    // The run ends just short of the pole singularity; the arc length of a
    // full pole-to-pole rhumb at angle phi is pi / cos(phi).
    println!("arc length over the span: {:.9}", curve.total_length());
}
