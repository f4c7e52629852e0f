//! Recovers a course angle from a target endpoint by bisection: given where
//! a course ends up, find the constant angle that steers it there.

use rhumbforge::loxodrome::solve_course;
use rhumbforge::numerics::elliptic_e_incomplete;
use rhumbforge::{
    parse_expression, Branch, Family, Interval, IntegratorConfig, ProfileCurve, TwistedSurface,
};
use std::f64::consts::PI;

fn main() {
    // The domain ceiling leaves room for the steep end of the bracket below:
    // at angle 0.62 the course climbs to y(2 pi) near 43.
    let profile = ProfileCurve::new(
        parse_expression("y").expect("profile f parses"),
        parse_expression("0").expect("profile g parses"),
        Interval::new(1e-4, 60.0).expect("profile domain is ordered"),
    )
    .expect("the profile is regular");
    let surface = TwistedSurface::new(0.0, 0.5, profile, None).expect("the surface is regular");

    // A course from (0, 1) cutting at angle phi ends at
    // y(2 pi) = exp(sqrt(5) tan(phi) E(pi | 4/5)). Build the target from the
    // known angle pi/6, then ask the solver to find that angle back.
    let e = elliptic_e_incomplete(PI, 0.8).expect("the elliptic integral converges");
    let target = (5.0f64.sqrt() * (PI / 6.0).tan() * e).exp();
    println!("target endpoint y(2 pi) = {target:.12}");

    let angle = solve_course(
        &surface,
        Family::Meridian,
        (0.0, 1.0),
        Interval::new(0.0, 2.0 * PI).expect("span is ordered"),
        target,
        Branch::Minus,
        (0.45, 0.62),
        &IntegratorConfig::default(),
    )
    .expect("an angle in the bracket reaches the target");

    println!("solved angle:    {angle:.12}");
    println!("expected pi/6:   {:.12}", PI / 6.0);
    println!("difference:      {:.3e}", (angle - PI / 6.0).abs());
}
