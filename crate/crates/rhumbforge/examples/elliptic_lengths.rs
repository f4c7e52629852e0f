//! Evaluates the incomplete elliptic integral of the second kind and uses it
//! to express a twisted-line course in closed form.

use rhumbforge::numerics::elliptic_e_incomplete;
use rhumbforge::{
    integrate_loxodrome, parse_expression, Branch, Family, Interval, IntegratorConfig,
    LoxodromeSpec, ProfileCurve, TwistedSurface,
};
use std::f64::consts::PI;

fn main() {
    println!("incomplete elliptic integral of the second kind");
    println!();
    println!("{:>10}  {:>5}  {:>20}", "amplitude", "m", "E(amplitude | m)");
    for &(amplitude, m) in &[(PI / 2.0, 0.8), (PI, 0.8), (PI / 2.0, 0.3)] {
        let value = elliptic_e_incomplete(amplitude, m).expect("parameters are in range");
        println!("{:>10.6}  {:>5}  {:>20.15}", amplitude, m, value);
    }

    // On the twisted line (a = 0, b = 1/2, f = y, g = 0) the course from
    // (0, 1) cutting meridians at phi satisfies
    //     y(x) = exp(sqrt(5) tan(phi) E(x/2 | 4/5)),
    // so the integrated trajectory should land on the elliptic closed form.
    let profile = ProfileCurve::new(
        parse_expression("y").expect("profile f parses"),
        parse_expression("0").expect("profile g parses"),
        Interval::new(1e-4, 25.0).expect("profile domain is ordered"),
    )
    .expect("the profile is regular");
    let surface = TwistedSurface::new(0.0, 0.5, profile, None).expect("the surface is regular");

    let angle = PI / 6.0;
    let scale = 5.0f64.sqrt() * angle.tan();

    println!();
    println!("twisted-line course against its elliptic closed form");
    println!();
    println!(
        "{:>8}  {:>16}  {:>16}  {:>12}",
        "x", "integrated y", "closed form", "difference"
    );
    for &x in &[PI / 2.0, PI, 3.0 * PI / 2.0, 2.0 * PI] {
        let spec = LoxodromeSpec::new(
            Family::Meridian,
            angle,
            Branch::Minus,
            (0.0, 1.0),
            Interval::new(0.0, x).expect("span is ordered"),
            IntegratorConfig::default(),
        )
        .expect("the course specification is valid");
        let run = integrate_loxodrome(&surface, &spec).expect("the course integrates");
        let y = run.polyline.last().v;

        let e = elliptic_e_incomplete(x / 2.0, 0.8).expect("parameters are in range");
        let closed = (scale * e).exp();
        println!(
            "{:>8.5}  {:>16.9}  {:>16.9}  {:>12.3e}",
            x,
            y,
            closed,
            (y - closed).abs()
        );
    }
}
