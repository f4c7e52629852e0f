//! Builds a twisted surface and evaluates its embedding, tangent vectors,
//! and first fundamental form, checking the closed-form metric against
//! inner products of the tangents.

use rhumbforge::{parse_expression, Interval, ProfileCurve, TwistedSurface};

fn main() {
    // A line profile swept with twist rate 1/2: the surface rotates the
    // profile by half the sweep angle while revolving it.
    let profile = ProfileCurve::new(
        parse_expression("y").expect("profile f parses"),
        parse_expression("0").expect("profile g parses"),
        Interval::new(0.1, 25.0).expect("profile domain is ordered"),
    )
    .expect("the profile is regular");
    let surface = TwistedSurface::new(0.0, 0.5, profile, None).expect("the surface is regular");

    let (x, y) = (std::f64::consts::PI / 3.0, 1.5);
    let point = surface.eval_point(x, y).expect("point evaluates");
    let (tx, ty) = surface.eval_partials(x, y).expect("partials evaluate");
    let metric = surface.metric(x, y).expect("metric evaluates");

    println!("surface: a = 0, b = 1/2, f(y) = y, g(y) = 0");
    println!("at (x, y) = ({x:.6}, {y})");
    println!();
    println!("embedding     T  = ({:.9}, {:.9}, {:.9})", point.x, point.y, point.z);
    println!("tangent       Tx = ({:.9}, {:.9}, {:.9})", tx.x, tx.y, tx.z);
    println!("tangent       Ty = ({:.9}, {:.9}, {:.9})", ty.x, ty.y, ty.z);
    println!();
    println!("metric        g11 = {:.12}   (inner {:.12})", metric.g11, tx.inner(tx));
    println!("              g12 = {:.12}   (inner {:.12})", metric.g12, tx.inner(ty));
    println!("              g22 = {:.12}   (inner {:.12})", metric.g22, ty.inner(ty));
    println!("determinant   {:.12}", metric.det());

    // For this surface the closed form collapses to y^2 (3 + 2 cos x) / 4.
    let closed = y * y * (3.0 + 2.0 * x.cos()) / 4.0;
    println!("g11 closed form y^2 (3 + 2 cos x) / 4 = {closed:.12}");
}
