//! Exports a torus mesh as Wavefront OBJ and a course as CSV, then reads
//! the CSV back and confirms the round trip.

use rhumbforge::io::{export_curve, export_surface_mesh, load_curve_csv, CurveFormat};
use rhumbforge::{
    integrate_loxodrome, parse_expression, Branch, Family, Interval, IntegratorConfig,
    LoxodromeSpec, ProfileCurve, TwistedSurface,
};
use std::f64::consts::PI;

fn main() {
    let profile = ProfileCurve::new(
        parse_expression("cos(y)").expect("profile f parses"),
        parse_expression("sin(y)").expect("profile g parses"),
        Interval::new(-3.0, 3.0).expect("profile domain is ordered"),
    )
    .expect("the profile is regular");
    let surface = TwistedSurface::new(1.0, 0.0, profile, None).expect("the surface is regular");

    let dir = std::env::temp_dir();
    let mesh_path = dir.join("rhumbforge_torus.obj");
    let curve_path = dir.join("rhumbforge_course.csv");

    export_surface_mesh(&surface, 48, 48, &mesh_path).expect("the mesh exports");
    let mesh = std::fs::read_to_string(&mesh_path).expect("the mesh file reads back");
    println!("mesh:  {}", mesh_path.display());
    println!(
        "       {} vertices, {} faces",
        mesh.lines().filter(|line| line.starts_with("v ")).count(),
        mesh.lines().filter(|line| line.starts_with("f ")).count(),
    );

    let spec = LoxodromeSpec::new(
        Family::Meridian,
        PI / 4.0,
        Branch::Minus,
        (0.0, 0.0),
        Interval::new(-PI, PI).expect("span is ordered"),
        IntegratorConfig::default(),
    )
    .expect("the course specification is valid");
    let run = integrate_loxodrome(&surface, &spec).expect("the course integrates");

    export_curve(&run.polyline, &curve_path, CurveFormat::Csv).expect("the curve exports");
    println!("curve: {}", curve_path.display());
    println!("       {} samples", run.polyline.len());

    let reread = load_curve_csv(&curve_path).expect("the curve file reads back");
    let stored = run.polyline.total_length();
    let reread_length = reread.total_length();
    println!();
    println!("arc length before export: {stored:.9}");
    println!("arc length after re-read: {reread_length:.9}");
    println!("round-trip difference:    {:.3e}", (stored - reread_length).abs());
}
