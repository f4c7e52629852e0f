//! End-to-end acceptance checks, one test per shipping criterion.
//!
//! Each test prints a single `criterion N ...: PASS/FAIL (detail)` line
//! before asserting, so `cargo test --test acceptance -- --nocapture` gives a
//! one-screen scoreboard of the whole suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhumbforge::expr::{differentiate, evaluate, parse_expression, Interval};
use rhumbforge::loxodrome::{
    meridian_slope, parallel_slope, Branch, Family, LoxodromeSpec, SlopeField,
};
use rhumbforge::numerics::{elliptic_e_incomplete, integrate_loxodrome, IntegratorConfig};
use rhumbforge::oracle::{example_fixture, surface_catalog, ExampleId};
use rhumbforge::surface::TwistedSurface;
use std::f64::consts::PI;
use std::time::Instant;

fn conclude(number: u8, name: &str, pass: bool, detail: String) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number} {name}: {status} ({detail})");
    assert!(pass, "criterion {number} {name}: {detail}");
}

/// Fixed-depth adaptive Simpson over a total integrand, independent of the
/// library's quadrature code so it can serve as an oracle for it.
fn simpson_oracle(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rule(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(mid) + f(b))
    }
    fn split(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let mid = 0.5 * (a + b);
        let left = rule(f, a, mid);
        let right = rule(f, mid, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        split(f, a, mid, left, 0.5 * tol, depth - 1)
            + split(f, mid, b, right, 0.5 * tol, depth - 1)
    }
    split(f, a, b, rule(f, a, b), tol, 48)
}

struct CourseReport {
    lo_v: f64,
    hi_v: f64,
    arc: f64,
    elapsed_s: f64,
}

fn run_reference_course(id: ExampleId) -> CourseReport {
    let example = example_fixture(id);
    let clock = Instant::now();
    let run = example.integrate().expect("reference courses integrate");
    let arc = run.polyline.total_length();
    let elapsed_s = clock.elapsed().as_secs_f64();
    CourseReport {
        lo_v: run.polyline.first().v,
        hi_v: run.polyline.last().v,
        arc,
        elapsed_s,
    }
}

#[test]
fn criterion_01_twisted_line_course_reproduces_reference_values() {
    let example = example_fixture(ExampleId::One);
    let report = run_reference_course(ExampleId::One);
    let (lo_ref, hi_ref) = example.reference_endpoints();
    let endpoints_ok = example.endpoint_tolerance().admits(hi_ref, report.hi_v)
        && example.endpoint_tolerance().admits(lo_ref, report.lo_v);
    let arc_ok = example
        .arc_length_tolerance()
        .admits(example.reference_arc_length(), report.arc);
    let fast = report.elapsed_s < 1.0;
    conclude(
        1,
        "twisted line course",
        endpoints_ok && arc_ok && fast,
        format!(
            "end {:.6} vs {hi_ref}, arc {:.6} vs {}, {:.3}s",
            report.hi_v,
            report.arc,
            example.reference_arc_length(),
            report.elapsed_s
        ),
    );
}

#[test]
fn criterion_02_torus_course_reproduces_reference_values() {
    let example = example_fixture(ExampleId::Two);
    let report = run_reference_course(ExampleId::Two);
    let (lo_ref, hi_ref) = example.reference_endpoints();
    let endpoints_ok = example.endpoint_tolerance().admits(hi_ref, report.hi_v)
        && example.endpoint_tolerance().admits(lo_ref, report.lo_v);
    let arc_ok = example
        .arc_length_tolerance()
        .admits(example.reference_arc_length(), report.arc);
    let fast = report.elapsed_s < 1.0;
    conclude(
        2,
        "torus course",
        endpoints_ok && arc_ok && fast,
        format!(
            "ends {:.6}/{:.6} vs {lo_ref}/{hi_ref}, arc {:.6} vs {}, {:.3}s",
            report.lo_v,
            report.hi_v,
            report.arc,
            example.reference_arc_length(),
            report.elapsed_s
        ),
    );
}

#[test]
fn criterion_03_lobed_course_reproduces_reference_values() {
    let example = example_fixture(ExampleId::Three);
    let report = run_reference_course(ExampleId::Three);
    let (lo_ref, hi_ref) = example.reference_endpoints();
    let endpoints_ok = example.endpoint_tolerance().admits(lo_ref, report.lo_v)
        && example.endpoint_tolerance().admits(hi_ref, report.hi_v);
    let arc_ok = example
        .arc_length_tolerance()
        .admits(example.reference_arc_length(), report.arc);
    let fast = report.elapsed_s < 1.0;
    conclude(
        3,
        "lobed revolution course",
        endpoints_ok && arc_ok && fast,
        format!(
            "ends {:.6}/{:.6} vs {lo_ref}/{hi_ref}, arc {:.6} vs {}, {:.3}s",
            report.lo_v,
            report.hi_v,
            report.arc,
            example.reference_arc_length(),
            report.elapsed_s
        ),
    );
}

#[test]
fn criterion_04_integrated_courses_track_their_closed_forms() {
    let mut pass = true;
    let mut details = Vec::new();
    for id in ExampleId::ALL {
        let example = example_fixture(id);
        let run = example.integrate().expect("reference courses integrate");
        let relative = id == ExampleId::One;
        let tol = if relative { 1e-6 } else { 1e-8 };
        let mut worst: f64 = 0.0;
        for sample in run.polyline.samples() {
            let closed = example.closed_form(sample.u);
            let error = if relative {
                (sample.v - closed).abs() / closed.abs()
            } else {
                (sample.v - closed).abs()
            };
            worst = worst.max(error);
        }
        pass &= worst <= tol;
        let kind = if relative { "rel" } else { "abs" };
        details.push(format!("{id}: {worst:.2e} {kind} vs {tol:.0e}"));
    }
    conclude(4, "closed-form tracking", pass, details.join(", "));
}

#[test]
fn criterion_05_cut_angle_stays_constant_along_random_courses() {
    let catalog = surface_catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut passed = 0usize;
    let mut attempts = 0usize;
    let mut violations = 0usize;
    let mut worst: f64 = 0.0;

    while passed < 25 && attempts < 400 {
        attempts += 1;
        let (_, surface) = &catalog[rng.random_range(0..catalog.len())];
        let family = if rng.random_bool(0.5) {
            Family::Meridian
        } else {
            Family::Parallel
        };
        let branch = if rng.random_bool(0.5) {
            Branch::Plus
        } else {
            Branch::Minus
        };
        let angle = loop {
            let candidate = rng.random_range(0.15..PI - 0.15);
            if (candidate - PI / 2.0).abs() > 0.15 {
                break candidate;
            }
        };
        let (u_domain, v_domain) = match family {
            Family::Meridian => (surface.x_domain(), surface.y_domain()),
            Family::Parallel => (surface.y_domain(), surface.x_domain()),
        };
        let u0 = u_domain.lerp(rng.random_range(0.3..0.7));
        let v0 = v_domain.lerp(rng.random_range(0.3..0.7));
        let half = 0.5 * rng.random_range(0.05..0.25) * u_domain.length();
        let lo = (u0 - half).max(u_domain.lerp(0.01));
        let hi = (u0 + half).min(u_domain.lerp(0.99));
        if hi <= lo {
            continue;
        }
        let start = match family {
            Family::Meridian => (u0, v0),
            Family::Parallel => (v0, u0),
        };
        let span = Interval::new(lo, hi).expect("clipped span is ordered");
        let spec = match LoxodromeSpec::new(
            family,
            angle,
            branch,
            start,
            span,
            IntegratorConfig::default(),
        ) {
            Ok(spec) => spec,
            Err(_) => continue,
        };
        let run = match integrate_loxodrome(surface, &spec) {
            Ok(run) => run,
            Err(_) => continue,
        };
        let field = SlopeField::for_spec(surface, &spec).expect("integrated spec has a field");

        // The course tangent is oriented by increasing parameter, so the
        // measured angle may be the supplement of the requested one; folding
        // on the cosine accepts both.
        let cos_requested = angle.cos();
        let mut case_worst: f64 = 0.0;
        for sample in run.polyline.samples() {
            let measured = match field.cut_angle(sample.u, sample.v) {
                Ok(theta) => theta,
                Err(_) => continue,
            };
            let deviation = (measured.cos() - cos_requested)
                .abs()
                .min((measured.cos() + cos_requested).abs());
            case_worst = case_worst.max(deviation);
        }
        worst = worst.max(case_worst);
        if case_worst <= 1e-6 {
            passed += 1;
        } else {
            violations += 1;
        }
    }

    conclude(
        5,
        "angle constancy",
        violations == 0 && passed == 25,
        format!("{passed}/25 cases in {attempts} attempts, worst cos deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_06_metric_matches_inner_products_and_finite_differences() {
    let catalog = surface_catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst_inner: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    let h = 1e-6;

    for (_, surface) in &catalog {
        for _ in 0..100 {
            let x = surface.x_domain().lerp(rng.random_range(0.02..0.98));
            let y = surface.y_domain().lerp(rng.random_range(0.02..0.98));
            let g = surface.metric(x, y).expect("catalog surfaces evaluate");
            let (tx, ty) = surface
                .eval_partials(x, y)
                .expect("catalog surfaces evaluate");

            let inner_error = (g.g11 - tx.inner(tx))
                .abs()
                .max((g.g12 - tx.inner(ty)).abs())
                .max((g.g22 - ty.inner(ty)).abs());
            worst_inner = worst_inner.max(inner_error);

            let tx_fd = (surface.eval_point(x + h, y).unwrap()
                - surface.eval_point(x - h, y).unwrap())
                * (0.5 / h);
            let ty_fd = (surface.eval_point(x, y + h).unwrap()
                - surface.eval_point(x, y - h).unwrap())
                * (0.5 / h);
            let scale = g.g11.abs().max(g.g22.abs()).max(1.0);
            let fd_error = (g.g11 - tx_fd.inner(tx_fd))
                .abs()
                .max((g.g12 - tx_fd.inner(ty_fd)).abs())
                .max((g.g22 - ty_fd.inner(ty_fd)).abs())
                / scale;
            worst_fd = worst_fd.max(fd_error);
        }
    }

    conclude(
        6,
        "metric equivalence",
        worst_inner <= 1e-9 && worst_fd <= 1e-5,
        format!("inner products {worst_inner:.2e} vs 1e-9, finite differences {worst_fd:.2e} vs 1e-5"),
    );
}

fn slope_quadratic_residual(
    surface: &TwistedSurface,
    family: Family,
    x: f64,
    y: f64,
    angle: f64,
    m: f64,
) -> f64 {
    let g = surface.metric(x, y).expect("sampled points evaluate");
    let sin_sq = angle.sin().powi(2);
    let cos_sq = angle.cos().powi(2);
    let lead = match family {
        Family::Meridian => g.g11,
        Family::Parallel => g.g22,
    };
    let aa = g.g12 * g.g12 - g.g11 * g.g22 * cos_sq;
    let bb = 2.0 * lead * g.g12 * sin_sq;
    let cc = lead * lead * sin_sq;
    let residual = aa * m * m + bb * m + cc;
    let scale = (aa * m * m)
        .abs()
        .max((bb * m).abs())
        .max(cc.abs())
        .max(1e-300);
    (residual / scale).abs()
}

#[test]
fn criterion_07_slopes_satisfy_their_quadratics_at_random_samples() {
    let catalog = surface_catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut sampled = 0usize;
    let mut attempts = 0usize;
    let mut worst: f64 = 0.0;

    while sampled < 1000 && attempts < 3000 {
        attempts += 1;
        let (_, surface) = &catalog[rng.random_range(0..catalog.len())];
        let x = surface.x_domain().lerp(rng.random_range(0.02..0.98));
        let y = surface.y_domain().lerp(rng.random_range(0.02..0.98));
        let angle = rng.random_range(0.05..PI - 0.05);
        let branch = if rng.random_bool(0.5) {
            Branch::Plus
        } else {
            Branch::Minus
        };
        let (family, slope) = if rng.random_bool(0.5) {
            (Family::Meridian, meridian_slope(surface, x, y, angle, branch))
        } else {
            (Family::Parallel, parallel_slope(surface, x, y, angle, branch))
        };
        let m = match slope {
            Ok(m) => m,
            Err(_) => continue,
        };
        sampled += 1;
        worst = worst.max(slope_quadratic_residual(surface, family, x, y, angle, m));
    }

    conclude(
        7,
        "slope root residuals",
        sampled == 1000 && worst <= 1e-9,
        format!("{sampled} samples, worst residual {worst:.2e} vs 1e-9"),
    );
}

#[test]
fn criterion_08_untwisted_surfaces_reduce_and_sphere_follows_mercator() {
    let catalog = surface_catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(19);

    // Zero twist rate forces g12 to vanish identically, and the meridian
    // slope collapses to sqrt(g11/g22) tan(angle) with the branch choosing
    // the sign.
    let mut untwisted = 0usize;
    let mut g12_exact = true;
    let mut worst_slope: f64 = 0.0;
    for (_, surface) in &catalog {
        if surface.b() != 0.0 {
            continue;
        }
        untwisted += 1;
        for _ in 0..100 {
            let x = surface.x_domain().lerp(rng.random_range(0.02..0.98));
            let y = surface.y_domain().lerp(rng.random_range(0.02..0.98));
            let g = surface.metric(x, y).expect("catalog surfaces evaluate");
            g12_exact &= g.g12 == 0.0;

            let angle = loop {
                let candidate = rng.random_range(0.1..PI - 0.1);
                if (candidate - PI / 2.0).abs() > 0.05 {
                    break candidate;
                }
            };
            let target = (g.g11 / g.g22).sqrt() * angle.tan();
            let minus = meridian_slope(surface, x, y, angle, Branch::Minus)
                .expect("away from pi/2 the denominator is regular");
            let plus = meridian_slope(surface, x, y, angle, Branch::Plus)
                .expect("away from pi/2 the denominator is regular");
            let scale = target.abs().max(1e-300);
            worst_slope = worst_slope
                .max((minus - target).abs() / scale)
                .max((plus + target).abs() / scale);
        }
    }

    // On the unit sphere the course from the equator satisfies the Mercator
    // relation ln(sec y + tan y) = x tan(angle); the independent oracle
    // integrates sec over the latitude leg by quadrature.
    let sphere = catalog
        .iter()
        .find(|(name, _)| *name == "sphere")
        .map(|(_, surface)| surface)
        .expect("catalog contains the sphere");
    let angle = PI / 4.0;
    let spec = LoxodromeSpec::new(
        Family::Meridian,
        angle,
        Branch::Minus,
        (0.0, 0.0),
        Interval::new(0.0, 2.5).expect("ordered"),
        IntegratorConfig::default(),
    )
    .expect("sphere course specification is valid");
    let run = integrate_loxodrome(sphere, &spec).expect("sphere course integrates");
    let mut worst_mercator: f64 = 0.0;
    for sample in run.polyline.samples() {
        let lhs = (1.0 / sample.v.cos() + sample.v.tan()).ln();
        worst_mercator = worst_mercator.max((lhs - sample.u * angle.tan()).abs());
    }
    let end = run.polyline.last();
    let quadrature_x =
        simpson_oracle(&|t: f64| 1.0 / t.cos(), 0.0, end.v, 1e-13) / angle.tan();
    let oracle_gap = (quadrature_x - end.u).abs();

    conclude(
        8,
        "zero-twist reduction",
        untwisted >= 4
            && g12_exact
            && worst_slope <= 1e-12
            && worst_mercator <= 1e-7
            && oracle_gap <= 1e-7,
        format!(
            "{untwisted} surfaces, g12 exact {g12_exact}, slope {worst_slope:.2e} vs 1e-12, \
             relation {worst_mercator:.2e} and quadrature {oracle_gap:.2e} vs 1e-7"
        ),
    );
}

#[test]
fn criterion_09_elliptic_integral_matches_quadrature_and_doubles() {
    let integrand = |m: f64| move |t: f64| (1.0 - m * t.sin().powi(2)).sqrt();
    let oracle = simpson_oracle(&integrand(0.8), 0.0, PI / 2.0, 1e-13);
    let quarter = elliptic_e_incomplete(PI / 2.0, 0.8).expect("parameters are in range");
    let oracle_gap = (quarter - oracle).abs();

    let mut worst_doubling: f64 = 0.0;
    for &m in &[0.0, 0.3, 0.8] {
        let half = elliptic_e_incomplete(PI, m).expect("parameters are in range");
        let quarter = elliptic_e_incomplete(PI / 2.0, m).expect("parameters are in range");
        worst_doubling = worst_doubling.max((half - 2.0 * quarter).abs());
    }

    conclude(
        9,
        "elliptic integral",
        oracle_gap <= 1e-10 && worst_doubling <= 1e-12,
        format!(
            "quadrature gap {oracle_gap:.2e} vs 1e-10, doubling {worst_doubling:.2e} vs 1e-12"
        ),
    );
}

fn random_expression(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 {
        return match rng.random_range(0..3) {
            0 => format!("{:.3}", rng.random_range(0.2..3.0)),
            1 => "y".to_string(),
            _ => format!("{:.2}*y", rng.random_range(0.3..2.5)),
        };
    }
    let a = random_expression(rng, depth - 1);
    match rng.random_range(0..9) {
        0 => format!("({a}+{})", random_expression(rng, depth - 1)),
        1 => format!("({a}-{})", random_expression(rng, depth - 1)),
        2 => format!("({a}*{})", random_expression(rng, depth - 1)),
        3 => format!("({a}/(1+({})^2))", random_expression(rng, depth - 1)),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(-({a})^2)"),
        7 => format!("ln(1+({a})^2)"),
        _ => format!("sqrt(1+({a})^2)"),
    }
}

#[test]
fn criterion_10_generated_expression_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let points = [0.45, 0.9, 1.8];
    let stencils = [1e-6, 2.5e-7, 6.25e-8];
    let mut passed = 0usize;
    let mut attempts = 0usize;
    let mut worst: f64 = 0.0;

    'expressions: while passed < 100 && attempts < 400 {
        attempts += 1;
        let text = random_expression(&mut rng, 3);
        let expr = parse_expression(&text).expect("generated expressions parse");
        let derivative = differentiate(&expr);

        let mut eligible_points = 0usize;
        for &y in &points {
            let symbolic = match evaluate(&derivative, y) {
                Ok(value) if value.is_finite() => value,
                _ => continue,
            };

            let mut fds = [0.0f64; 3];
            let mut magnitude: f64 = 0.0;
            let mut usable = true;
            for (slot, &h) in fds.iter_mut().zip(&stencils) {
                let hi = evaluate(&expr, y + h);
                let lo = evaluate(&expr, y - h);
                match (hi, lo) {
                    (Ok(hi), Ok(lo)) if hi.is_finite() && lo.is_finite() => {
                        *slot = (hi - lo) / (2.0 * h);
                        magnitude = magnitude.max(hi.abs()).max(lo.abs());
                    }
                    _ => {
                        usable = false;
                        break;
                    }
                }
            }
            if !usable {
                continue;
            }

            // Difference quotients carry rounding noise proportional to the
            // function magnitude over the step; a point where that noise
            // rivals the tolerance cannot distinguish right from wrong.
            let stencil_scale = 1.0 + fds.iter().fold(0.0f64, |acc, fd| acc.max(fd.abs()));
            let noise = f64::EPSILON * magnitude / (2.0 * stencils[0]);
            if noise > 1e-7 * stencil_scale {
                continue;
            }
            if (fds[0] - fds[1]).abs() > 1e-6 * stencil_scale
                || (fds[1] - fds[2]).abs() > 1e-6 * stencil_scale
            {
                continue;
            }

            eligible_points += 1;
            let scale = 1.0 + symbolic.abs().max(fds[0].abs());
            let error = (symbolic - fds[0]).abs() / scale;
            worst = worst.max(error);
            if error > 1e-5 {
                conclude(
                    10,
                    "expression derivatives",
                    false,
                    format!("{text} at y = {y}: symbolic {symbolic} vs difference {}", fds[0]),
                );
                continue 'expressions;
            }
        }
        if eligible_points > 0 {
            passed += 1;
        }
    }

    conclude(
        10,
        "expression derivatives",
        passed == 100,
        format!("{passed}/100 expressions in {attempts} attempts, worst error {worst:.2e}"),
    );
}
