//! Integrates the three built-in reference courses and compares endpoints
//! and arc lengths against their closed forms.

use rhumbforge::oracle::{example_fixture, ExampleId};

fn main() {
    println!(
        "{:<2}  {:>15}  {:>15}  {:>15}  {:>15}  {:<6}",
        "id", "endpoint", "closed form", "arc length", "reference", "status"
    );

    for id in ExampleId::ALL {
        let example = example_fixture(id);
        let run = example.integrate().expect("the reference course integrates");
        let curve = &run.polyline;

        let endpoint = curve.last().v;
        let closed = example.closed_form(curve.last().u);
        let arc = curve.total_length();

        let (ref_lo, ref_hi) = example.reference_endpoints();
        let ok = example.endpoint_tolerance().admits(ref_lo, curve.first().v)
            && example.endpoint_tolerance().admits(ref_hi, endpoint)
            && example
                .arc_length_tolerance()
                .admits(example.reference_arc_length(), arc);

        println!(
            "{:<2}  {:>15.9}  {:>15.9}  {:>15.9}  {:>15.9}  {:<6}",
            id.to_string(),
            endpoint,
            closed,
            arc,
            example.reference_arc_length(),
            if ok { "PASS" } else { "FAIL" },
        );
    }

    println!();
    for id in ExampleId::ALL {
        let example = example_fixture(id);
        println!("{}: {}", id, example.title());
    }
}
