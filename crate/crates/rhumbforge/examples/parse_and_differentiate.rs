//! Parses a profile expression, differentiates it symbolically, and checks
//! the derivative against central differences at a few points.

use rhumbforge::expr::{differentiate, evaluate};
use rhumbforge::parse_expression;

fn main() {
    let text = "y^2 * sin(y) + ln(1 + y)";
    let expr = parse_expression(text).expect("the expression is well-formed");
    let derivative = differentiate(&expr);

    println!("expression:  {expr}");
    println!("derivative:  {derivative}");
    println!();
    println!("{:>5}  {:>18}  {:>18}  {:>12}", "y", "symbolic", "central diff", "difference");

    let h = 1e-6;
    for &y in &[0.25, 0.75, 1.5, 2.5] {
        let sym = evaluate(&derivative, y).expect("derivative evaluates");
        let hi = evaluate(&expr, y + h).expect("expression evaluates");
        let lo = evaluate(&expr, y - h).expect("expression evaluates");
        let fd = (hi - lo) / (2.0 * h);
        println!("{y:>5.2}  {sym:>18.12}  {fd:>18.12}  {:>12.3e}", (sym - fd).abs());
    }
}
