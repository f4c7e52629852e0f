//! Profile expressions in one variable.
//!
//! Profiles are written in a small language over the variable `y` (grammar in
//! [`parser`]). The module provides parsing, exact symbolic differentiation,
//! evaluation with explicit domain errors, and [`ProfileCurve`], the pair
//! `(f, g)` restricted to a closed interval and checked for regularity.

mod parser;

pub use parser::parse_expression;

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Builtin unary functions, plus negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryFn {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Neg,
}

impl UnaryFn {
    fn name(self) -> &'static str {
        match self {
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Tan => "tan",
            UnaryFn::Exp => "exp",
            UnaryFn::Ln => "ln",
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Neg => "-",
        }
    }
}

/// Binary arithmetic operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression tree over the variable `y`.
///
/// Trees compare structurally; no simplification is ever applied, so
/// derivatives keep their textbook shape (`d(u*v) = u'*v + u*v'` and so on).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Numeric literal (also produced by `pi` and `e`).
    Const(f64),
    /// The variable `y`.
    Var,
    Unary(UnaryFn, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unknown identifier '{name}' at byte {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

/// Evaluation failure.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    /// A builtin was applied outside its domain (`ln` of a non-positive
    /// value, `sqrt` of a negative value, `tan` within one ulp of a pole).
    #[error("{func}({arg}) is outside the function's domain")]
    Domain { func: &'static str, arg: f64 },
    /// Arithmetic produced an infinity or NaN (division by zero, overflow,
    /// fractional power of a negative base).
    #[error("evaluation produced a non-finite value")]
    NonFinite,
    /// The profile was evaluated outside its declared interval.
    #[error("y = {y} lies outside the profile domain [{lo}, {hi}]")]
    OutOfDomain { y: f64, lo: f64, hi: f64 },
}

/// Evaluates `expr` at `y`.
///
/// Every intermediate value is required to be finite; domain violations and
/// non-finite arithmetic are reported as errors rather than propagated as
/// NaN.
pub fn evaluate(expr: &Expr, y: f64) -> Result<f64, EvalError> {
    let value = match expr {
        Expr::Const(c) => *c,
        Expr::Var => y,
        Expr::Unary(func, arg) => {
            let a = evaluate(arg, y)?;
            match func {
                UnaryFn::Sin => a.sin(),
                UnaryFn::Cos => a.cos(),
                UnaryFn::Tan => {
                    let t = a.tan();
                    if !t.is_finite() || t.abs() > 1.0 / f64::EPSILON {
                        return Err(EvalError::Domain { func: "tan", arg: a });
                    }
                    t
                }
                UnaryFn::Exp => a.exp(),
                UnaryFn::Ln => {
                    if a <= 0.0 {
                        return Err(EvalError::Domain { func: "ln", arg: a });
                    }
                    a.ln()
                }
                UnaryFn::Sqrt => {
                    if a < 0.0 {
                        return Err(EvalError::Domain { func: "sqrt", arg: a });
                    }
                    a.sqrt()
                }
                UnaryFn::Neg => -a,
            }
        }
        Expr::Binary(op, lhs, rhs) => {
            let l = evaluate(lhs, y)?;
            let r = evaluate(rhs, y)?;
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => l / r,
                BinOp::Pow => l.powf(r),
            }
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::NonFinite)
    }
}

/// Returns the exact symbolic derivative of `expr` with respect to `y`.
///
/// Constant exponents use the power rule; a variable exponent `u^v` is
/// differentiated through the rewrite `exp(v * ln(u))`, so evaluating such a
/// derivative requires `u > 0`. The result is left unsimplified.
pub fn differentiate(expr: &Expr) -> Expr {
    match expr {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var => Expr::Const(1.0),
        Expr::Unary(func, arg) => {
            let da = differentiate(arg);
            match func {
                UnaryFn::Sin => mul(Expr::Unary(UnaryFn::Cos, arg.clone()), da),
                UnaryFn::Cos => mul(
                    Expr::Unary(
                        UnaryFn::Neg,
                        Box::new(Expr::Unary(UnaryFn::Sin, arg.clone())),
                    ),
                    da,
                ),
                UnaryFn::Tan => div(
                    da,
                    Expr::Binary(
                        BinOp::Pow,
                        Box::new(Expr::Unary(UnaryFn::Cos, arg.clone())),
                        Box::new(Expr::Const(2.0)),
                    ),
                ),
                UnaryFn::Exp => mul(Expr::Unary(UnaryFn::Exp, arg.clone()), da),
                UnaryFn::Ln => div(da, arg.as_ref().clone()),
                UnaryFn::Sqrt => div(
                    da,
                    mul(Expr::Const(2.0), Expr::Unary(UnaryFn::Sqrt, arg.clone())),
                ),
                UnaryFn::Neg => Expr::Unary(UnaryFn::Neg, Box::new(da)),
            }
        }
        Expr::Binary(op, lhs, rhs) => {
            let u = lhs.as_ref();
            let v = rhs.as_ref();
            match op {
                BinOp::Add => add(differentiate(u), differentiate(v)),
                BinOp::Sub => sub(differentiate(u), differentiate(v)),
                BinOp::Mul => add(
                    mul(differentiate(u), v.clone()),
                    mul(u.clone(), differentiate(v)),
                ),
                BinOp::Div => div(
                    sub(
                        mul(differentiate(u), v.clone()),
                        mul(u.clone(), differentiate(v)),
                    ),
                    Expr::Binary(
                        BinOp::Pow,
                        Box::new(v.clone()),
                        Box::new(Expr::Const(2.0)),
                    ),
                ),
                BinOp::Pow => {
                    if depends_on_var(v) {
                        let rewritten = Expr::Unary(
                            UnaryFn::Exp,
                            Box::new(mul(
                                v.clone(),
                                Expr::Unary(UnaryFn::Ln, Box::new(u.clone())),
                            )),
                        );
                        differentiate(&rewritten)
                    } else {
                        mul(
                            mul(
                                v.clone(),
                                Expr::Binary(
                                    BinOp::Pow,
                                    Box::new(u.clone()),
                                    Box::new(sub(v.clone(), Expr::Const(1.0))),
                                ),
                            ),
                            differentiate(u),
                        )
                    }
                }
            }
        }
    }
}

/// Reports whether `expr` references the variable `y` anywhere.
pub fn depends_on_var(expr: &Expr) -> bool {
    match expr {
        Expr::Const(_) => false,
        Expr::Var => true,
        Expr::Unary(_, arg) => depends_on_var(arg),
        Expr::Binary(_, lhs, rhs) => depends_on_var(lhs) || depends_on_var(rhs),
    }
}

fn add(l: Expr, r: Expr) -> Expr {
    Expr::Binary(BinOp::Add, Box::new(l), Box::new(r))
}

fn sub(l: Expr, r: Expr) -> Expr {
    Expr::Binary(BinOp::Sub, Box::new(l), Box::new(r))
}

fn mul(l: Expr, r: Expr) -> Expr {
    Expr::Binary(BinOp::Mul, Box::new(l), Box::new(r))
}

fn div(l: Expr, r: Expr) -> Expr {
    Expr::Binary(BinOp::Div, Box::new(l), Box::new(r))
}

// Precedence levels used by the printer, loosest to tightest: additive 0,
// multiplicative 1, unary minus 2, power 3, atoms 4.
fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Const(_) | Expr::Var => 4,
        Expr::Unary(UnaryFn::Neg, _) => 2,
        Expr::Unary(..) => 4,
        Expr::Binary(BinOp::Pow, ..) => 3,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 1,
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 0,
    }
}

impl fmt::Display for Expr {
    /// Prints with the fewest parentheses that still reparse to the same
    /// tree. Negative or non-finite [`Expr::Const`] values have no literal
    /// form in the grammar, so only trees whose constants are non-negative
    /// and finite (which includes everything the parser produces) round-trip.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, out, 0, false)
    }
}

fn write_expr(
    expr: &Expr,
    out: &mut fmt::Formatter<'_>,
    min_prec: u8,
    right_of_binary: bool,
) -> fmt::Result {
    let needs_parens = precedence(expr) < min_prec
        || (right_of_binary && matches!(expr, Expr::Unary(UnaryFn::Neg, _)));
    if needs_parens {
        write!(out, "(")?;
        write_expr(expr, out, 0, false)?;
        return write!(out, ")");
    }
    match expr {
        Expr::Const(c) => write!(out, "{c}"),
        Expr::Var => write!(out, "y"),
        Expr::Unary(UnaryFn::Neg, arg) => {
            // The grammar allows a single leading minus per factor, so a
            // nested negation or a looser-binding child is parenthesized.
            write!(out, "-")?;
            write_expr(arg, out, 3, false)
        }
        Expr::Unary(func, arg) => {
            write!(out, "{}(", func.name())?;
            write_expr(arg, out, 0, false)?;
            write!(out, ")")
        }
        Expr::Binary(op, lhs, rhs) => {
            let (symbol, left_min, right_min) = match op {
                BinOp::Add => ("+", 0, 1),
                BinOp::Sub => ("-", 0, 1),
                BinOp::Mul => ("*", 1, 2),
                BinOp::Div => ("/", 1, 2),
                BinOp::Pow => ("^", 4, 2),
            };
            write_expr(lhs, out, left_min, false)?;
            write!(out, "{symbol}")?;
            write_expr(rhs, out, right_min, true)
        }
    }
}

/// Closed real interval `[lo, hi]` with `lo <= hi`.
///
/// Serializes as the two-element array `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// Rejected interval endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("invalid interval [{lo}, {hi}]: endpoints must be finite with lo <= hi")]
pub struct IntervalError {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError { lo, hi })
        }
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn length(self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(self, value: f64) -> bool {
        value >= self.lo && value <= self.hi
    }

    /// Linear interpolation; `t = 0` maps to `lo` and `t = 1` to `hi`.
    pub fn lerp(self, t: f64) -> f64 {
        self.lo + t * (self.hi - self.lo)
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = IntervalError;

    fn try_from(pair: [f64; 2]) -> Result<Self, Self::Error> {
        Interval::new(pair[0], pair[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(interval: Interval) -> Self {
        [interval.lo, interval.hi]
    }
}

/// Rejected profile construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("profile derivative evaluation failed at y = {y}: {source}")]
    Eval { y: f64, source: EvalError },
    #[error("profile is irregular at y = {y}: f'(y)^2 + g'(y)^2 vanishes")]
    Irregular { y: f64 },
    #[error("regularity sampling needs at least 2 samples, got {samples}")]
    InvalidSamples { samples: usize },
}

/// Planar profile curve `y -> (f(y), g(y))` on a closed interval.
///
/// Construction differentiates both components symbolically and samples the
/// domain to reject profiles whose speed `f'(y)^2 + g'(y)^2` vanishes at a
/// sample point. The check is a sampling heuristic: irregular points strictly
/// between samples can escape it.
#[derive(Debug, Clone)]
pub struct ProfileCurve {
    f: Expr,
    g: Expr,
    f_prime: Expr,
    g_prime: Expr,
    domain: Interval,
}

impl ProfileCurve {
    pub const DEFAULT_REGULARITY_SAMPLES: usize = 1024;

    /// Builds a profile, checking regularity at
    /// [`Self::DEFAULT_REGULARITY_SAMPLES`] evenly spaced points.
    pub fn new(f: Expr, g: Expr, domain: Interval) -> Result<Self, ProfileError> {
        Self::with_samples(f, g, domain, Self::DEFAULT_REGULARITY_SAMPLES)
    }

    /// Builds a profile with an explicit regularity sample count.
    pub fn with_samples(
        f: Expr,
        g: Expr,
        domain: Interval,
        samples: usize,
    ) -> Result<Self, ProfileError> {
        if samples < 2 {
            return Err(ProfileError::InvalidSamples { samples });
        }
        let f_prime = differentiate(&f);
        let g_prime = differentiate(&g);
        for i in 0..samples {
            let y = domain.lerp(i as f64 / (samples - 1) as f64);
            let df = evaluate(&f_prime, y).map_err(|source| ProfileError::Eval { y, source })?;
            let dg = evaluate(&g_prime, y).map_err(|source| ProfileError::Eval { y, source })?;
            if df * df + dg * dg <= 0.0 {
                return Err(ProfileError::Irregular { y });
            }
        }
        Ok(ProfileCurve {
            f,
            g,
            f_prime,
            g_prime,
            domain,
        })
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn g(&self) -> &Expr {
        &self.g
    }

    pub fn f_prime(&self) -> &Expr {
        &self.f_prime
    }

    pub fn g_prime(&self) -> &Expr {
        &self.g_prime
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    fn check_domain(&self, y: f64) -> Result<(), EvalError> {
        if y.is_finite() && self.domain.contains(y) {
            Ok(())
        } else {
            Err(EvalError::OutOfDomain {
                y,
                lo: self.domain.lo(),
                hi: self.domain.hi(),
            })
        }
    }

    pub fn f_at(&self, y: f64) -> Result<f64, EvalError> {
        self.check_domain(y)?;
        evaluate(&self.f, y)
    }

    pub fn g_at(&self, y: f64) -> Result<f64, EvalError> {
        self.check_domain(y)?;
        evaluate(&self.g, y)
    }

    pub fn f_prime_at(&self, y: f64) -> Result<f64, EvalError> {
        self.check_domain(y)?;
        evaluate(&self.f_prime, y)
    }

    pub fn g_prime_at(&self, y: f64) -> Result<f64, EvalError> {
        self.check_domain(y)?;
        evaluate(&self.g_prime, y)
    }
}
