//! Adaptive quadrature: Simpson with Richardson acceptance for fallible
//! integrands, and Gauss-Kronrod 7(15) bisection for smooth infallible ones.

use thiserror::Error;

/// Quadrature failure; `E` is the integrand's own error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError<E> {
    #[error("quadrature did not converge on [{a}, {b}]")]
    NonConvergence { a: f64, b: f64 },
    #[error(transparent)]
    Integrand(E),
}

const MAX_DEPTH: u32 = 60;

/// Adaptive Simpson quadrature of a fallible integrand over `[a, b]` to
/// absolute tolerance `tol`.
///
/// Intervals where the bisected rule agrees with the whole-interval rule to
/// `15 tol` are accepted with Richardson extrapolation; others are split
/// with the tolerance halved.
pub fn adaptive_simpson<E, F>(f: &mut F, a: f64, b: f64, tol: f64) -> Result<f64, QuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    if a == b {
        return Ok(0.0);
    }
    let mut eval = |x: f64| f(x).map_err(QuadError::Integrand);
    let mid = 0.5 * (a + b);
    let fa = eval(a)?;
    let fm = eval(mid)?;
    let fb = eval(b)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_split(&mut eval, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_split<E, F>(
    eval: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, QuadError<E>>
where
    F: FnMut(f64) -> Result<f64, QuadError<E>>,
{
    let mid = 0.5 * (a + b);
    // Once the midpoint rounds onto an endpoint, both rules agree exactly
    // and a discontinuity would be accepted as converged.
    if mid == a || mid == b {
        return Err(QuadError::NonConvergence { a, b });
    }
    let left_mid = 0.5 * (a + mid);
    let right_mid = 0.5 * (mid + b);
    let flm = eval(left_mid)?;
    let frm = eval(right_mid)?;
    let left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
    let refined = left + right;
    if (refined - whole).abs() <= 15.0 * tol {
        return Ok(refined + (refined - whole) / 15.0);
    }
    if depth == 0 {
        return Err(QuadError::NonConvergence { a, b });
    }
    let half_tol = 0.5 * tol;
    let l = simpson_split(eval, a, mid, fa, flm, fm, left, half_tol, depth - 1)?;
    let r = simpson_split(eval, mid, b, fm, frm, fb, right, half_tol, depth - 1)?;
    Ok(l + r)
}

// Gauss-Kronrod 7(15) abscissae and weights on [-1, 1], symmetric halves.
// The embedded 7-point Gauss rule uses the odd-indexed abscissae plus the
// center.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 7(15) application over `[a, b]`; returns the Kronrod
/// value and `|Kronrod - Gauss|` as the error estimate.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for i in 0..7 {
        let offset = half * XGK[i];
        let sum = f(center - offset) + f(center + offset);
        kronrod += WGK[i] * sum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * sum;
        }
    }
    (half * kronrod, (half * (kronrod - gauss)).abs())
}

/// Adaptive Gauss-Kronrod quadrature of a smooth integrand over `[a, b]`
/// (either orientation) to absolute tolerance `tol`.
///
/// Returns `None` if bisection exhausts its depth without converging.
pub fn adaptive_gauss_kronrod<F>(f: &mut F, a: f64, b: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Some(0.0);
    }
    gk_split(f, a, b, tol, MAX_DEPTH)
}

fn gk_split<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> Option<f64> {
    let (value, err) = gk15(f, a, b);
    if err <= tol {
        return Some(value);
    }
    if depth == 0 {
        return None;
    }
    let mid = 0.5 * (a + b);
    if mid == a || mid == b {
        return None;
    }
    let half_tol = 0.5 * tol;
    let left = gk_split(f, a, mid, half_tol, depth - 1)?;
    let right = gk_split(f, mid, b, half_tol, depth - 1)?;
    Some(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;
    use std::f64::consts::PI;

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        let mut f = |x: f64| Ok::<f64, Infallible>(x * x * x - 2.0 * x + 1.0);
        let got = adaptive_simpson(&mut f, -1.0, 3.0, 1e-12).unwrap();
        // Antiderivative x^4/4 - x^2 + x evaluated over [-1, 3].
        assert!((got - 16.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_handles_oscillatory_integrands() {
        let mut f = |x: f64| Ok::<f64, Infallible>((10.0 * x).sin());
        let got = adaptive_simpson(&mut f, 0.0, PI, 1e-12).unwrap();
        let exact = (1.0 - (10.0 * PI).cos()) / 10.0;
        assert!((got - exact).abs() < 1e-10);
    }

    #[test]
    fn simpson_propagates_integrand_errors() {
        let mut f = |x: f64| {
            if x > 0.5 {
                Err("boom")
            } else {
                Ok(x)
            }
        };
        let got = adaptive_simpson(&mut f, 0.0, 1.0, 1e-10);
        assert_eq!(got, Err(QuadError::Integrand("boom")));
    }

    #[test]
    fn simpson_reports_non_convergence() {
        // A discontinuity with an unreachable tolerance exhausts the depth.
        let mut f = |x: f64| Ok::<f64, Infallible>(if x < 0.3 { 0.0 } else { 1.0 });
        let got = adaptive_simpson(&mut f, 0.0, 1.0, 1e-18);
        assert!(matches!(got, Err(QuadError::NonConvergence { .. })));
    }

    #[test]
    fn gauss_kronrod_matches_closed_forms() {
        let mut f = |x: f64| x.exp();
        let got = adaptive_gauss_kronrod(&mut f, 0.0, 2.0, 1e-13).unwrap();
        assert!((got - (2.0f64.exp() - 1.0)).abs() < 1e-12);

        let mut g = |x: f64| 1.0 / (1.0 + x * x);
        let got = adaptive_gauss_kronrod(&mut g, -4.0, 4.0, 1e-13).unwrap();
        assert!((got - 2.0 * 4.0f64.atan()).abs() < 1e-12);
    }

    #[test]
    fn gauss_kronrod_handles_reversed_bounds() {
        let mut f = |x: f64| x.cos();
        let forward = adaptive_gauss_kronrod(&mut f, 0.0, 1.2, 1e-13).unwrap();
        let backward = adaptive_gauss_kronrod(&mut f, 1.2, 0.0, 1e-13).unwrap();
        assert!((forward + backward).abs() < 1e-13);
    }
}
