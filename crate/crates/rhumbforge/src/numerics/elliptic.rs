//! Incomplete elliptic integral of the second kind.

use super::quad::adaptive_gauss_kronrod;
use thiserror::Error;

/// Failure evaluating `E(phi | m)`.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EllipticError {
    #[error("E(phi|m) requires finite arguments, got phi = {phi}, m = {m}")]
    NonFiniteArgument { phi: f64, m: f64 },
    #[error("E(phi|m) is not real for phi = {phi}, m = {m}: 1 - m sin^2(t) goes negative on the integration path")]
    ComplexValue { phi: f64, m: f64 },
    #[error("quadrature for E(phi|m) did not converge for phi = {phi}, m = {m}")]
    NonConvergence { phi: f64, m: f64 },
}

/// Incomplete elliptic integral of the second kind in the amplitude and
/// parameter convention:
///
/// ```text
/// E(phi | m) = integral from 0 to phi of sqrt(1 - m sin^2 t) dt
/// ```
///
/// The amplitude may be any finite real (the function is odd and grows
/// linearly on average); the parameter must keep the integrand real along
/// the path, i.e. `m sin^2 t <= 1` for `t` between 0 and `phi`. Negative `m`
/// is allowed. Accuracy is around `1e-12` absolute plus `1e-13` per unit of
/// amplitude.
pub fn elliptic_e_incomplete(phi: f64, m: f64) -> Result<f64, EllipticError> {
    if !phi.is_finite() || !m.is_finite() {
        return Err(EllipticError::NonFiniteArgument { phi, m });
    }
    let max_sin_sq = if phi.abs() >= std::f64::consts::FRAC_PI_2 {
        1.0
    } else {
        phi.sin().powi(2)
    };
    if m * max_sin_sq > 1.0 {
        return Err(EllipticError::ComplexValue { phi, m });
    }
    // Rounding may graze zero when m sin^2 t touches 1; clamp before the
    // square root.
    let mut integrand = |t: f64| (1.0 - m * t.sin().powi(2)).max(0.0).sqrt();
    let tol = 1e-12 * (1.0 + 0.1 * phi.abs());
    adaptive_gauss_kronrod(&mut integrand, 0.0, phi, tol)
        .ok_or(EllipticError::NonConvergence { phi, m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::adaptive_simpson;
    use std::convert::Infallible;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn simpson_oracle(phi: f64, m: f64) -> f64 {
        let mut f = |t: f64| Ok::<f64, Infallible>((1.0 - m * t.sin().powi(2)).max(0.0).sqrt());
        adaptive_simpson(&mut f, 0.0, phi, 1e-12).unwrap()
    }

    #[test]
    fn zero_amplitude_is_zero() {
        assert_eq!(elliptic_e_incomplete(0.0, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn zero_parameter_is_the_identity() {
        for &phi in &[0.3, 1.0, FRAC_PI_2, 2.7, -1.9] {
            let got = elliptic_e_incomplete(phi, 0.0).unwrap();
            assert!((got - phi).abs() < 1e-13);
        }
    }

    #[test]
    fn frozen_reference_values() {
        // Quarter-period values at m = 0.8 and m = 0.3.
        let got = elliptic_e_incomplete(FRAC_PI_2, 0.8).unwrap();
        assert!((got - 1.178_489_924_327_838_8).abs() < 1e-12);

        let got = elliptic_e_incomplete(FRAC_PI_2, 0.3).unwrap();
        assert!((got - 1.445_363_064_412_665_4).abs() < 1e-12);

        let got = elliptic_e_incomplete(PI, 0.8).unwrap();
        assert!((got - 2.356_979_848_655_677).abs() < 1e-12);
    }

    #[test]
    fn unit_parameter_reduces_to_sine() {
        // E(phi | 1) = sin(phi) for phi in [-pi/2, pi/2].
        for &phi in &[0.2, 0.9, FRAC_PI_2] {
            let got = elliptic_e_incomplete(phi, 1.0).unwrap();
            assert!((got - phi.sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn matches_the_simpson_oracle() {
        for &m in &[0.0, 0.3, 0.8, -1.5] {
            for &phi in &[0.4, 1.1, FRAC_PI_2, 2.0, PI, -2.4] {
                let got = elliptic_e_incomplete(phi, m).unwrap();
                let oracle = simpson_oracle(phi, m);
                assert!(
                    (got - oracle).abs() < 1e-10,
                    "phi = {phi}, m = {m}: {got} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn half_period_doubling_identity() {
        // The integrand has period pi and quarter-wave symmetry, so
        // E(pi | m) = 2 E(pi/2 | m).
        for &m in &[0.0, 0.3, 0.8] {
            let full = elliptic_e_incomplete(PI, m).unwrap();
            let quarter = elliptic_e_incomplete(FRAC_PI_2, m).unwrap();
            assert!((full - 2.0 * quarter).abs() < 1e-12);
        }
    }

    #[test]
    fn oddness_in_the_amplitude() {
        for &m in &[0.3, 0.8] {
            let plus = elliptic_e_incomplete(1.3, m).unwrap();
            let minus = elliptic_e_incomplete(-1.3, m).unwrap();
            assert!((plus + minus).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_values_are_rejected() {
        assert!(matches!(
            elliptic_e_incomplete(FRAC_PI_2, 2.0),
            Err(EllipticError::ComplexValue { .. })
        ));
        // Small amplitudes keep the integrand real even for m > 1.
        assert!(elliptic_e_incomplete(0.3, 2.0).is_ok());
        assert!(matches!(
            elliptic_e_incomplete(f64::NAN, 0.5),
            Err(EllipticError::NonFiniteArgument { .. })
        ));
    }
}
