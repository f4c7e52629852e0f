//! Single embedded Dormand-Prince 5(4) step for a two-component system.
//!
//! The stepper is first-same-as-last: the seventh stage derivative equals the
//! derivative at the accepted endpoint, so the driver feeds each step's
//! `k_last` back in as the next step's `k_first`.

pub(crate) type State = [f64; 2];

const STAGES: usize = 7;

const C: [f64; STAGES] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; STAGES - 1] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// Difference between the fifth- and fourth-order weights.
const E: [f64; STAGES] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub(crate) struct StepOutcome {
    /// Fifth-order solution at `t + h`.
    pub y_new: State,
    /// Componentwise local error estimate.
    pub err: State,
    /// Derivative at `(t + h, y_new)`, reusable as the next first stage.
    pub k_last: State,
}

/// Attempts one step of signed size `h` from `(t, y)` with the first stage
/// derivative `k_first` already evaluated. Fails if any stage derivative
/// fails.
pub(crate) fn try_step<F, Err>(
    rhs: &mut F,
    t: f64,
    y: State,
    k_first: State,
    h: f64,
) -> Result<StepOutcome, Err>
where
    F: FnMut(f64, State) -> Result<State, Err>,
{
    let mut k = [[0.0f64; 2]; STAGES];
    k[0] = k_first;
    let mut y_new = y;
    for stage in 1..STAGES {
        let mut yi = y;
        for (prev, k_prev) in k.iter().enumerate().take(stage) {
            let a = A[stage - 1][prev];
            if a != 0.0 {
                yi[0] += h * a * k_prev[0];
                yi[1] += h * a * k_prev[1];
            }
        }
        if stage == STAGES - 1 {
            y_new = yi;
        }
        k[stage] = rhs(t + C[stage] * h, yi)?;
    }
    let mut err = [0.0f64; 2];
    for (weight, k_stage) in E.iter().zip(k.iter()) {
        err[0] += weight * k_stage[0];
        err[1] += weight * k_stage[1];
    }
    err[0] *= h;
    err[1] *= h;
    Ok(StepOutcome {
        y_new,
        err,
        k_last: k[STAGES - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn single_step_is_fifth_order_on_the_exponential() {
        // y' = y, y(0) = 1; one step of h gives e^h to O(h^6).
        let mut rhs = |_t: f64, y: State| Ok::<State, Infallible>([y[0], 0.0]);
        for &h in &[0.1, 0.05, 0.025] {
            let out = try_step(&mut rhs, 0.0, [1.0, 0.0], [1.0, 0.0], h).unwrap();
            let truncation = (out.y_new[0] - h.exp()).abs();
            assert!(
                truncation < 2.0 * h.powi(6),
                "h = {h}: truncation {truncation:e}"
            );
        }
    }

    #[test]
    fn error_estimate_tracks_the_true_error() {
        let mut rhs = |t: f64, _y: State| Ok::<State, Infallible>([(5.0 * t).sin(), 0.0]);
        let h = 0.2;
        let out = try_step(&mut rhs, 0.3, [0.0, 0.0], [(1.5f64).sin(), 0.0], h).unwrap();
        let exact = ((1.5f64).cos() - (5.0 * (0.3 + h)).cos()) / 5.0;
        let true_err = (out.y_new[0] - exact).abs();
        assert!(out.err[0].abs() > 0.0);
        // The embedded estimate should be within a couple of orders of
        // magnitude of the truth for a smooth problem.
        assert!(out.err[0].abs() < 1e3 * true_err.max(1e-14));
        assert!(out.err[0].abs() > 1e-3 * true_err);
    }

    #[test]
    fn last_stage_is_the_endpoint_derivative() {
        let mut rhs = |t: f64, y: State| Ok::<State, Infallible>([t + y[0], 1.0]);
        let out = try_step(&mut rhs, 0.0, [1.0, 0.0], [1.0, 1.0], 0.1).unwrap();
        let expected = 0.1 + out.y_new[0];
        assert!((out.k_last[0] - expected).abs() < 1e-15);
    }
}
