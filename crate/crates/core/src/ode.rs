//! Adaptive Dormand-Prince 5(4) integration for complex 2-component
//! first-order systems. Small and self-contained; both the scattering and
//! the pulse modules drive it.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type State = [Complex64; 2];

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-12, atol: 1e-14, max_step: f64::INFINITY }
    }
}

// Dormand-Prince 5(4) tableau
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// b5 - b4: error estimator weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy(y: &State, h: f64, ks: &[State], coeffs: &[f64]) -> State {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(coeffs) {
        if c != 0.0 {
            out[0] += k[0] * (h * c);
            out[1] += k[1] * (h * c);
        }
    }
    out
}

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction).
/// `after_step` runs after every accepted step and may modify the state
/// (used for renormalized shooting).
pub fn integrate<F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: State,
    opts: &OdeOptions,
    mut after_step: impl FnMut(f64, &mut State),
) -> Result<State>
where
    F: Fn(f64, &State) -> State,
{
    let dir = (x1 - x0).signum();
    if dir == 0.0 {
        return Ok(y0);
    }
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut h = (span / 100.0).min(opts.max_step).min(0.1);
    let mut k1 = f(x, &y);
    let h_min = span * 1e-15;

    while (x1 - x) * dir > 0.0 {
        if h < h_min {
            return Err(Error::StepUnderflow(x));
        }
        if (x + h * dir - x1) * dir > 0.0 {
            h = (x1 - x).abs();
        }
        let hd = h * dir;
        let mut ks = [k1, k1, k1, k1, k1, k1, k1];
        for i in 0..6 {
            let yi = axpy(&y, hd, &ks[..=i], &A[i][..=i]);
            ks[i + 1] = f(x + C[i] * hd, &yi);
        }
        // 5th-order solution is row 6 of A (FSAL)
        let y_new = axpy(&y, hd, &ks[..6], &A[5]);
        let err_state = axpy(&[Complex64::ZERO; 2], hd, &ks, &E);
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max(err_state[i].norm() / sc);
        }
        if err <= 1.0 {
            x += hd;
            y = y_new;
            k1 = ks[6];
            after_step(x, &mut y);
            // state may have been rescaled; k1 must follow
            if y != y_new {
                k1 = f(x, &y);
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * factor).min(opts.max_step);
    }
    Ok(y)
}
