//! Two-level atom driven by a sech pulse: amplitude-equation integration,
//! detuning sweeps, and the transparency effect at integer pulse area.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions, State};

/// A sech pulse `V(t) = n / (tau cosh(t / tau))` at detuning `delta`,
/// integrated over `t in [-horizon, +horizon]`.
#[derive(Clone, Copy, Debug)]
pub struct PulseSpec {
    pub n_area: f64,
    pub tau: f64,
    pub delta: f64,
    pub horizon: f64,
}

impl PulseSpec {
    /// Default horizon 40 tau; the pulse tail there is ~8.5e-18 relative.
    pub fn new(n_area: f64, tau: f64, delta: f64) -> Result<PulseSpec> {
        PulseSpec::with_horizon(n_area, tau, delta, 40.0 * tau)
    }

    pub fn with_horizon(n_area: f64, tau: f64, delta: f64, horizon: f64) -> Result<PulseSpec> {
        if !(tau > 0.0) || !n_area.is_finite() || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bad pulse (n = {n_area}, tau = {tau}, delta = {delta})"
            )));
        }
        if !(horizon >= 20.0 * tau) {
            return Err(Error::InvalidArgument(format!(
                "horizon {horizon} < 20 tau = {}",
                20.0 * tau
            )));
        }
        Ok(PulseSpec { n_area, tau, delta, horizon })
    }
}

/// Final amplitudes and the population transferred to the excited state.
#[derive(Clone, Copy, Debug)]
pub struct PulseResult {
    pub delta: f64,
    pub p_transfer: f64,
    pub final_g: Complex64,
    pub final_e: Complex64,
    pub norm_drift: f64,
}

/// Lab-frame amplitude equations; kept for the fixed-step test oracle so
/// that the oracle shares nothing with the production path.
#[cfg(test)]
fn rhs(spec: &PulseSpec) -> impl Fn(f64, &State) -> State + '_ {
    let half_d = 0.5 * spec.delta;
    move |t, y| {
        let v = spec.n_area / (spec.tau * (t / spec.tau).cosh());
        [
            Complex64::new(0.0, -1.0) * (y[0] * half_d + y[1] * v),
            Complex64::new(0.0, -1.0) * (y[1] * (-half_d) + y[0] * v),
        ]
    }
}

/// Same system in the frame rotating at the detuning: the diagonal phases
/// are applied analytically, so the integrator only tracks the coupling.
fn rhs_rotating(spec: &PulseSpec) -> impl Fn(f64, &State) -> State + '_ {
    move |t, y| {
        let v = spec.n_area / (spec.tau * (t / spec.tau).cosh());
        let phase = Complex64::new(0.0, spec.delta * t).exp();
        [
            Complex64::new(0.0, -v) * phase * y[1],
            Complex64::new(0.0, -v) * phase.conj() * y[0],
        ]
    }
}

/// Integrate the amplitude equations
/// `i g' = (delta/2) g + V(t) e`, `i e' = -(delta/2) e + V(t) g`
/// from `(g, e) = (e^{i delta T / 2}, 0)` at `t = -T` and return
/// `p_transfer = |e(T)|^2`. The initial phase is a convention; `p_transfer`
/// does not depend on it.
pub fn simulate_pulse(spec: &PulseSpec, opts: &OdeOptions) -> Result<PulseResult> {
    let t_max = spec.horizon;
    // rotating frame: tilde(g) = g e^{+i delta t / 2}, tilde(e) = e e^{-...};
    // the stated initial condition maps to (1, 0)
    let y0: State = [Complex64::ONE, Complex64::ZERO];
    let y_rot = if spec.n_area == 0.0 {
        y0
    } else {
        integrate(rhs_rotating(spec), -t_max, t_max, y0, opts, |_, _| {})?
    };
    let half_phase = Complex64::new(0.0, 0.5 * spec.delta * t_max).exp();
    let y: State = [y_rot[0] * half_phase.conj(), y_rot[1] * half_phase];
    let norm = y[0].norm_sqr() + y[1].norm_sqr();
    Ok(PulseResult {
        delta: spec.delta,
        p_transfer: y[1].norm_sqr(),
        final_g: y[0],
        final_e: y[1],
        norm_drift: (norm - 1.0).abs(),
    })
}

/// Per-detuning simulation, output in input order.
pub fn detuning_sweep(
    n_area: f64,
    tau: f64,
    deltas: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<PulseResult>> {
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("empty detuning grid".into()));
    }
    deltas
        .iter()
        .map(|&d| {
            let spec = PulseSpec::new(n_area, tau, d)?;
            simulate_pulse(&spec, opts)
                .map_err(|e| Error::VerificationFailure(format!("at delta = {d}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::akulin::AkulinSpec;
    use crate::scattering::{scatter_spec, SolverOptions};

    fn run(n: f64, delta: f64) -> PulseResult {
        let spec = PulseSpec::new(n, 1.0, delta).unwrap();
        simulate_pulse(&spec, &OdeOptions::default()).unwrap()
    }

    /// Fixed-step RK4 oracle, independent of the adaptive integrator.
    fn run_rk4(spec: &PulseSpec, steps: usize) -> f64 {
        let f = rhs(spec);
        let h = 2.0 * spec.horizon / steps as f64;
        let mut t = -spec.horizon;
        let mut y: State = [
            Complex64::new(0.0, 0.5 * spec.delta * spec.horizon).exp(),
            Complex64::ZERO,
        ];
        for _ in 0..steps {
            let k1 = f(t, &y);
            let y2 = [y[0] + k1[0] * (h / 2.0), y[1] + k1[1] * (h / 2.0)];
            let k2 = f(t + h / 2.0, &y2);
            let y3 = [y[0] + k2[0] * (h / 2.0), y[1] + k2[1] * (h / 2.0)];
            let k3 = f(t + h / 2.0, &y3);
            let y4 = [y[0] + k3[0] * h, y[1] + k3[1] * h];
            let k4 = f(t + h, &y4);
            for i in 0..2 {
                y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
            t += h;
        }
        y[1].norm_sqr()
    }

    #[test]
    fn integer_area_is_transparent() {
        assert!(run(1.0, 0.0).p_transfer < 1e-8);
        assert!(run(2.0, 3.7).p_transfer < 1e-8);
        assert!(run(3.0, -1.2).p_transfer < 1e-8);
    }

    #[test]
    fn half_area_resonant_inverts() {
        let r = run(0.5, 0.0);
        assert!((r.p_transfer - 1.0).abs() < 1e-6, "p = {}", r.p_transfer);
        // independent fixed-step oracle at two resolutions
        let spec = PulseSpec::new(0.5, 1.0, 0.0).unwrap();
        let p1 = run_rk4(&spec, 40_000);
        let p2 = run_rk4(&spec, 80_000);
        assert!((p1 - r.p_transfer).abs() < 1e-6);
        assert!((p2 - r.p_transfer).abs() < 1e-7);
    }

    #[test]
    fn norm_is_preserved() {
        for (n, d) in [(1.0, 0.0), (0.5, 2.0), (2.3, -4.0)] {
            let r = run(n, d);
            assert!(r.norm_drift < 1e-10, "(n = {n}, delta = {d}): drift {:e}", r.norm_drift);
        }
    }

    #[test]
    fn detuning_symmetry() {
        for d in [0.5, 2.0, 7.0] {
            let p = run(0.7, d).p_transfer;
            let m = run(0.7, -d).p_transfer;
            assert!((p - m).abs() < 1e-9);
        }
    }

    #[test]
    fn sweep_is_transparent_for_integer_area() {
        let deltas: Vec<f64> = (0..21).map(|k| -10.0 + k as f64).collect();
        let out = detuning_sweep(1.0, 1.0, &deltas, &OdeOptions::default()).unwrap();
        assert_eq!(out.len(), 21);
        for r in &out {
            assert!(r.p_transfer < 1e-8, "p = {:e} at delta = {}", r.p_transfer, r.delta);
        }
    }

    #[test]
    fn transfer_decreases_with_detuning() {
        let out = detuning_sweep(0.5, 1.0, &[0.0, 1.0, 2.0], &OdeOptions::default()).unwrap();
        assert!(out[0].p_transfer > out[1].p_transfer);
        assert!(out[1].p_transfer > out[2].p_transfer);
    }

    #[test]
    fn zero_area_is_exactly_dark() {
        let r = run(0.0, 1.3);
        assert_eq!(r.p_transfer, 0.0);
        assert_eq!(r.norm_drift, 0.0);
    }

    #[test]
    fn closed_form_cross_check() {
        // external closed form, used only as a test oracle
        use std::f64::consts::PI;
        for (n, d) in [(0.5, 1.0), (0.3, 0.0), (1.5, 2.5)] {
            let exact = (PI * n).sin().powi(2) / ((PI * d / 2.0).cosh()).powi(2);
            let r = run(n, d);
            assert!((r.p_transfer - exact).abs() < 1e-8, "(n = {n}, delta = {d})");
        }
    }

    #[test]
    fn scattering_correspondence() {
        // dictionary: tau = 1/xi, zeta = delta/2, p_transfer = |b|^2
        for (n, xi, delta) in [(0.5, 1.0, 0.8), (0.5, 2.0, 1.4), (0.7, 1.0, 2.0)] {
            let spec = PulseSpec::new(n, 1.0 / xi, delta).unwrap();
            let p = simulate_pulse(&spec, &OdeOptions::default()).unwrap().p_transfer;
            let akulin = AkulinSpec::new(n, xi, 0.0, 0.0, 0.0).unwrap();
            let sc = scatter_spec(&akulin, delta / 2.0, &SolverOptions::default()).unwrap();
            let b2 = sc.b.norm_sqr();
            assert!((p - b2).abs() < 1e-6, "(n = {n}, xi = {xi}, delta = {delta}): p = {p}, |b|^2 = {b2}");
        }
    }
}
