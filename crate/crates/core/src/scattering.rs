//! Direct scattering for decaying 2x2 potentials: Jost integration across
//! the potential, transmission/reflection data `a(zeta)`, `b(zeta)`,
//! reflectionlessness sweeps, and bound-state location by two-sided
//! shooting with per-step renormalization.

use num_complex::Complex64;

use crate::akulin::{hamiltonian_ext, AkulinSpec};
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions, State};
use crate::operator::{FirstOrderOperator, Mat2};

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// domain half-width; the potential must have decayed at |x| = L
    pub l: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { l: 25.0, rtol: 1e-12, atol: 1e-14, max_step: f64::INFINITY }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.l > 5.0) || !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::InvalidArgument(format!("bad solver options {self:?}")));
        }
        Ok(())
    }

    fn ode(&self) -> OdeOptions {
        OdeOptions { rtol: self.rtol, atol: self.atol, max_step: self.max_step }
    }
}

/// Scattering data at one real spectral point `zeta` (`lambda = i zeta`):
/// the connection coefficients `a`, `b` and the reflection probability
/// `R = |b|^2 / |a|^2`.
#[derive(Clone, Copy, Debug)]
pub struct ScatteringData {
    pub zeta: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub r: f64,
    /// `|a|^2 + |b|^2 - 1`; vanishes for norm-preserving potentials
    pub unitarity_defect: f64,
}

/// Discrete eigenvalues located by two-sided shooting, sorted ascending,
/// with the residual of the matching determinant at each root.
#[derive(Clone, Debug, Default)]
pub struct BoundStateSet {
    pub eigenvalues: Vec<f64>,
    pub mismatch_values: Vec<f64>,
}

const DECAY_TOL: f64 = 1e-10;

fn check_admissible(op: &FirstOrderOperator, l: f64) -> Result<()> {
    if (op.p - Mat2::sigma_z()).max_norm() > 0.0 {
        return Err(Error::InvalidArgument(
            "scattering requires P = sigma_z".into(),
        ));
    }
    let tail = op.q.eval(l).max_norm().max(op.q.eval(-l).max_norm());
    if tail > DECAY_TOL {
        return Err(Error::DecayViolated(tail));
    }
    Ok(())
}

fn is_norm_preserving(op: &FirstOrderOperator) -> bool {
    // sigma_z Q anti-Hermitian makes the zeta-real flow norm-preserving
    [0.0, 0.7, -1.3].iter().all(|&x| {
        let m = Mat2::sigma_z() * op.q.eval(x);
        let mut defect: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                defect = defect.max((m.0[i][j] + m.0[j][i].conj()).norm());
            }
        }
        defect < 1e-12
    })
}

/// Rhs of the first-order system equivalent to `H psi = lambda psi` with
/// `H = sigma_z d/dx + Q`: `psi' = sigma_z (lambda - Q(x)) psi`.
fn flow<'a>(op: &'a FirstOrderOperator, lambda: Complex64) -> impl Fn(f64, &State) -> State + 'a {
    move |x, y| {
        let q = op.q.eval(x);
        let m = Mat2::sigma_z() * (Mat2::identity() * lambda - q);
        m.mul_vec(*y)
    }
}

/// Integrate the Jost solution fixed by `psi(-L) = (e^{-i zeta L}, 0)` across
/// the potential and read off `a = psi_1(L) e^{-i zeta L}`,
/// `b = psi_2(L) e^{+i zeta L}`.
pub fn scatter(
    op: &FirstOrderOperator,
    zeta: f64,
    opts: &SolverOptions,
) -> Result<ScatteringData> {
    opts.validate()?;
    check_admissible(op, opts.l)?;
    let l = opts.l;
    let lambda = Complex64::new(0.0, zeta);
    let y0: State = [(-lambda * l).exp(), Complex64::ZERO];
    let y = integrate(flow(op, lambda), -l, l, y0, &opts.ode(), |_, _| {})?;
    let a = y[0] * (-lambda * l).exp();
    let b = y[1] * (lambda * l).exp();
    let r = b.norm_sqr() / a.norm_sqr();
    let unitarity_defect = a.norm_sqr() + b.norm_sqr() - 1.0;
    if is_norm_preserving(op) && unitarity_defect.abs() > 1e-9 {
        return Err(Error::VerificationFailure(format!(
            "unitarity defect {unitarity_defect:.3e} at zeta = {zeta}"
        )));
    }
    Ok(ScatteringData { zeta, a, b, r, unitarity_defect })
}

pub fn scatter_spec(
    spec: &AkulinSpec,
    zeta: f64,
    opts: &SolverOptions,
) -> Result<ScatteringData> {
    scatter(&hamiltonian_ext(spec), zeta, opts)
}

/// Scatter at every point of `zeta_grid`, preserving input order.
pub fn reflectivity_sweep(
    spec: &AkulinSpec,
    zeta_grid: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<ScatteringData>> {
    if zeta_grid.is_empty() {
        return Err(Error::InvalidArgument("empty zeta grid".into()));
    }
    if let Some(z) = zeta_grid.iter().find(|z| z.abs() > 20.0) {
        return Err(Error::InvalidArgument(format!("|zeta| = {} > 20", z.abs())));
    }
    let op = hamiltonian_ext(spec);
    zeta_grid
        .iter()
        .map(|&z| {
            scatter(&op, z, opts).map_err(|e| match e {
                Error::VerificationFailure(m) => {
                    Error::VerificationFailure(format!("at zeta = {z}: {m}"))
                }
                other => other,
            })
        })
        .collect()
}

fn renormalize(y: &mut State) {
    let n = (y[0].norm_sqr() + y[1].norm_sqr()).sqrt();
    if n > 0.0 {
        y[0] /= n;
        y[1] /= n;
    }
}

/// Matching determinant at x = 0 of the two renormalized shooting solutions
/// (decaying direction from each side).
fn matching(op: &FirstOrderOperator, lambda: f64, opts: &SolverOptions) -> Result<Complex64> {
    let l = opts.l;
    let lam = Complex64::new(lambda, 0.0);
    let from_left = integrate(
        flow(op, lam),
        -l,
        0.0,
        [Complex64::ONE, Complex64::ZERO],
        &opts.ode(),
        |_, y| renormalize(y),
    )?;
    let from_right = integrate(
        flow(op, lam),
        l,
        0.0,
        [Complex64::ZERO, Complex64::ONE],
        &opts.ode(),
        |_, y| renormalize(y),
    )?;
    Ok(from_left[0] * from_right[1] - from_left[1] * from_right[0])
}

const BISECTION_TOL: f64 = 1e-10;

/// Locate discrete eigenvalues `lambda > 0` by a sign-change scan of the
/// matching determinant followed by bisection. An empty result is valid.
pub fn bound_states(
    spec: &AkulinSpec,
    lambda_max: f64,
    scan_points: usize,
    opts: &SolverOptions,
) -> Result<BoundStateSet> {
    if !(lambda_max > 0.0) || scan_points < 2 {
        return Err(Error::InvalidArgument("need lambda_max > 0 and >= 2 scan points".into()));
    }
    opts.validate()?;
    let op = hamiltonian_ext(spec);
    check_admissible(&op, opts.l)?;
    let m = |lam: f64| -> Result<f64> { Ok(matching(&op, lam, opts)?.re) };
    let lam_at = |k: usize| lambda_max * (k + 1) as f64 / scan_points as f64;
    let mut set = BoundStateSet::default();
    let mut prev = m(lam_at(0))?;
    for k in 1..scan_points {
        let cur = m(lam_at(k))?;
        if prev == 0.0 {
            prev = cur;
            continue;
        }
        if prev.signum() != cur.signum() {
            let (mut lo, mut hi) = (lam_at(k - 1), lam_at(k));
            let mut flo = prev;
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                let fm = m(mid)?;
                if fm == 0.0 || fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            set.eigenvalues.push(root);
            set.mismatch_values.push(matching(&op, root, opts)?.norm());
        }
        prev = cur;
    }
    Ok(set)
}
