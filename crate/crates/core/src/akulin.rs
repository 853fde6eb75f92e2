//! The concrete operator family: `H_n = sigma_z d/dx - sigma_x n sech(x)`,
//! its scaled/phased extension, the four SUSY factors with their
//! factorization constants, chain verification, the intertwiners (closed
//! form and chain-built), and chain-built eigenstates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, Scheme, SpinorField};
use crate::operator::{
    compose, FirstOrderOperator, Mat2, MatrixCoeff, SecondOrderOperator, SymmetryTransform,
};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Parameters of the extended family `H_n(xi, eta, x0, phi)`.
/// `n` is integer for the SUSY chain; non-integer values are admitted here
/// only for reflection-contrast experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AkulinSpec {
    pub n: f64,
    pub xi: f64,
    pub eta: f64,
    pub x0: f64,
    pub phi: f64,
}

impl AkulinSpec {
    pub fn new(n: f64, xi: f64, eta: f64, x0: f64, phi: f64) -> Result<AkulinSpec> {
        let spec = AkulinSpec { n, xi, eta, x0, phi };
        if !(xi > 0.0)
            || ![n, xi, eta, x0, phi].iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidArgument(format!("bad spec {spec:?}")));
        }
        Ok(spec)
    }

    /// The complex envelope `w_n(x; xi, eta, x0, phi)`.
    pub fn envelope(&self, x: f64) -> Complex64 {
        let u = self.xi * (x - self.x0);
        let phase = Complex64::new(0.0, self.eta * (x - self.x0) + self.phi).exp();
        phase * (self.n * self.xi / u.cosh())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorSign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorRole {
    A,
    B,
}

/// Names one of the four factors `B_n^+`, `A_n^+`, `A_n^-`, `B_n^-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorKind {
    pub sign: FactorSign,
    pub role: FactorRole,
}

/// A spectral point `lambda` of `H psi = lambda psi`. For scattering
/// `lambda = i zeta` with real `zeta`; the laser map uses
/// `lambda = -i Delta / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint(pub Complex64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// `H_n = sigma_z d/dx - sigma_x n sech(x)`.
pub fn hamiltonian(n: i32) -> FirstOrderOperator {
    let nf = n as f64;
    FirstOrderOperator::new(
        Mat2::sigma_z(),
        MatrixCoeff::new(
            move |x: f64| Mat2::sigma_x() * (-nf / x.cosh()),
            move |x: f64| Mat2::sigma_x() * (nf * x.tanh() / x.cosh()),
            move |x: f64| {
                let s = 1.0 / x.cosh();
                Mat2::sigma_x() * (nf * s * (1.0 - 2.0 * s * s))
            },
        ),
    )
}

/// The extended family `sigma_z d/dx - (1/2)(sigma_+ w(x) + h.c.)`.
pub fn hamiltonian_ext(spec: &AkulinSpec) -> FirstOrderOperator {
    let s = *spec;
    let coupling = move |w: Complex64| {
        // -(1/2)(sigma_+ w + sigma_- conj(w)) = -[[0, w], [conj w, 0]]
        Mat2([[Complex64::ZERO, -w], [-w.conj(), Complex64::ZERO]])
    };
    let dlog = move |x: f64| {
        // w'/w = i eta - xi tanh(xi (x - x0))
        Complex64::new(-s.xi * (s.xi * (x - s.x0)).tanh(), s.eta)
    };
    FirstOrderOperator::new(
        Mat2::sigma_z(),
        MatrixCoeff::new(
            move |x: f64| coupling(s.envelope(x)),
            move |x: f64| coupling(s.envelope(x) * dlog(x)),
            move |x: f64| {
                let u = s.xi * (x - s.x0);
                let d = dlog(x);
                let sech2 = 1.0 / (u.cosh() * u.cosh());
                coupling(s.envelope(x) * (d * d - re(s.xi * s.xi * sech2)))
            },
        ),
    )
}

/// Factorization constants: `eps_n^+ = (-1)^n (n + 1/2)`,
/// `eps_n^- = (-1)^n (n - 1/2)`.
pub fn factorization_constant(n: i32, sign: FactorSign) -> f64 {
    let en = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    match sign {
        FactorSign::Plus => en * (n as f64 + 0.5),
        FactorSign::Minus => en * (n as f64 - 0.5),
    }
}

/// The four base SUSY factors, with analytic first and second derivatives of
/// their zeroth-order parts.
pub fn susy_factor(n: i32, kind: FactorKind) -> FirstOrderOperator {
    let nf = n as f64;
    let en = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    // reusable scalar pieces
    let sech = |x: f64| 1.0 / x.cosh();
    // d/dx (sech tanh) = sech (sech^2 - tanh^2)
    match (kind.role, kind.sign) {
        (FactorRole::B, FactorSign::Plus) => FirstOrderOperator::new(
            Mat2::from_real([[0.0, 0.0], [0.0, -1.0]]),
            MatrixCoeff::new(
                move |x: f64| {
                    Mat2::from_real([
                        [1.0, -0.5 * nf * sech(x)],
                        [en * x.cosh() - x.sinh(), -0.5 * (en * (nf + 1.0) + nf * x.tanh())],
                    ])
                },
                move |x: f64| {
                    Mat2::from_real([
                        [0.0, 0.5 * nf * sech(x) * x.tanh()],
                        [en * x.sinh() - x.cosh(), -0.5 * nf * sech(x) * sech(x)],
                    ])
                },
                move |x: f64| {
                    let s = sech(x);
                    let t = x.tanh();
                    Mat2::from_real([
                        [0.0, 0.5 * nf * s * (s * s - t * t)],
                        [en * x.cosh() - x.sinh(), nf * s * s * t],
                    ])
                },
            ),
        ),
        (FactorRole::A, FactorSign::Plus) => FirstOrderOperator::new(
            Mat2::from_real([[1.0, 0.0], [0.0, 0.0]]),
            MatrixCoeff::new(
                move |x: f64| {
                    Mat2::from_real([
                        [-0.5 * (en * (nf + 1.0) + nf * x.tanh()), -0.5 * nf * sech(x)],
                        [en * x.cosh() - x.sinh(), 1.0],
                    ])
                },
                move |x: f64| {
                    Mat2::from_real([
                        [-0.5 * nf * sech(x) * sech(x), 0.5 * nf * sech(x) * x.tanh()],
                        [en * x.sinh() - x.cosh(), 0.0],
                    ])
                },
                move |x: f64| {
                    let s = sech(x);
                    let t = x.tanh();
                    Mat2::from_real([
                        [nf * s * s * t, 0.5 * nf * s * (s * s - t * t)],
                        [en * x.cosh() - x.sinh(), 0.0],
                    ])
                },
            ),
        ),
        // A_n^- carries an overall (-1) in front of the bracketed matrix
        (FactorRole::A, FactorSign::Minus) => FirstOrderOperator::new(
            Mat2::from_real([[1.0, 0.0], [0.0, 0.0]]),
            MatrixCoeff::new(
                move |x: f64| {
                    Mat2::from_real([
                        [-0.5 * (en * (nf - 1.0) - nf * x.tanh()), -0.5 * nf * sech(x)],
                        [-(en * x.cosh() + x.sinh()), -1.0],
                    ])
                },
                move |x: f64| {
                    Mat2::from_real([
                        [0.5 * nf * sech(x) * sech(x), 0.5 * nf * sech(x) * x.tanh()],
                        [-(en * x.sinh() + x.cosh()), 0.0],
                    ])
                },
                move |x: f64| {
                    let s = sech(x);
                    let t = x.tanh();
                    Mat2::from_real([
                        [-nf * s * s * t, 0.5 * nf * s * (s * s - t * t)],
                        [-(en * x.cosh() + x.sinh()), 0.0],
                    ])
                },
            ),
        ),
        (FactorRole::B, FactorSign::Minus) => FirstOrderOperator::new(
            Mat2::from_real([[0.0, 0.0], [0.0, 1.0]]),
            MatrixCoeff::new(
                move |x: f64| {
                    Mat2::from_real([
                        [1.0, 0.5 * nf * sech(x)],
                        [en * x.cosh() + x.sinh(), 0.5 * (en * (nf - 1.0) - nf * x.tanh())],
                    ])
                },
                move |x: f64| {
                    Mat2::from_real([
                        [0.0, -0.5 * nf * sech(x) * x.tanh()],
                        [en * x.sinh() + x.cosh(), -0.5 * nf * sech(x) * sech(x)],
                    ])
                },
                move |x: f64| {
                    let s = sech(x);
                    let t = x.tanh();
                    Mat2::from_real([
                        [0.0, -0.5 * nf * s * (s * s - t * t)],
                        [en * x.cosh() + x.sinh(), nf * s * s * t],
                    ])
                },
            ),
        ),
    }
}

/// Outcome of one chain-link verification at a given `(n, T)`.
pub struct FactorizationReport {
    /// distance of `s_T (T[B+] T[A+] + eps+)` to `H_n`
    pub residual_h_n: f64,
    /// distance between the two constructions of the intermediate operator
    pub residual_h_half: f64,
    /// distance of `s_T (T[B-] T[A-] + eps-)` (at n+1) to `H_{n+1}`
    pub residual_h_next: f64,
    /// the intermediate operator, demoted to first order
    pub intermediate: FirstOrderOperator,
}

const FACTORIZATION_TOL: f64 = 1e-10;

fn link(
    n: i32,
    t: SymmetryTransform,
    outer: FactorKind,
    inner: FactorKind,
    eps: f64,
) -> Result<SecondOrderOperator> {
    let a = susy_factor(n, outer).transform(t);
    let b = susy_factor(n, inner).transform(t);
    let c = compose(&a, &b)?.add_scalar(re(eps)).scale(re(t.s_sign()));
    if c.p2.max_norm() != 0.0 {
        return Err(Error::VerificationFailure(format!(
            "composition second-order part nonzero at n = {n}"
        )));
    }
    Ok(c)
}

const B_PLUS: FactorKind = FactorKind { sign: FactorSign::Plus, role: FactorRole::B };
const A_PLUS: FactorKind = FactorKind { sign: FactorSign::Plus, role: FactorRole::A };
const B_MINUS: FactorKind = FactorKind { sign: FactorSign::Minus, role: FactorRole::B };
const A_MINUS: FactorKind = FactorKind { sign: FactorSign::Minus, role: FactorRole::A };

/// Verify one link of the quadrifurcating chain at `(n, T)`: the two outer
/// compositions must reproduce `H_n` and `H_{n+1}`, and the two middle
/// constructions of the intermediate operator must agree.
pub fn verify_factorization(
    n: i32,
    t: SymmetryTransform,
    window: &Grid,
) -> Result<FactorizationReport> {
    if n.abs() > 8 {
        return Err(Error::InvalidArgument(format!("|n| = {} out of range", n.abs())));
    }
    let eps_p = factorization_constant(n, FactorSign::Plus);
    let eps_m = factorization_constant(n + 1, FactorSign::Minus);

    let bottom = link(n, t, B_PLUS, A_PLUS, eps_p)?;
    let mid1 = link(n, t, A_PLUS, B_PLUS, eps_p)?;
    let mid2 = link(n + 1, t, A_MINUS, B_MINUS, eps_m)?;
    let top = link(n + 1, t, B_MINUS, A_MINUS, eps_m)?;

    let residual_h_n = bottom.distance(&hamiltonian(n).to_second_order(), window);
    let residual_h_half = mid1.distance(&mid2, window);
    let residual_h_next = top.distance(&hamiltonian(n + 1).to_second_order(), window);
    let intermediate = mid1.into_first_order(window)?;

    let worst = residual_h_n.max(residual_h_half).max(residual_h_next);
    if worst > FACTORIZATION_TOL {
        return Err(Error::VerificationFailure(format!(
            "chain residuals at (n = {n}, T = {t}): H_n {residual_h_n:.3e}, \
             middle {residual_h_half:.3e}, H_next {residual_h_next:.3e}"
        )));
    }
    Ok(FactorizationReport { residual_h_n, residual_h_half, residual_h_next, intermediate })
}

/// Closed-form intertwiners linking `H_n` to `H_{n +/- 1}`.
pub fn intertwiner_closed(n: i32, direction: Direction) -> FirstOrderOperator {
    let c = match direction {
        Direction::Up => -(n as f64 + 0.5),
        Direction::Down => n as f64 - 0.5,
    };
    let d = match direction {
        Direction::Up => 0.5,
        Direction::Down => -0.5,
    };
    FirstOrderOperator::new(
        Mat2::identity(),
        MatrixCoeff::new(
            move |x: f64| Mat2::identity() * (c * x.tanh()) + Mat2::i_sigma_y() * (d / x.cosh()),
            move |x: f64| {
                let s = 1.0 / x.cosh();
                Mat2::identity() * (c * s * s) + Mat2::i_sigma_y() * (-d * s * x.tanh())
            },
            move |x: f64| {
                let s = 1.0 / x.cosh();
                let t = x.tanh();
                Mat2::identity() * (-2.0 * c * s * s * t)
                    + Mat2::i_sigma_y() * (-d * s * (s * s - t * t))
            },
        ),
    )
}

/// Intertwiner built from the chain factors:
/// up = `v_T (T[B_{n+1}^-] T[A_n^+])`, down = `v_T (T[B_{n-1}^+] T[A_n^-])`.
/// The composition must be genuinely first order.
pub fn intertwiner_from_chain(
    n: i32,
    direction: Direction,
    t: SymmetryTransform,
) -> Result<FirstOrderOperator> {
    let (outer, inner) = match direction {
        Direction::Up => (susy_factor(n + 1, B_MINUS), susy_factor(n, A_PLUS)),
        Direction::Down => (susy_factor(n - 1, B_PLUS), susy_factor(n, A_MINUS)),
    };
    let c = compose(&outer.transform(t), &inner.transform(t))?.scale(re(t.v_sign()));
    c.into_first_order(&crate::operator::default_window())
}

const OVERFLOW_EXPONENT: f64 = 600.0;
const ANNIHILATION_THRESHOLD: f64 = 1e-10;

/// Plane-wave eigenstate of the potential-free operator:
/// `psi(x) = (alpha e^{lambda x}, beta e^{-lambda x})`.
pub fn free_eigenstate(
    lambda: SpectralPoint,
    alpha: Complex64,
    beta: Complex64,
    grid: &Grid,
) -> Result<SpinorField> {
    let lam = lambda.0;
    if lam.re.abs() * (grid.x_max() - grid.x_min()) > OVERFLOW_EXPONENT {
        return Err(Error::InvalidArgument(
            "re(lambda) * domain width too large; exponential overflow".into(),
        ));
    }
    SpinorField::from_fn(grid.clone(), |x| {
        [alpha * (lam * x).exp(), beta * (-lam * x).exp()]
    })
}

/// Eigenstate of `H_n` built by running the free state through the chain of
/// closed-form intertwiners. Fails with [`Error::Annihilated`] when the chain
/// kills the state.
pub fn chain_eigenstate(
    n: i32,
    lambda: SpectralPoint,
    alpha: Complex64,
    beta: Complex64,
    grid: &Grid,
) -> Result<SpinorField> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("chain_eigenstate needs n >= 1, got {n}")));
    }
    let psi0 = free_eigenstate(lambda, alpha, beta, grid)?;
    let norm0 = psi0.norm();
    let mut psi = psi0;
    for k in 0..n {
        psi = intertwiner_closed(k, Direction::Up).apply(&psi, Scheme::Central8)?;
    }
    let ratio = psi.norm() / norm0.max(1e-300);
    if ratio < ANNIHILATION_THRESHOLD {
        return Err(Error::Annihilated(ratio));
    }
    Ok(psi)
}
