//! First-order 2x2 matrix differential operators `P d/dx + Q(x)` with
//! closed-form coefficients, exact symbolic composition into second-order
//! operators, symmetry conjugation, and pointwise coefficient comparison.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, Scheme, SpinorField};

/// A 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Mat2 {
        Mat2([[Complex64::ZERO; 2]; 2])
    }

    pub fn identity() -> Mat2 {
        Mat2::diag(Complex64::ONE, Complex64::ONE)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Mat2 {
        Mat2([[a, Complex64::ZERO], [Complex64::ZERO, d]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Mat2 {
        Mat2([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    pub fn sigma_x() -> Mat2 {
        Mat2::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn sigma_y() -> Mat2 {
        Mat2([
            [Complex64::ZERO, -Complex64::I],
            [Complex64::I, Complex64::ZERO],
        ])
    }

    pub fn sigma_z() -> Mat2 {
        Mat2::from_real([[1.0, 0.0], [0.0, -1.0]])
    }

    /// i sigma_y = [[0, 1], [-1, 0]]
    pub fn i_sigma_y() -> Mat2 {
        Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]])
    }

    /// sigma_+ = sigma_x + i sigma_y = [[0, 2], [0, 0]]
    pub fn sigma_plus() -> Mat2 {
        Mat2::from_real([[0.0, 2.0], [0.0, 0.0]])
    }

    pub fn max_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn mul_vec(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + -rhs
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self * Complex64::new(-1.0, 0.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}

impl Mul<Complex64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: Complex64) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] *= s;
            }
        }
        out
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self * Complex64::new(s, 0.0)
    }
}

pub type CoeffFn = Arc<dyn Fn(f64) -> Mat2 + Send + Sync>;

/// A closed-form matrix coefficient with its analytic derivatives.
///
/// The first derivative is required wherever a coefficient enters a
/// composition; the second is carried along so that a composition result can
/// itself be reused as a first-order operator.
#[derive(Clone)]
pub struct MatrixCoeff {
    value: CoeffFn,
    deriv: Option<CoeffFn>,
    deriv2: Option<CoeffFn>,
}

impl MatrixCoeff {
    pub fn new(
        value: impl Fn(f64) -> Mat2 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> Mat2 + Send + Sync + 'static,
        deriv2: impl Fn(f64) -> Mat2 + Send + Sync + 'static,
    ) -> MatrixCoeff {
        MatrixCoeff {
            value: Arc::new(value),
            deriv: Some(Arc::new(deriv)),
            deriv2: Some(Arc::new(deriv2)),
        }
    }

    /// Coefficient with value only; cannot appear on the right of a
    /// composition.
    pub fn value_only(value: impl Fn(f64) -> Mat2 + Send + Sync + 'static) -> MatrixCoeff {
        MatrixCoeff { value: Arc::new(value), deriv: None, deriv2: None }
    }

    pub fn constant(m: Mat2) -> MatrixCoeff {
        MatrixCoeff {
            value: Arc::new(move |_| m),
            deriv: Some(Arc::new(|_| Mat2::zero())),
            deriv2: Some(Arc::new(|_| Mat2::zero())),
        }
    }

    pub fn zero() -> MatrixCoeff {
        MatrixCoeff::constant(Mat2::zero())
    }

    pub fn eval(&self, x: f64) -> Mat2 {
        (self.value)(x)
    }

    pub fn eval_deriv(&self, x: f64) -> Result<Mat2> {
        self.deriv
            .as_ref()
            .map(|d| d(x))
            .ok_or(Error::MissingDerivative(1))
    }

    pub fn eval_deriv2(&self, x: f64) -> Result<Mat2> {
        self.deriv2
            .as_ref()
            .map(|d| d(x))
            .ok_or(Error::MissingDerivative(2))
    }

    pub fn has_deriv(&self) -> bool {
        self.deriv.is_some()
    }

    /// Max-norm mismatch between the stored derivative and a numerical one
    /// over `grid`; the coefficient invariant asks for < 1e-6.
    pub fn check_derivative(&self, grid: &Grid) -> Result<f64> {
        let h = 1e-5;
        let mut worst = 0.0f64;
        for x in grid.points() {
            let numeric = (self.eval(x + h) - self.eval(x - h)) * (0.5 / h);
            worst = worst.max((numeric - self.eval_deriv(x)?).max_norm());
        }
        Ok(worst)
    }

    fn add(&self, other: &MatrixCoeff) -> MatrixCoeff {
        let (a, b) = (self.clone(), other.clone());
        MatrixCoeff {
            value: Arc::new({
                let (a, b) = (a.value.clone(), b.value.clone());
                move |x| a(x) + b(x)
            }),
            deriv: zip_opt(&a.deriv, &b.deriv, |u, v| {
                let (u, v) = (u.clone(), v.clone());
                Arc::new(move |x| u(x) + v(x)) as CoeffFn
            }),
            deriv2: zip_opt(&a.deriv2, &b.deriv2, |u, v| {
                let (u, v) = (u.clone(), v.clone());
                Arc::new(move |x| u(x) + v(x)) as CoeffFn
            }),
        }
    }

    fn scale(&self, s: Complex64) -> MatrixCoeff {
        let map = |f: &Option<CoeffFn>| {
            f.as_ref().map(|g| {
                let g = g.clone();
                Arc::new(move |x| g(x) * s) as CoeffFn
            })
        };
        MatrixCoeff {
            value: {
                let v = self.value.clone();
                Arc::new(move |x| v(x) * s)
            },
            deriv: map(&self.deriv),
            deriv2: map(&self.deriv2),
        }
    }

    /// x -> sigma . q(s x) . sigma^{-1} with chain rule on the derivatives.
    /// `sigma` must be involutive up to a scalar (all Pauli matrices are),
    /// so the inverse equals the matrix itself here.
    fn conjugate_reflect(&self, sigma: Mat2, s: f64) -> MatrixCoeff {
        let wrap = |f: &CoeffFn, extra: f64| {
            let f = f.clone();
            Arc::new(move |x: f64| (sigma * f(s * x) * sigma) * extra) as CoeffFn
        };
        MatrixCoeff {
            value: wrap(&self.value, 1.0),
            deriv: self.deriv.as_ref().map(|d| wrap(d, s)),
            deriv2: self.deriv2.as_ref().map(|d| wrap(d, s * s)),
        }
    }
}

fn zip_opt<T>(a: &Option<T>, b: &Option<T>, f: impl Fn(&T, &T) -> T) -> Option<T> {
    match (a, b) {
        (Some(u), Some(v)) => Some(f(u, v)),
        _ => None,
    }
}

/// `P d/dx + Q(x)` with constant `P`.
#[derive(Clone)]
pub struct FirstOrderOperator {
    pub p: Mat2,
    pub q: MatrixCoeff,
}

impl FirstOrderOperator {
    pub fn new(p: Mat2, q: MatrixCoeff) -> FirstOrderOperator {
        FirstOrderOperator { p, q }
    }

    /// Apply to a sampled field: `P f' + Q f`, derivative by `scheme`.
    pub fn apply(&self, f: &SpinorField, scheme: Scheme) -> Result<SpinorField> {
        if f.grid().spacing() > 0.1 {
            return Err(Error::InvalidArgument(format!(
                "grid too coarse for apply: h = {}",
                f.grid().spacing()
            )));
        }
        let df = f.differentiate(1, scheme)?;
        let values = f
            .grid()
            .points()
            .zip(f.values().iter().zip(df.values()))
            .map(|(x, (v, dv))| {
                let a = self.p.mul_vec(*dv);
                let b = self.q.eval(x).mul_vec(*v);
                [a[0] + b[0], a[1] + b[1]]
            })
            .collect();
        SpinorField::new(f.grid().clone(), values)
    }

    pub fn scale(&self, s: Complex64) -> FirstOrderOperator {
        FirstOrderOperator { p: self.p * s, q: self.q.scale(s) }
    }

    pub fn to_second_order(&self) -> SecondOrderOperator {
        SecondOrderOperator {
            p2: Mat2::zero(),
            p1: MatrixCoeff::constant(self.p),
            p0: self.q.clone(),
        }
    }

    /// Max over `window` of the max-norm coefficient difference.
    pub fn distance(&self, other: &FirstOrderOperator, window: &Grid) -> f64 {
        let mut d = (self.p - other.p).max_norm();
        for x in window.points() {
            d = d.max((self.q.eval(x) - other.q.eval(x)).max_norm());
        }
        d
    }

    /// Conjugation by one of the four symmetries. The reflecting kinds (X, Z)
    /// flip the sign of `P` and mirror the argument of `Q`.
    pub fn transform(&self, t: SymmetryTransform) -> FirstOrderOperator {
        match t.kind() {
            TransformKind::I => self.clone(),
            TransformKind::Y => {
                let sy = Mat2::sigma_y();
                FirstOrderOperator {
                    p: sy * self.p * sy,
                    q: self.q.conjugate_reflect(sy, 1.0),
                }
            }
            TransformKind::X | TransformKind::Z => {
                let s = if t.kind() == TransformKind::X {
                    Mat2::sigma_x()
                } else {
                    Mat2::sigma_z()
                };
                FirstOrderOperator {
                    p: -(s * self.p * s),
                    q: self.q.conjugate_reflect(s, -1.0),
                }
            }
        }
    }
}

/// `P2 d^2/dx^2 + P1(x) d/dx + P0(x)`, produced only by composition.
#[derive(Clone)]
pub struct SecondOrderOperator {
    pub p2: Mat2,
    pub p1: MatrixCoeff,
    pub p0: MatrixCoeff,
}

impl SecondOrderOperator {
    pub fn add_scalar(&self, eps: Complex64) -> SecondOrderOperator {
        SecondOrderOperator {
            p2: self.p2,
            p1: self.p1.clone(),
            p0: self.p0.add(&MatrixCoeff::constant(Mat2::identity() * eps)),
        }
    }

    pub fn scale(&self, s: Complex64) -> SecondOrderOperator {
        SecondOrderOperator {
            p2: self.p2 * s,
            p1: self.p1.scale(s),
            p0: self.p0.scale(s),
        }
    }

    pub fn distance(&self, other: &SecondOrderOperator, window: &Grid) -> f64 {
        let mut d = (self.p2 - other.p2).max_norm();
        for x in window.points() {
            d = d.max((self.p1.eval(x) - other.p1.eval(x)).max_norm());
            d = d.max((self.p0.eval(x) - other.p0.eval(x)).max_norm());
        }
        d
    }

    /// Apply to a sampled field (used by compose-apply consistency checks).
    pub fn apply(&self, f: &SpinorField, scheme: Scheme) -> Result<SpinorField> {
        let d1 = f.differentiate(1, scheme)?;
        let d2 = f.differentiate(2, scheme)?;
        let values = f
            .grid()
            .points()
            .zip(f.values().iter().zip(d1.values().iter().zip(d2.values())))
            .map(|(x, (v, (dv, ddv)))| {
                let a = self.p2.mul_vec(*ddv);
                let b = self.p1.eval(x).mul_vec(*dv);
                let c = self.p0.eval(x).mul_vec(*v);
                [a[0] + b[0] + c[0], a[1] + b[1] + c[1]]
            })
            .collect();
        SpinorField::new(f.grid().clone(), values)
    }

    /// Demote to first order. Fails unless `P2` vanishes identically and
    /// `P1` is constant over the probe window.
    pub fn into_first_order(self, probe: &Grid) -> Result<FirstOrderOperator> {
        if self.p2.max_norm() != 0.0 {
            return Err(Error::VerificationFailure(format!(
                "second-order part does not vanish: |P2| = {:e}",
                self.p2.max_norm()
            )));
        }
        let p = self.p1.eval(probe.point(0));
        let mut dev = 0.0f64;
        for x in probe.points() {
            dev = dev.max((self.p1.eval(x) - p).max_norm());
        }
        if dev > 1e-12 {
            return Err(Error::VerificationFailure(format!(
                "first-derivative coefficient is not constant: deviation {dev:e}"
            )));
        }
        Ok(FirstOrderOperator { p, q: self.p0 })
    }
}

/// `compose(A, B) = A ∘ B` (B acts first): exact product rule,
/// `P2 = P_A P_B`, `P1 = P_A Q_B + Q_A P_B`, `P0 = P_A Q_B' + Q_A Q_B`.
pub fn compose(a: &FirstOrderOperator, b: &FirstOrderOperator) -> Result<SecondOrderOperator> {
    if !b.q.has_deriv() {
        return Err(Error::MissingDerivative(1));
    }
    let (pa, pb) = (a.p, b.p);
    let (qa, qb) = (a.q.clone(), b.q.clone());
    let p1 = MatrixCoeff {
        value: {
            let (qa, qb) = (qa.clone(), qb.clone());
            Arc::new(move |x| pa * qb.eval(x) + qa.eval(x) * pb)
        },
        deriv: match (&qa.deriv, &qb.deriv) {
            (Some(da), Some(db)) => {
                let (da, db) = (da.clone(), db.clone());
                Some(Arc::new(move |x| pa * db(x) + da(x) * pb) as CoeffFn)
            }
            _ => None,
        },
        deriv2: match (&qa.deriv2, &qb.deriv2) {
            (Some(da2), Some(db2)) => {
                let (da2, db2) = (da2.clone(), db2.clone());
                Some(Arc::new(move |x| pa * db2(x) + da2(x) * pb) as CoeffFn)
            }
            _ => None,
        },
    };
    let p0 = MatrixCoeff {
        value: {
            let (qa, qb) = (qa.clone(), qb.clone());
            Arc::new(move |x| pa * qb.eval_deriv(x).expect("checked") + qa.eval(x) * qb.eval(x))
        },
        // (P0)' = P_A Q_B'' + Q_A' Q_B + Q_A Q_B'
        deriv: match (&qa.deriv, &qb.deriv2) {
            (Some(da), Some(db2)) => {
                let (qa2, qb2) = (qa.clone(), qb.clone());
                let (da, db2) = (da.clone(), db2.clone());
                Some(Arc::new(move |x| {
                    pa * db2(x)
                        + da(x) * qb2.eval(x)
                        + qa2.eval(x) * qb2.eval_deriv(x).expect("checked")
                }) as CoeffFn)
            }
            _ => None,
        },
        deriv2: None,
    };
    Ok(SecondOrderOperator { p2: pa * pb, p1, p0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    I,
    X,
    Y,
    Z,
}

/// One of the four involutive symmetries of the operator family, together
/// with its fixed sign characters `s` (on Hamiltonians) and `v` (on
/// intertwiners).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetryTransform(TransformKind);

impl SymmetryTransform {
    pub const I: SymmetryTransform = SymmetryTransform(TransformKind::I);
    pub const X: SymmetryTransform = SymmetryTransform(TransformKind::X);
    pub const Y: SymmetryTransform = SymmetryTransform(TransformKind::Y);
    pub const Z: SymmetryTransform = SymmetryTransform(TransformKind::Z);

    pub const ALL: [SymmetryTransform; 4] = [Self::I, Self::X, Self::Y, Self::Z];

    pub fn kind(self) -> TransformKind {
        self.0
    }

    pub fn s_sign(self) -> f64 {
        match self.0 {
            TransformKind::I | TransformKind::X => 1.0,
            TransformKind::Y | TransformKind::Z => -1.0,
        }
    }

    pub fn v_sign(self) -> f64 {
        match self.0 {
            TransformKind::I | TransformKind::Y => 1.0,
            TransformKind::X | TransformKind::Z => -1.0,
        }
    }
}

impl std::fmt::Display for SymmetryTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self.0 {
            TransformKind::I => "I",
            TransformKind::X => "X",
            TransformKind::Y => "Y",
            TransformKind::Z => "Z",
        };
        write!(f, "{s}")
    }
}

/// Default evaluation window for operator identities: all coefficients in
/// play are within 1e-8 of their asymptotes beyond |x| = 10.
pub fn default_window() -> Grid {
    Grid::new(-10.0, 10.0, 2001).expect("static window")
}
