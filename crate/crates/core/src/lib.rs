//! Numerical toolkit for a family of reflectionless 2x2 Zakharov-Shabat
//! operators `H_n = sigma_z d/dx - sigma_x n sech(x)` and everything that
//! hangs off them: the SUSY factorization chain linking them to the
//! potential-free `H_0`, the intertwiners between neighbours, direct
//! scattering (transmission/reflection, bound states), the closed-form
//! sine-Gordon and NLS solitons seeded by these potentials, the Darboux
//! dressing operator, and the sech-pulse two-level atom that maps onto the
//! same spectral problem.

pub mod akulin;
pub mod cli;
pub mod darboux;
pub mod error;
pub mod grid;
pub mod ode;
pub mod operator;
pub mod scattering;
pub mod solitons;
pub mod twolevel;

pub use error::{Error, Result};
pub use grid::{Grid, Scheme, SpinorField};
pub use operator::{FirstOrderOperator, Mat2, MatrixCoeff, SecondOrderOperator, SymmetryTransform};
