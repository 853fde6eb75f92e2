//! Uniform grids, sampled complex 2-spinor fields, finite-difference
//! differentiation and the residual norms every verification is built on.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform spatial sampling of `[x_min, x_max]` with at least 8 points.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    num_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, num_points: usize) -> Result<Grid> {
        if num_points < 8 {
            return Err(Error::InvalidArgument(format!(
                "num_points = {num_points}, need at least 8"
            )));
        }
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Grid { x_min, x_max, num_points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.num_points - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(|k| self.point(k))
    }

    /// Sub-grid covering the central `frac` of the interval (by index).
    pub fn interior(&self, frac: f64) -> Grid {
        let skip = ((self.num_points as f64) * (1.0 - frac) / 2.0).ceil() as usize;
        let lo = skip.min(self.num_points / 2 - 1);
        let hi = self.num_points - 1 - lo;
        Grid {
            x_min: self.point(lo),
            x_max: self.point(hi),
            num_points: hi - lo + 1,
        }
    }
}

/// Differentiation scheme: central stencil of formal order 4 or 8,
/// one-sided stencils of the same order at the boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Central4,
    Central8,
}

impl Scheme {
    fn accuracy(self) -> usize {
        match self {
            Scheme::Central4 => 4,
            Scheme::Central8 => 8,
        }
    }
}

/// A complex 2-component field sampled on a [`Grid`].
#[derive(Clone, Debug)]
pub struct SpinorField {
    grid: Grid,
    values: Vec<[Complex64; 2]>,
}

impl SpinorField {
    pub fn new(grid: Grid, values: Vec<[Complex64; 2]>) -> Result<SpinorField> {
        if values.len() != grid.num_points() {
            return Err(Error::GridMismatch(format!(
                "{} values on a {}-point grid",
                values.len(),
                grid.num_points()
            )));
        }
        let field = SpinorField { grid, values };
        if !field.is_finite() {
            return Err(Error::InvalidArgument("non-finite field entry".into()));
        }
        Ok(field)
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> [Complex64; 2]) -> Result<SpinorField> {
        let values = grid.points().map(&f).collect();
        SpinorField::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> SpinorField {
        let n = grid.num_points();
        SpinorField { grid, values: vec![[Complex64::ZERO; 2]; n] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[[Complex64; 2]] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }

    /// Discrete L2 norm (no h weight; it cancels in every relative measure).
    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|v| v.iter())
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: Complex64) -> SpinorField {
        SpinorField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| [v[0] * s, v[1] * s]).collect(),
        }
    }

    /// Restriction to the central `frac` of the grid.
    pub fn interior(&self, frac: f64) -> SpinorField {
        let sub = self.grid.interior(frac);
        let h = self.grid.spacing();
        let lo = ((sub.x_min() - self.grid.x_min()) / h).round() as usize;
        let values = self.values[lo..lo + sub.num_points()].to_vec();
        SpinorField { grid: sub, values }
    }

    /// Pointwise derivative of formal order 4 or 8 for `order` in {1, 2}.
    pub fn differentiate(&self, order: u32, scheme: Scheme) -> Result<SpinorField> {
        if order != 1 && order != 2 {
            return Err(Error::InvalidArgument(format!("derivative order {order}")));
        }
        let acc = scheme.accuracy();
        let n = self.grid.num_points();
        // one-sided stencils get `order - 1` extra nodes over the centered
        // width to keep the same formal order
        let w_side = acc + order as usize;
        if w_side > n {
            return Err(Error::InvalidArgument(format!(
                "stencil of {w_side} nodes does not fit a {n}-point grid"
            )));
        }
        let h = self.grid.spacing();
        let hk = h.powi(order as i32);
        let r = acc / 2;
        let center_weights = fornberg(0.0, &offsets_centered(r), order as usize);
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let (start, weights) = if i >= r && i + r < n {
                (i - r, &center_weights)
            } else {
                let start = if i < r { 0 } else { n - w_side };
                let offs: Vec<f64> =
                    (0..w_side).map(|j| (start + j) as f64 - i as f64).collect();
                values.push(stencil_apply(
                    &self.values,
                    start,
                    &fornberg(0.0, &offs, order as usize),
                    hk,
                ));
                continue;
            };
            values.push(stencil_apply(&self.values, start, weights, hk));
        }
        SpinorField::new(self.grid.clone(), values)
    }
}

fn offsets_centered(r: usize) -> Vec<f64> {
    (0..=2 * r).map(|j| j as f64 - r as f64).collect()
}

fn stencil_apply(
    values: &[[Complex64; 2]],
    start: usize,
    weights: &[f64],
    hk: f64,
) -> [Complex64; 2] {
    let mut out = [Complex64::ZERO; 2];
    for (j, &w) in weights.iter().enumerate() {
        out[0] += values[start + j][0] * w;
        out[1] += values[start + j][1] * w;
    }
    [out[0] / hk, out[1] / hk]
}

/// Fornberg weights for the `m`-th derivative at `x0` from nodes `xs`
/// (B. Fornberg, Math. Comp. 51, 1988).
fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

const TINY: f64 = 1e-300;

/// `||f - g||_2 / max(||f||_2, ||g||_2, tiny)` on a shared grid.
pub fn rel_residual(f: &SpinorField, g: &SpinorField) -> Result<f64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch("rel_residual on different grids".into()));
    }
    let diff: f64 = f
        .values
        .iter()
        .zip(&g.values)
        .flat_map(|(a, b)| [(a[0] - b[0]).norm_sqr(), (a[1] - b[1]).norm_sqr()])
        .sum::<f64>()
        .sqrt();
    Ok(diff / f.norm().max(g.norm()).max(TINY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_grid_rejects_small_and_inverted() {
        assert!(Grid::new(-1.0, 1.0, 3).is_err());
        assert!(Grid::new(1.0, -1.0, 11).is_err());
    }

    #[test]
    fn make_grid_exact_spacing() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        assert_eq!(g.spacing(), 0.1);
        assert_eq!(g.point(10), 1.0);
        let g = Grid::new(-25.0, 25.0, 4001).unwrap();
        assert_eq!(g.spacing(), 0.0125);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = Grid::new(-1.0, 1.0, 64).unwrap();
        let f = SpinorField::from_fn(g, |_| [c(2.0, -1.0), c(0.5, 3.0)]).unwrap();
        for scheme in [Scheme::Central4, Scheme::Central8] {
            let d = f.differentiate(1, scheme).unwrap();
            assert!(d.norm() < 1e-11, "norm = {}", d.norm());
        }
    }

    #[test]
    fn plane_wave_derivative_central8() {
        let g = Grid::new(-1.0, 1.0, 2001).unwrap(); // h = 1e-3
        let k = 1.0;
        let f = SpinorField::from_fn(g, |x| [(Complex64::I * k * x).exp(), c(0.0, 0.0)])
            .unwrap();
        let d = f.differentiate(1, Scheme::Central8).unwrap();
        let exact = f.scale(Complex64::I * k);
        let max_err = d
            .values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a[0] - b[0]).norm().max((a[1] - b[1]).norm()))
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-8, "max_err = {max_err:e}");
    }

    #[test]
    fn tanh_derivative_is_sech_squared() {
        let g = Grid::new(-5.0, 5.0, 2001).unwrap();
        let f = SpinorField::from_fn(g.clone(), |x| [c(x.tanh(), 0.0), c(0.0, 0.0)]).unwrap();
        let d = f.differentiate(1, Scheme::Central8).unwrap();
        let exact =
            SpinorField::from_fn(g, |x| [c(1.0 / x.cosh().powi(2), 0.0), c(0.0, 0.0)]).unwrap();
        assert!(rel_residual(&d, &exact).unwrap() < 1e-10);
    }

    #[test]
    fn second_derivative_of_sine() {
        // h = 0.01: second differences amplify rounding by 1/h^2, so a
        // too-fine grid would drown the truncation error in noise
        let g = Grid::new(-2.0, 2.0, 401).unwrap();
        let f = SpinorField::from_fn(g.clone(), |x| [c(x.sin(), 0.0), c(0.0, 0.0)]).unwrap();
        let d2 = f.differentiate(2, Scheme::Central8).unwrap();
        let exact = SpinorField::from_fn(g, |x| [c(-x.sin(), 0.0), c(0.0, 0.0)]).unwrap();
        assert!(rel_residual(&d2, &exact).unwrap() < 1e-10);
    }

    #[test]
    fn order_of_accuracy_on_plane_wave() {
        // halving h must cut the max error by at least 2^order * 0.9
        for (scheme, order) in [(Scheme::Central4, 4.0f64), (Scheme::Central8, 8.0f64)] {
            let err = |n: usize| {
                let g = Grid::new(-1.0, 1.0, n).unwrap();
                let f = SpinorField::from_fn(g, |x| {
                    [(Complex64::I * 3.0 * x).exp(), c(0.0, 0.0)]
                })
                .unwrap();
                let d = f.differentiate(1, scheme).unwrap();
                let exact = f.scale(Complex64::I * 3.0);
                d.values()
                    .iter()
                    .zip(exact.values())
                    .map(|(a, b)| (a[0] - b[0]).norm())
                    .fold(0.0f64, f64::max)
            };
            // coarse grids keep both errors above the rounding floor
            let e1 = err(51);
            let e2 = err(101);
            assert!(
                e1 / e2 >= 2.0f64.powf(order) * 0.9,
                "{scheme:?}: ratio {} too small",
                e1 / e2
            );
        }
    }

    #[test]
    fn rel_residual_examples() {
        let g = Grid::new(0.0, 1.0, 16).unwrap();
        let f = SpinorField::from_fn(g.clone(), |x| [c(x, 0.0), c(1.0, x)]).unwrap();
        assert_eq!(rel_residual(&f, &f).unwrap(), 0.0);
        let twice = f.scale(c(2.0, 0.0));
        assert!((rel_residual(&f, &twice).unwrap() - 0.5).abs() < 1e-15);
        let z = SpinorField::zeros(g.clone());
        assert_eq!(rel_residual(&z, &z).unwrap(), 0.0);
        let other = SpinorField::zeros(Grid::new(0.0, 2.0, 16).unwrap());
        assert!(rel_residual(&f, &other).is_err());
    }

    proptest! {
        // D(a f + b g) = a Df + b Dg up to rounding
        #[test]
        fn differentiate_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0.5f64..4.0) {
            let g = Grid::new(-1.0, 1.0, 301).unwrap();
            let f1 = SpinorField::from_fn(g.clone(), |x| [c((k*x).sin(), x), c(x*x, 0.0)]).unwrap();
            let f2 = SpinorField::from_fn(g.clone(), |x| [c((k*x).cos(), 0.0), c(0.0, x.exp())]).unwrap();
            let lin = SpinorField::from_fn(g, |x| {
                let v1 = [c((k*x).sin(), x), c(x*x, 0.0)];
                let v2 = [c((k*x).cos(), 0.0), c(0.0, x.exp())];
                [v1[0]*a + v2[0]*b, v1[1]*a + v2[1]*b]
            }).unwrap();
            let lhs = lin.differentiate(1, Scheme::Central8).unwrap();
            let d1 = f1.differentiate(1, Scheme::Central8).unwrap();
            let d2 = f2.differentiate(1, Scheme::Central8).unwrap();
            let rhs = SpinorField::new(
                lhs.grid().clone(),
                d1.values().iter().zip(d2.values())
                    .map(|(u, v)| [u[0]*a + v[0]*b, u[1]*a + v[1]*b]).collect(),
            ).unwrap();
            prop_assert!(rel_residual(&lhs, &rhs).unwrap() < 1e-12);
        }
    }
}
