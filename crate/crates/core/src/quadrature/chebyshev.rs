//! Chebyshev–Gauss–Lobatto interpolants with optional endpoint grading.
//!
//! A graded interpolant lives on `t = lo + (hi − lo)·((y + 1)/2)^p` and is a
//! polynomial in `y`. With `p = 1` this is the ordinary affine map; larger `p`
//! clusters nodes at `lo` and resolves fractional-power behaviour there.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::QuadratureError;
use crate::expr::Evaluable;

#[derive(Clone, Debug, PartialEq)]
pub struct ChebInterpolant {
    lo: f64,
    hi: f64,
    grading: u32,
    y_nodes: Vec<f64>,
    nodes: Vec<f64>,
    values: Vec<Complex64>,
    coeffs: Vec<Complex64>,
    dcoeffs: Vec<Complex64>,
}

/// Lobatto points on [-1, 1] in ascending order.
pub(crate) fn lobatto_points(n: usize) -> Vec<f64> {
    let big_n = (n - 1) as f64;
    (0..n)
        .map(|j| {
            let s = (PI * (2.0 * j as f64 - big_n) / (2.0 * big_n)).sin();
            if j == 0 {
                -1.0
            } else if j == n - 1 {
                1.0
            } else {
                s
            }
        })
        .collect()
}

/// Lobatto points mapped affinely to `[lo, hi]`.
pub fn lobatto_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = lobatto_points(n)
        .iter()
        .map(|&y| lo + 0.5 * (hi - lo) * (y + 1.0))
        .collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

fn bary_weight(j: usize, n: usize) -> f64 {
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    if j == 0 || j == n - 1 {
        0.5 * sign
    } else {
        sign
    }
}

fn values_to_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let big_n = n - 1;
    let table: Vec<f64> = (0..2 * big_n)
        .map(|m| (PI * m as f64 / big_n as f64).cos())
        .collect();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let half = if j == 0 || j == big_n { 0.5 } else { 1.0 };
                acc += v * (half * table[(j * k) % (2 * big_n)]);
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let half = if k == 0 || k == big_n { 0.5 } else { 1.0 };
            acc * (2.0 * half * sign / big_n as f64)
        })
        .collect()
}

fn derivative_coeffs(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return d;
    }
    for k in (0..n - 1).rev() {
        let next = if k + 2 < n {
            d[k + 2]
        } else {
            Complex64::new(0.0, 0.0)
        };
        d[k] = next + c[k + 1] * (2.0 * (k + 1) as f64);
    }
    d[0] *= 0.5;
    d
}

fn clenshaw<T>(c: &[Complex64], y: T) -> Complex64
where
    T: Copy + std::ops::Mul<Complex64, Output = Complex64> + Into<Complex64>,
{
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + y * (b1 * 2.0) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + y * b1 - b2
}

impl ChebInterpolant {
    /// Builds the interpolant from nodal values (ascending node order).
    pub fn from_values(
        lo: f64,
        hi: f64,
        grading: u32,
        values: Vec<Complex64>,
    ) -> Result<Self, QuadratureError> {
        let n = values.len();
        if n < 2 {
            return Err(QuadratureError::TooFewNodes(n));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(QuadratureError::InvalidInterval(lo, hi));
        }
        if grading == 0 {
            return Err(QuadratureError::ZeroGrading);
        }
        let y_nodes = lobatto_points(n);
        let nodes = Self::map_nodes(lo, hi, grading, &y_nodes);
        let coeffs = values_to_coeffs(&values);
        let dcoeffs = derivative_coeffs(&coeffs);
        Ok(Self {
            lo,
            hi,
            grading,
            y_nodes,
            nodes,
            values,
            coeffs,
            dcoeffs,
        })
    }

    /// Samples `f` at the nodes.
    pub fn from_fn<F>(
        lo: f64,
        hi: f64,
        n: usize,
        grading: u32,
        mut f: F,
    ) -> Result<Self, QuadratureError>
    where
        F: FnMut(f64) -> Complex64,
    {
        let nodes = Self::nodes_for(lo, hi, n, grading)?;
        Self::from_values(lo, hi, grading, nodes.iter().map(|&t| f(t)).collect())
    }

    /// Samples a fallible `f` at the nodes.
    pub fn try_from_fn<F, E>(lo: f64, hi: f64, n: usize, grading: u32, mut f: F) -> Result<Self, E>
    where
        F: FnMut(f64) -> Result<Complex64, E>,
        E: From<QuadratureError>,
    {
        let nodes = Self::nodes_for(lo, hi, n, grading)?;
        let values = nodes.iter().map(|&t| f(t)).collect::<Result<Vec<_>, E>>()?;
        Ok(Self::from_values(lo, hi, grading, values)?)
    }

    /// Node positions an interpolant with these parameters would use.
    pub fn nodes_for(
        lo: f64,
        hi: f64,
        n: usize,
        grading: u32,
    ) -> Result<Vec<f64>, QuadratureError> {
        if n < 2 {
            return Err(QuadratureError::TooFewNodes(n));
        }
        if !(lo < hi) {
            return Err(QuadratureError::InvalidInterval(lo, hi));
        }
        if grading == 0 {
            return Err(QuadratureError::ZeroGrading);
        }
        Ok(Self::map_nodes(lo, hi, grading, &lobatto_points(n)))
    }

    fn map_nodes(lo: f64, hi: f64, grading: u32, y_nodes: &[f64]) -> Vec<f64> {
        let n = y_nodes.len();
        y_nodes
            .iter()
            .enumerate()
            .map(|(j, &y)| {
                if j == 0 {
                    lo
                } else if j == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * (0.5 * (y + 1.0)).powi(grading as i32)
                }
            })
            .collect()
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn grading(&self) -> u32 {
        self.grading
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn y_nodes(&self) -> &[f64] {
        &self.y_nodes
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Reference coordinate of `t`.
    pub fn y_of(&self, t: f64) -> f64 {
        let u = ((t - self.lo) / (self.hi - self.lo)).max(0.0);
        if self.grading == 1 {
            2.0 * u - 1.0
        } else {
            2.0 * u.powf(1.0 / self.grading as f64) - 1.0
        }
    }

    /// Physical coordinate of `y`.
    pub fn t_of(&self, y: f64) -> f64 {
        self.lo + (self.hi - self.lo) * (0.5 * (y + 1.0)).powi(self.grading as i32)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if let Some(j) = self.nodes.iter().position(|&x| x == t) {
            return self.values[j];
        }
        self.eval_y(self.y_of(t))
    }

    /// Evaluates in the reference coordinate by the barycentric formula.
    pub fn eval_y(&self, y: f64) -> Complex64 {
        let n = self.values.len();
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 0..n {
            let diff = y - self.y_nodes[j];
            if diff == 0.0 {
                return self.values[j];
            }
            let w = bary_weight(j, n) / diff;
            num += self.values[j] * w;
            den += w;
        }
        num / den
    }

    /// Evaluates the underlying polynomial at a complex reference point.
    pub fn eval_y_complex(&self, y: Complex64) -> Complex64 {
        clenshaw(&self.coeffs, y)
    }

    /// Evaluates a plain interpolant at a complex point.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        if z.im == 0.0 {
            return self.eval(z.re);
        }
        let y = if self.grading == 1 {
            (z - self.lo) * (2.0 / (self.hi - self.lo)) - 1.0
        } else {
            ((z - self.lo) / (self.hi - self.lo)).powf(1.0 / self.grading as f64) * 2.0 - 1.0
        };
        self.eval_y_complex(y)
    }

    fn dy_dt(&self, y: f64) -> f64 {
        let p = self.grading as f64;
        2.0 / (p * (self.hi - self.lo)) * (0.5 * (y + 1.0)).powi(1 - self.grading as i32)
    }

    /// Derivative with respect to `y` at a reference point.
    pub fn derivative_y(&self, y: f64) -> Complex64 {
        clenshaw(&self.dcoeffs, y)
    }

    /// Derivative with respect to `t`.
    ///
    /// For graded interpolants the value at `lo` is extrapolated from the
    /// interior nodal derivatives.
    pub fn derivative_at(&self, t: f64) -> Complex64 {
        if self.grading > 1 && t <= self.lo {
            return self.graded_endpoint_derivative();
        }
        let y = self.y_of(t);
        self.derivative_y(y) * self.dy_dt(y)
    }

    fn graded_endpoint_derivative(&self) -> Complex64 {
        let n = self.values.len();
        let y0 = self.y_nodes[0];
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for j in 1..n {
            let y = self.y_nodes[j];
            let d = self.derivative_y(y) * self.dy_dt(y);
            let w = bary_weight(j, n) * (y - y0) / (y0 - y);
            num += d * w;
            den += w;
        }
        num / den
    }

    /// Nodal values of the derivative.
    pub fn nodal_derivatives(&self) -> Vec<Complex64> {
        let n = self.values.len();
        if self.grading == 1 {
            let s = 2.0 / (self.hi - self.lo);
            return self
                .y_nodes
                .iter()
                .map(|&y| self.derivative_y(y) * s)
                .collect();
        }
        let mut out = Vec::with_capacity(n);
        out.push(self.graded_endpoint_derivative());
        for &y in &self.y_nodes[1..] {
            out.push(self.derivative_y(y) * self.dy_dt(y));
        }
        out
    }

    /// Midpoints in the reference coordinate between consecutive nodes.
    pub fn y_midpoints(&self) -> Vec<f64> {
        self.y_nodes
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    /// Max modulus over the nodes and the reference midpoints.
    pub fn check_norm(&self) -> f64 {
        let at_nodes = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        self.y_midpoints()
            .iter()
            .map(|&y| self.eval_y(y).norm())
            .fold(at_nodes, f64::max)
    }

    /// Pointwise difference of two interpolants on the same grid.
    pub fn sub(&self, other: &Self) -> Result<Self, QuadratureError> {
        if self.lo != other.lo
            || self.hi != other.hi
            || self.grading != other.grading
            || self.len() != other.len()
        {
            return Err(QuadratureError::InvalidInterval(other.lo, other.hi));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_values(self.lo, self.hi, self.grading, values)
    }

    /// Resamples onto another grid.
    pub fn resample(&self, n: usize, grading: u32) -> Result<Self, QuadratureError> {
        Self::from_fn(self.lo, self.hi, n, grading, |t| self.eval(t))
    }
}

/// Interpolates `f` at `n` Chebyshev–Gauss–Lobatto nodes of `[lo, hi]`.
pub fn cheb_fit(
    f: &dyn Evaluable,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<ChebInterpolant, QuadratureError> {
    ChebInterpolant::try_from_fn(lo, hi, n, 1, |t| {
        f.eval_at(Complex64::new(t, 0.0))
            .map_err(QuadratureError::from)
    })
}

/// Spectral derivative on the same grid.
pub fn cheb_derivative(g: &ChebInterpolant) -> ChebInterpolant {
    ChebInterpolant::from_values(g.lo, g.hi, g.grading, g.nodal_derivatives())
        .expect("derivative of a valid interpolant is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, EvalError};
    use proptest::prelude::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn constant_has_single_coefficient() {
        let g = ChebInterpolant::from_fn(-1.0, 1.0, 9, 1, |_| c(7.0)).unwrap();
        assert!((g.coeffs()[0] - c(7.0)).norm() < 1e-14);
        assert!(g.coeffs()[1..].iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn reproduces_basis_polynomial() {
        let g =
            ChebInterpolant::from_fn(-1.0, 1.0, 8, 1, |x| c(4.0 * x * x * x - 3.0 * x)).unwrap();
        for (k, v) in g.coeffs().iter().enumerate() {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((v - c(want)).norm() <= 1e-14, "k={k}: {v}");
        }
    }

    #[test]
    fn exponential_on_dense_grid() {
        let f = parse("exp(x)").unwrap();
        let g = cheb_fit(&f, -1.0, 1.0, 32).unwrap();
        for k in 0..1000 {
            let t = -1.0 + 2.0 * k as f64 / 999.0;
            assert!((g.eval(t) - c(t.exp())).norm() <= 1e-13);
        }
    }

    #[test]
    fn fit_rejects_single_node_and_propagates_failures() {
        let f = parse("x").unwrap();
        assert!(matches!(
            cheb_fit(&f, -1.0, 1.0, 1),
            Err(QuadratureError::TooFewNodes(1))
        ));
        let g = parse("1/x").unwrap();
        assert!(matches!(
            cheb_fit(&g, -1.0, 1.0, 9),
            Err(QuadratureError::Eval(EvalError::DivisionByZero { .. }))
        ));
    }

    #[test]
    fn exact_at_nodes() {
        for grading in [1, 2, 4] {
            let g = ChebInterpolant::from_fn(-1.0, 1.0, 17, grading, |t| c((3.0 * t).sin() + 0.1))
                .unwrap();
            for (t, v) in g.nodes().iter().zip(g.values()) {
                assert_eq!(g.eval(*t), *v);
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let sq = ChebInterpolant::from_fn(-1.0, 1.0, 9, 1, |x| c(x * x)).unwrap();
        let dsq = cheb_derivative(&sq);
        for (t, v) in dsq.nodes().iter().zip(dsq.values()) {
            assert!((v - c(2.0 * t)).norm() < 1e-13);
        }
        let s = ChebInterpolant::from_fn(-1.0, 1.0, 32, 1, |x| c(x.sin())).unwrap();
        let ds = cheb_derivative(&s);
        for k in 0..200 {
            let t = -1.0 + 2.0 * k as f64 / 199.0;
            assert!((ds.eval(t) - c(t.cos())).norm() < 1e-12);
        }
        let k = ChebInterpolant::from_fn(-1.0, 1.0, 12, 1, |_| c(-2.5)).unwrap();
        assert!(cheb_derivative(&k)
            .values()
            .iter()
            .all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn graded_representation_resolves_endpoint_power() {
        // (t+1)^{1.5} is smooth in the square-root graded variable
        let g = ChebInterpolant::from_fn(-1.0, 1.0, 33, 2, |t| c((t + 1.0).powf(1.5))).unwrap();
        for k in 1..300 {
            let t = -1.0 + 2.0 * k as f64 / 300.0;
            assert!((g.eval(t) - c((t + 1.0).powf(1.5))).norm() < 1e-13);
            let d = g.derivative_at(t) - c(1.5 * (t + 1.0).sqrt());
            assert!(d.norm() < 1e-11, "t={t}: {d}");
        }
        assert!(g.derivative_at(-1.0).norm() < 1e-8);
    }

    #[test]
    fn complex_evaluation_matches_polynomial() {
        let g = ChebInterpolant::from_fn(-1.0, 2.0, 20, 1, |t| c(t * t * t - t)).unwrap();
        let z = Complex64::new(0.3, 0.4);
        assert!((g.eval_complex(z) - (z * z * z - z)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn value_coefficient_round_trip(vals in proptest::collection::vec(-10.0f64..10.0, 2..40)) {
            let values: Vec<Complex64> = vals.iter().map(|&v| c(v)).collect();
            let g = ChebInterpolant::from_values(-1.0, 1.0, 1, values.clone()).unwrap();
            for (y, v) in g.y_nodes().iter().zip(&values) {
                let back = clenshaw(g.coeffs(), *y);
                prop_assert!((back - v).norm() <= 1e-13 * 10.0f64.max(1.0));
            }
        }
    }

    #[test]
    fn exponential_tail_decays_geometrically() {
        let g = ChebInterpolant::from_fn(-1.0, 1.0, 40, 1, |t| c(t.exp())).unwrap();
        // fit log|c_n| over the coefficients above the noise floor
        let pts: Vec<(f64, f64)> = g
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 1e-13)
            .map(|(k, v)| (k as f64, v.norm().ln()))
            .collect();
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (sxx, sxy) = pts
            .iter()
            .fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0, a.1 + p.0 * p.1));
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        assert!((-slope).exp() > 2.0, "rho = {}", (-slope).exp());
    }
}
