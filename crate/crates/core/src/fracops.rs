//! Caputo fractional integral and derivative with lower terminal −1.
//!
//! Both operators are evaluated after the substitution `s = −1 + τ(t+1)`,
//! which turns the weakly singular kernel into the Jacobi weight
//! `(1−τ)^{α−1}` (integral) or `(1−τ)^{−α}` (derivative).

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{EvalError, Evaluable};
use crate::quadrature::{
    gamma, graded_jacobi_rule, grading_for_order, jacobi_rule, ChebInterpolant, JacobiRule,
    QuadratureError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("fractional order must lie in (0, 1), got {0}")]
    OrderOutOfRange(f64),
    #[error("evaluation point {0} lies outside [-1, 1]")]
    PointOutsideDomain(f64),
    #[error("the Caputo derivative at t = -1 is a right limit; use the endpoint estimate")]
    EndpointLimit,
    #[error("interpolant must start at -1, got lower end {0}")]
    WrongLowerTerminal(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Fractional order α ∈ (0, 1).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self, FracError> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(FracError::OrderOutOfRange(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Grading that resolves `(t+1)^α` endpoint terms.
    pub fn grading(self) -> u32 {
        grading_for_order(self.0)
    }

    /// `2^α / (α Γ(α))`, the sup of the integral kernel mass over [−1, 1].
    pub fn kernel_bound(self) -> f64 {
        let a = self.0;
        2f64.powf(a) / (a * gamma(a).expect("alpha > 0"))
    }
}

fn check_point(t: f64) -> Result<(), FracError> {
    if (-1.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(FracError::PointOutsideDomain(t))
    }
}

/// `^cI^α f(t)` with a plain Gauss–Jacobi rule of the given order.
pub fn caputo_integral(
    f: &dyn Evaluable,
    alpha: FracOrder,
    t: f64,
    order: usize,
) -> Result<Complex64, FracError> {
    check_point(t)?;
    let rule = jacobi_rule(alpha.value() - 1.0, order)?;
    caputo_integral_with_rule(f, alpha, Complex64::new(t, 0.0), &rule)
}

/// `^cI^α f(z)` along the segment from −1 to `z`, principal branch of `(z+1)^α`.
pub fn complex_caputo_integral(
    f: &dyn Evaluable,
    alpha: FracOrder,
    z: Complex64,
    order: usize,
) -> Result<Complex64, FracError> {
    let rule = jacobi_rule(alpha.value() - 1.0, order)?;
    caputo_integral_with_rule(f, alpha, z, &rule)
}

/// Caputo integral with a caller-supplied rule for the weight `(1−τ)^{α−1}`.
pub fn caputo_integral_with_rule(
    f: &dyn Evaluable,
    alpha: FracOrder,
    z: Complex64,
    rule: &JacobiRule,
) -> Result<Complex64, FracError> {
    let h = z + 1.0;
    if h == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (&tau, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc += f.eval_at(h * tau - 1.0)? * w;
    }
    Ok(acc * h.powf(alpha.value()) / gamma(alpha.value())?)
}

/// `^cD^α u(t)` for `t ∈ (−1, hi]`, using the spectral derivative of `u`.
pub fn caputo_derivative(
    u: &ChebInterpolant,
    alpha: FracOrder,
    t: f64,
    order: usize,
) -> Result<Complex64, FracError> {
    if u.lo() != -1.0 {
        return Err(FracError::WrongLowerTerminal(u.lo()));
    }
    if t == -1.0 {
        return Err(FracError::EndpointLimit);
    }
    if !(t > -1.0 && t <= u.hi()) {
        return Err(FracError::PointOutsideDomain(t));
    }
    let rule = graded_jacobi_rule(-alpha.value(), order, u.grading())?;
    let h = t + 1.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&tau, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc += u.derivative_at(-1.0 + tau * h) * w;
    }
    let a = alpha.value();
    Ok(acc * h.powf(1.0 - a) / gamma(1.0 - a)?)
}

/// Right limit of `^cD^α u` at −1, extrapolated from `t = −1 + 10^{−3}·2^{−j}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointEstimate {
    pub value: Complex64,
    /// Always true: the value is an extrapolation, not a quadrature result.
    pub is_estimate: bool,
}

pub fn caputo_derivative_endpoint(
    u: &ChebInterpolant,
    alpha: FracOrder,
    order: usize,
) -> Result<EndpointEstimate, FracError> {
    let hs: Vec<f64> = (0..7).map(|j| 1e-3 * 0.5f64.powi(j)).collect();
    let mut table = hs
        .iter()
        .map(|&h| caputo_derivative(u, alpha, -1.0 + h, order))
        .collect::<Result<Vec<_>, _>>()?;
    // Neville's scheme evaluated at h = 0
    let m = hs.len();
    for level in 1..m {
        for i in 0..m - level {
            let (hi, hj) = (hs[i], hs[i + level]);
            table[i] = (table[i + 1] * hi - table[i] * hj) / (hi - hj);
        }
    }
    Ok(EndpointEstimate {
        value: table[0],
        is_estimate: true,
    })
}

/// `(^cI ∘ ^cD) u (t)`. The outer integral uses the graded rule matching `u`.
pub fn integral_of_derivative(
    u: &ChebInterpolant,
    alpha: FracOrder,
    t: f64,
    order: usize,
) -> Result<Complex64, FracError> {
    check_point(t)?;
    if t == -1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = graded_jacobi_rule(alpha.value() - 1.0, order, alpha.grading().max(u.grading()))?;
    let inner = |s: Complex64| -> Result<Complex64, EvalError> {
        caputo_derivative(u, alpha, s.re, order).map_err(|e| EvalError::Other(e.to_string()))
    };
    caputo_integral_with_rule(&inner, alpha, Complex64::new(t, 0.0), &rule)
}

/// Graded interpolant of `^cI^α f` on [−1, 1] with `n` nodes.
pub fn integral_interpolant(
    f: &dyn Evaluable,
    alpha: FracOrder,
    n: usize,
    order: usize,
) -> Result<ChebInterpolant, FracError> {
    let rule = jacobi_rule(alpha.value() - 1.0, order)?;
    ChebInterpolant::try_from_fn(-1.0, 1.0, n, alpha.grading(), |t| {
        caputo_integral_with_rule(f, alpha, Complex64::new(t, 0.0), &rule)
    })
}

/// `(^cD ∘ ^cI) f (t)` with the intermediate function held at `n` graded nodes.
pub fn derivative_of_integral(
    f: &dyn Evaluable,
    alpha: FracOrder,
    t: f64,
    order: usize,
    n: usize,
) -> Result<Complex64, FracError> {
    let g = integral_interpolant(f, alpha, n, order)?;
    caputo_derivative(&g, alpha, t, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn alpha(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.0).is_err());
        assert!(FracOrder::new(0.3).is_ok());
    }

    #[test]
    fn integral_examples() {
        let one = parse("1").unwrap();
        let v = caputo_integral(&one, alpha(0.5), 1.0, 16).unwrap();
        assert!((v - c(2f64.sqrt() / gamma(1.5).unwrap())).norm() < 1e-14);
        assert!((v.re - 1.5957691).abs() < 1e-7);
        let f = parse("sin(x)+3").unwrap();
        assert_eq!(caputo_integral(&f, alpha(0.5), -1.0, 16).unwrap(), c(0.0));
        let lin = parse("x+1").unwrap();
        let v = caputo_integral(&lin, alpha(0.5), 0.0, 16).unwrap();
        assert!((v.re - 0.7522528).abs() < 1e-7);
        assert!(matches!(
            caputo_integral(&lin, alpha(0.5), 1.5, 16),
            Err(FracError::PointOutsideDomain(_))
        ));
    }

    #[test]
    fn derivative_examples() {
        let a = alpha(0.5);
        let lin = ChebInterpolant::from_fn(-1.0, 1.0, 9, 1, |t| c(t + 1.0)).unwrap();
        let v = caputo_derivative(&lin, a, 1.0, 16).unwrap();
        assert!((v.re - 1.5957691).abs() < 1e-7);
        let k = ChebInterpolant::from_fn(-1.0, 1.0, 9, 1, |_| c(4.0)).unwrap();
        for t in [-0.5, 0.0, 1.0] {
            assert!(caputo_derivative(&k, a, t, 16).unwrap().norm() < 1e-12);
        }
        let sq = ChebInterpolant::from_fn(-1.0, 1.0, 9, 1, |t| c((t + 1.0).powi(2))).unwrap();
        let v = caputo_derivative(&sq, a, 0.0, 16).unwrap();
        assert!((v.re - 2.0 / gamma(2.5).unwrap()).abs() < 1e-13, "{v}");
        assert!((v.re - 1.5045057).abs() < 1e-6);
        assert!(matches!(
            caputo_derivative(&sq, a, -1.0, 16),
            Err(FracError::EndpointLimit)
        ));
        assert!(matches!(
            caputo_derivative(&sq, a, 1.2, 16),
            Err(FracError::PointOutsideDomain(_))
        ));
    }

    #[test]
    fn endpoint_estimate_is_flagged_and_small() {
        let sq = ChebInterpolant::from_fn(-1.0, 1.0, 9, 1, |t| c((t + 1.0).powi(2))).unwrap();
        let e = caputo_derivative_endpoint(&sq, alpha(0.5), 32).unwrap();
        assert!(e.is_estimate);
        assert!(e.value.norm() < 1e-3);
    }

    #[test]
    fn complex_examples() {
        let a = alpha(0.5);
        let one = parse("1").unwrap();
        let v = complex_caputo_integral(&one, a, c(1.0), 16).unwrap();
        assert!((v.re - 1.5957691).abs() < 1e-7);
        let z = Complex64::new(-1.0, 1.0);
        let v = complex_caputo_integral(&one, a, z, 16).unwrap();
        let want = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4) / gamma(1.5).unwrap();
        assert!((v - want).norm() < 1e-14);
        let zero = parse("0").unwrap();
        assert_eq!(
            complex_caputo_integral(&zero, a, Complex64::new(0.2, 0.1), 8).unwrap(),
            c(0.0)
        );
        assert_eq!(
            complex_caputo_integral(&one, a, c(-1.0), 8).unwrap(),
            c(0.0)
        );
    }

    #[test]
    fn kernel_bound_value() {
        assert!(
            (alpha(0.5).kernel_bound() - 2f64.sqrt() / (0.5 * std::f64::consts::PI.sqrt())).abs()
                < 1e-14
        );
    }
}
