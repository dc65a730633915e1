//! Gauss–Jacobi rules on [0, 1] for the weight (1 − τ)^β.
//!
//! Nodes come from the eigenvalues of the Jacobi matrix and are polished by
//! Newton's method on the orthonormal recurrence; weights come from the
//! Christoffel function. Graded rules substitute τ = v^p, which keeps the
//! weight but makes the rule exact for polynomials in τ^{1/p}.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;

use super::{gamma, QuadratureError};

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiRule {
    exponent: f64,
    grading: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl JacobiRule {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn grading(&self) -> u32 {
        self.grading
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to `f`, approximating `∫₀¹ (1−τ)^β f(τ) dτ`.
    pub fn integrate<T, F>(&self, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        let mut acc = T::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(x) * w;
        }
        acc
    }
}

type RuleKey = (u64, usize, u32);

fn cache() -> &'static RwLock<HashMap<RuleKey, Arc<JacobiRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<JacobiRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Gauss–Jacobi rule with `order` nodes for the weight `(1−τ)^exponent`.
pub fn jacobi_rule(exponent: f64, order: usize) -> Result<Arc<JacobiRule>, QuadratureError> {
    graded_jacobi_rule(exponent, order, 1)
}

/// Rule for the same weight after the substitution `τ = v^grading`.
pub fn graded_jacobi_rule(
    exponent: f64,
    order: usize,
    grading: u32,
) -> Result<Arc<JacobiRule>, QuadratureError> {
    if !(exponent > -1.0 && exponent < 1.0) {
        return Err(QuadratureError::ExponentOutOfRange(exponent));
    }
    if order == 0 {
        return Err(QuadratureError::ZeroOrder);
    }
    if grading == 0 {
        return Err(QuadratureError::ZeroGrading);
    }
    let key = (exponent.to_bits(), order, grading);
    if let Some(rule) = cache().read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(build(exponent, order, grading)?);
    cache()
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .entry(key)
        .or_insert_with(|| rule.clone());
    Ok(rule)
}

fn recurrence(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n + 1);
    beta.push(0.0);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        alpha.push(if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        });
    }
    for k in 1..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let bk = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        };
        beta.push(bk);
    }
    (alpha, beta)
}

fn build(exponent: f64, n: usize, grading: u32) -> Result<JacobiRule, QuadratureError> {
    let a = exponent;
    let (alpha, beta) = recurrence(a, 0.0, n);
    let mu0 = 2f64.powf(a + 1.0) * gamma(a + 1.0)? / gamma(a + 2.0)?;

    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = alpha[k];
        if k + 1 < n {
            let off = beta[k + 1].sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let mut xs: Vec<f64> = jm.symmetric_eigenvalues().iter().copied().collect();
    xs.sort_by(|p, q| p.total_cmp(q));

    // Orthonormal values p_0..p_{n-1} plus the unnormalised p_n and its derivative.
    let eval = |x: f64| -> (f64, f64, f64) {
        let mut p_prev = 0.0;
        let mut d_prev = 0.0;
        let mut p = 1.0 / mu0.sqrt();
        let mut d = 0.0;
        let mut sumsq = p * p;
        for k in 0..n {
            let sb = beta[k].sqrt();
            let p_next = (x - alpha[k]) * p - sb * p_prev;
            let d_next = p + (x - alpha[k]) * d - sb * d_prev;
            let scale = if k + 1 < n { beta[k + 1].sqrt() } else { 1.0 };
            p_prev = p;
            d_prev = d;
            p = p_next / scale;
            d = d_next / scale;
            if k + 1 < n {
                sumsq += p * p;
            }
        }
        (p, d, sumsq)
    };

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for x0 in xs {
        let mut x = x0;
        for _ in 0..3 {
            let (p, d, _) = eval(x);
            if d == 0.0 {
                break;
            }
            let step = p / d;
            if !step.is_finite() || step.abs() > 1e-6 {
                break;
            }
            x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        let (_, _, sumsq) = eval(x);
        let w = 1.0 / sumsq;
        let v = 0.5 * (1.0 + x);
        let w01 = w * 2f64.powf(-(a + 1.0));
        if grading == 1 {
            nodes.push(v);
            weights.push(w01);
        } else {
            let p = grading as i32;
            let mut geometric = 0.0;
            let mut vk = 1.0;
            for _ in 0..p {
                geometric += vk;
                vk *= v;
            }
            nodes.push(v.powi(p));
            weights.push(w01 * geometric.powf(a) * p as f64 * v.powi(p - 1));
        }
    }
    Ok(JacobiRule {
        exponent,
        grading,
        nodes,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// B(m+1, c) for integer m ≥ 0 by the product recurrence.
    fn beta_int(m: usize, c: f64) -> f64 {
        let mut b = 1.0 / c;
        for k in 1..=m {
            b *= k as f64 / (k as f64 + c);
        }
        b
    }

    #[test]
    fn weights_sum_to_weight_mass() {
        for order in [1, 2, 5, 16, 64] {
            let r = jacobi_rule(-0.5, order).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13 * 2.0, "order {order}: {s}");
        }
    }

    #[test]
    fn beta_integral_oracle() {
        let r = jacobi_rule(-0.5, 16).unwrap();
        let v = r.integrate(|t| t);
        assert!((v - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn legendre_case() {
        let r = jacobi_rule(0.0, 8).unwrap();
        assert!((r.integrate(|t| t * t) - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.nodes().iter().all(|&t| t > 0.0 && t < 1.0));
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(jacobi_rule(-1.0, 4).is_err());
        assert!(jacobi_rule(1.0, 4).is_err());
        assert!(jacobi_rule(0.2, 0).is_err());
        assert!(graded_jacobi_rule(0.2, 4, 0).is_err());
    }

    #[test]
    fn polynomial_exactness_up_to_twice_order() {
        for &e in &[-0.75, -0.5, -0.25, 0.0, 0.25, 0.5] {
            for &n in &[4usize, 16, 64] {
                let r = jacobi_rule(e, n).unwrap();
                for m in 0..2 * n {
                    let exact = beta_int(m, e + 1.0);
                    let got = r.integrate(|t| t.powi(m as i32));
                    assert!(
                        ((got - exact) / exact).abs() < 1e-12,
                        "e={e} n={n} m={m}: {got} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn graded_rule_is_exact_in_fractional_powers() {
        // ∫ (1−τ)^β τ^{m/p} dτ = B(m/p + 1, β + 1)
        for &(e, p) in &[(-0.5, 2u32), (-0.25, 4), (0.5, 4), (-0.75, 4)] {
            let r = graded_jacobi_rule(e, 24, p).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s - 1.0 / (1.0 + e)).abs() < 1e-13);
            for m in 0..20 {
                let q = m as f64 / p as f64;
                let exact =
                    gamma(q + 1.0).unwrap() * gamma(e + 1.0).unwrap() / gamma(q + e + 2.0).unwrap();
                let got = r.integrate(|t| t.powf(q));
                assert!(((got - exact) / exact).abs() < 1e-12, "e={e} p={p} m={m}");
            }
        }
    }

    #[test]
    fn order_doubling_squares_the_error() {
        // ∫ (1−τ)^{-1/2} e^τ dτ against a high-order reference
        let reference = jacobi_rule(-0.5, 80)
            .unwrap()
            .integrate(|t| (3.0 * t).exp());
        let err =
            |n| (jacobi_rule(-0.5, n).unwrap().integrate(|t| (3.0 * t).exp()) - reference).abs();
        let (e2, e4) = (err(2), err(4));
        assert!(e4 <= 10.0 * e2 * e2, "{e2} {e4}");
    }

    proptest! {
        #[test]
        fn cached_rules_are_shared(e in -0.9f64..0.9, n in 1usize..40) {
            let a = jacobi_rule(e, n).unwrap();
            let b = jacobi_rule(e, n).unwrap();
            prop_assert!(Arc::ptr_eq(&a, &b));
            let s: f64 = a.weights().iter().sum();
            prop_assert!(((s - 1.0 / (1.0 + e)) * (1.0 + e)).abs() < 1e-13);
        }
    }
}
