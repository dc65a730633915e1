//! Existence conditions, the radius equation and the contraction constants.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{derivative, parse, AnalyticExpr, EvalError, ParseError};
use crate::fracops::{FracError, FracOrder};
use crate::geometry::{check_s_property, GeometryError, LensSector, Tube};
use crate::quadrature::lobatto_nodes;

/// Margins at or below this count as failures of strict inequalities.
pub const STRICT_TOL: f64 = 1e-12;
/// Default point count for sup-norms over intervals.
pub const INTERVAL_SAMPLES: usize = 4097;
/// Default per-arc point count for sup-norms over planar regions.
pub const REGION_SAMPLES: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypothesisError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("coefficient a vanishes identically on [-1, 1]")]
    DegenerateCoefficient,
    #[error("radius equation has no real roots: H(t*) = {h_at_peak:.17e} >= 0")]
    NoRealRoots { t_star: Option<f64>, h_at_peak: f64 },
    #[error("contraction constant Q = {q:.17e} is not below 1")]
    NotContractive { q: f64 },
    #[error("s = {s} outside [0, {cap})")]
    LambdaDomain { s: f64, cap: f64 },
    #[error("Lambda(0) = {lambda0:.17e} is not below 1")]
    NoExtensionRadius { lambda0: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A full problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub alpha: FracOrder,
    pub lambda: Complex64,
    pub a: AnalyticExpr,
    pub b: AnalyticExpr,
    pub psi: AnalyticExpr,
    pub phi: AnalyticExpr,
    pub alpha0: f64,
    pub beta0: f64,
    /// Gevrey index of the expected regularity.
    pub k: f64,
    /// Radius of the tube on which a, b, ψ are holomorphic.
    pub sigma: f64,
}

impl Problem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        lambda: Complex64,
        a: AnalyticExpr,
        b: AnalyticExpr,
        psi: AnalyticExpr,
        phi: AnalyticExpr,
        alpha0: f64,
        beta0: f64,
        k: f64,
        sigma: f64,
    ) -> Result<Self, HypothesisError> {
        let alpha = FracOrder::new(alpha)?;
        for (name, v) in [
            ("alpha0", alpha0),
            ("beta0", beta0),
            ("k", k),
            ("sigma", sigma),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(HypothesisError::InvalidProblem(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(HypothesisError::InvalidProblem(
                "lambda must be finite".into(),
            ));
        }
        Ok(Self {
            alpha,
            lambda,
            a,
            b,
            psi,
            phi,
            alpha0,
            beta0,
            k,
            sigma,
        })
    }

    /// `C(x+1)·sin(f(L(x))) + γ·sin(x+1)` with `f(−1) = λ`.
    pub fn example1(
        alpha: f64,
        c: f64,
        gamma_coef: f64,
        lambda: Complex64,
    ) -> Result<Self, HypothesisError> {
        Self::new(
            alpha,
            lambda,
            parse(&format!("{c:?}*(x+1)"))?,
            parse(&format!("{gamma_coef:?}*sin(x+1)"))?,
            parse(EXP_MAP)?,
            parse("sin(x)")?,
            1.0,
            1.0,
            1.0,
            1.0,
        )
    }

    /// `η·sin(x+1)·cos(f(L(x)))` with `f(−1) = λ`.
    pub fn example2(alpha: f64, eta: f64, lambda: Complex64) -> Result<Self, HypothesisError> {
        Self::new(
            alpha,
            lambda,
            parse(&format!("{eta:?}*sin(x+1)"))?,
            parse("0")?,
            parse(EXP_MAP)?,
            parse("cos(x)")?,
            1.0,
            1.0,
            1.0,
            1.0,
        )
    }

    /// `2^α/(αΓ(α))`.
    pub fn kernel_bound(&self) -> f64 {
        self.alpha.kernel_bound()
    }

    /// Sup of |a| over [−1, 1].
    pub fn norm_a(&self) -> Result<f64, HypothesisError> {
        sup_norm(&self.a, &Region::Interval(-1.0, 1.0), INTERVAL_SAMPLES)
    }

    /// True when `a` vanishes on a 64-point grid of [−1, 1].
    pub fn a_vanishes(&self) -> Result<bool, HypothesisError> {
        for t in lobatto_nodes(-1.0, 1.0, 64) {
            if self.a.eval_real(t)?.norm() > 0.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Spot check of `|Φ(z)| ≤ α₀e^{β₀|z|}` on circles of radius 1, 5, 10.
    pub fn growth_check(&self, seed: u64) -> Result<Condition, HypothesisError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for radius in [1.0, 5.0, 10.0] {
            let mut angles: Vec<f64> = (0..64)
                .map(|j| std::f64::consts::TAU * j as f64 / 64.0)
                .collect();
            angles.extend((0..64).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)));
            for th in angles {
                let z = Complex64::from_polar(radius, th);
                let ratio = self.phi.eval(z)?.norm() / (self.alpha0 * (self.beta0 * radius).exp());
                worst = worst.max(ratio);
            }
        }
        Ok(Condition {
            name: "growth",
            statement: "max |Phi(z)| / (alpha0 exp(beta0 |z|)) <= 1 on |z| in {1, 5, 10}",
            passed: worst <= 1.0,
            lhs: Some(worst),
            rhs: Some(1.0),
            margin: Some(1.0 - worst),
        })
    }
}

/// Exponential deviating argument mapping [−1, 1] into itself.
pub const EXP_MAP: &str = "2*e^((x-1)/2)-1";

/// Example 1 admissibility bound on |C|.
pub fn example1_bound(alpha: f64, gamma_coef: f64) -> Result<f64, HypothesisError> {
    let al = FracOrder::new(alpha)?;
    let k = al.kernel_bound();
    let first = 1.0 / (2.0 * k * (k * gamma_coef.abs() + 1.0).exp());
    Ok(first.min((1.0 - gamma_coef.abs()) / 2.0))
}

/// Example 2 admissibility bound on η.
pub fn example2_bound(alpha: f64, lambda: Complex64) -> Result<f64, HypothesisError> {
    let al = FracOrder::new(alpha)?;
    let k = al.kernel_bound();
    Ok((1.0 / (k * (lambda.norm() + 1.0).exp())).min(1.0))
}

/// Region for sup-norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Interval(f64, f64),
    Tube(Tube),
    Sector(LensSector),
}

/// Max of |f| over a sample set of the region closure.
///
/// Intervals use nested Lobatto grids with `2^m + 1 ≥ samples` points and a
/// Newton polish of the discrete maximiser; planar regions use boundary
/// samples plus an interior grid.
pub fn sup_norm(f: &AnalyticExpr, region: &Region, samples: usize) -> Result<f64, HypothesisError> {
    match *region {
        Region::Interval(lo, hi) => interval_sup(f, lo, hi, samples),
        Region::Tube(t) => {
            let mut best = 0f64;
            for z in t.boundary_samples(samples) {
                best = best.max(f.eval(z)?.norm());
            }
            let m = 24;
            for i in 0..=m {
                for j in 0..=m {
                    let z = Complex64::new(
                        t.q1 - t.r + (t.q2 - t.q1 + 2.0 * t.r) * i as f64 / m as f64,
                        -t.r + 2.0 * t.r * j as f64 / m as f64,
                    );
                    if t.distance(z) <= t.r {
                        best = best.max(f.eval(z)?.norm());
                    }
                }
            }
            Ok(best)
        }
        Region::Sector(s) => {
            let mut best = f.eval(Complex64::new(s.q1, 0.0))?.norm();
            for z in s
                .boundary_samples(samples)
                .into_iter()
                .chain(s.interior_samples(24, 24))
            {
                best = best.max(f.eval(z)?.norm());
            }
            Ok(best)
        }
    }
}

fn interval_sup(
    f: &AnalyticExpr,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<f64, HypothesisError> {
    if !(lo <= hi) {
        return Err(HypothesisError::InvalidProblem(format!(
            "empty interval [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(f.eval_real(lo)?.norm());
    }
    let mut m = 2usize;
    while m + 1 < samples {
        m *= 2;
    }
    let grid = lobatto_nodes(lo, hi, m + 1);
    let mut best_t = lo;
    let mut best = -1.0;
    for &t in &grid {
        let v = f.eval_real(t)?.norm();
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let d1 = derivative(f, 1).expect("order 1");
    let d2 = derivative(f, 2).expect("order 2");
    let mut t = best_t;
    for _ in 0..3 {
        let (Ok(v), Ok(dv), Ok(ddv)) = (f.eval_real(t), d1.eval_real(t), d2.eval_real(t)) else {
            break;
        };
        let g1 = 2.0 * (v.conj() * dv).re;
        let g2 = 2.0 * (dv.norm_sqr() + (v.conj() * ddv).re);
        if !(g2 < 0.0) {
            break;
        }
        let next = (t - g1 / g2).clamp(lo, hi);
        let val = f.eval_real(next)?.norm();
        if val > best {
            best = val;
            t = next;
        } else {
            break;
        }
    }
    Ok(best)
}

/// One checked inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// `rhs − lhs` when both sides are defined.
    pub margin: Option<f64>,
}

impl Condition {
    fn strict(
        name: &'static str,
        statement: &'static str,
        lhs: Option<f64>,
        rhs: Option<f64>,
    ) -> Self {
        let margin = match (lhs, rhs) {
            (Some(l), Some(r)) => Some(r - l),
            _ => None,
        };
        Self {
            name,
            statement,
            passed: margin.is_some_and(|m| m > STRICT_TOL),
            lhs,
            rhs,
            margin,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub cond_a: Condition,
    pub cond_b: Condition,
    pub cond_c: Condition,
    pub cond_d: Condition,
    pub cond_e: Condition,
    pub growth: Condition,
    pub t_star: Option<f64>,
    pub kernel_bound: f64,
    pub norms: BTreeMap<String, f64>,
}

impl HypothesisReport {
    pub fn conditions(&self) -> [&Condition; 6] {
        [
            &self.cond_a,
            &self.cond_b,
            &self.cond_c,
            &self.cond_d,
            &self.cond_e,
            &self.growth,
        ]
    }

    pub fn all_passed(&self) -> bool {
        self.conditions().iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions().into_iter().find(|c| !c.passed)
    }
}

/// Evaluates conditions (a)–(e) and the growth spot check.
pub fn check_conditions(p: &Problem) -> Result<HypothesisReport, HypothesisError> {
    check_conditions_seeded(p, 0)
}

pub fn check_conditions_seeded(
    p: &Problem,
    seed: u64,
) -> Result<HypothesisReport, HypothesisError> {
    if p.a_vanishes()? {
        return Err(HypothesisError::DegenerateCoefficient);
    }
    let unit = Region::Interval(-1.0, 1.0);
    let k = p.kernel_bound();
    let norm_a = sup_norm(&p.a, &unit, INTERVAL_SAMPLES)?;
    let norm_b = sup_norm(&p.b, &unit, INTERVAL_SAMPLES)?;
    let abs_lambda = p.lambda.norm();
    let a_left = p.a.eval_real(-1.0)?.norm();
    let b_left = p.b.eval_real(-1.0)?.norm();
    let dpsi = derivative(&p.psi, 1).expect("order 1");
    let norm_dpsi = sup_norm(&dpsi, &unit, INTERVAL_SAMPLES)?;

    let mut norms = BTreeMap::new();
    norms.insert("a_sup_unit".to_string(), norm_a);
    norms.insert("b_sup_unit".to_string(), norm_b);
    norms.insert("a_at_minus_one".to_string(), a_left);
    norms.insert("b_at_minus_one".to_string(), b_left);
    norms.insert("dpsi_sup_unit".to_string(), norm_dpsi);
    norms.insert("lambda_abs".to_string(), abs_lambda);

    let left = a_left.max(b_left);
    let cond_a = Condition {
        name: "a",
        statement: "a(-1) = b(-1) = 0",
        passed: left <= STRICT_TOL,
        lhs: Some(left),
        rhs: Some(0.0),
        margin: Some(-left),
    };

    let eq = RadiusEquation::new(p, norm_a, norm_b);
    let log_arg = (1.0 / (k * p.alpha0 * p.beta0 * norm_a)).ln();
    let t_star = eq.t_star();
    let cond_b = Condition::strict(
        "b",
        "2^a/(a G(a)) |b| + |lambda| < ln(a G(a) / (e alpha0 beta0 2^a |a|)) / beta0",
        Some(k * norm_b + abs_lambda),
        Some((log_arg - 1.0) / p.beta0),
    );

    let (phi_sup, dphi_sup) = match t_star {
        Some(ts) => {
            let region = Region::Interval(-ts, ts);
            let dphi = derivative(&p.phi, 1).expect("order 1");
            let ps = sup_norm(&p.phi, &region, INTERVAL_SAMPLES)?;
            let dps = sup_norm(&dphi, &region, INTERVAL_SAMPLES)?;
            norms.insert("phi_sup_tstar".to_string(), ps);
            norms.insert("dphi_sup_tstar".to_string(), dps);
            (Some(ps), Some(dps))
        }
        None => (None, None),
    };
    let cond_c = Condition::strict(
        "c",
        "|a| |Phi|_[-t*,t*] + |b| < 1",
        phi_sup.map(|v| norm_a * v + norm_b),
        Some(1.0),
    );
    let cond_d = Condition::strict(
        "d",
        "|a| |Phi'|_[-t*,t*] < a G(a) / 2^a",
        dphi_sup.map(|v| norm_a * v),
        Some(1.0 / k),
    );
    let e_margin = 1.0 + p.alpha.value() - norm_dpsi;
    let cond_e = Condition {
        name: "e",
        statement: "|psi'|_[-1,1] <= 1 + a",
        passed: e_margin >= -STRICT_TOL,
        lhs: Some(norm_dpsi),
        rhs: Some(1.0 + p.alpha.value()),
        margin: Some(e_margin),
    };
    let growth = p.growth_check(seed)?;
    Ok(HypothesisReport {
        cond_a,
        cond_b,
        cond_c,
        cond_d,
        cond_e,
        growth,
        t_star,
        kernel_bound: k,
        norms,
    })
}

/// `H(t) = K α₀‖a‖e^{β₀t} + K‖b‖ + |λ| − t` with `K = 2^α/(αΓ(α))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusEquation {
    pub kernel_bound: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub norm_a: f64,
    pub norm_b: f64,
    pub abs_lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusPair {
    pub r0: f64,
    pub r1: f64,
    pub t_star: f64,
    pub h_r0: f64,
    pub h_r1: f64,
}

impl RadiusEquation {
    pub fn new(p: &Problem, norm_a: f64, norm_b: f64) -> Self {
        Self {
            kernel_bound: p.kernel_bound(),
            alpha0: p.alpha0,
            beta0: p.beta0,
            norm_a,
            norm_b,
            abs_lambda: p.lambda.norm(),
        }
    }

    pub fn h(&self, t: f64) -> f64 {
        let k = self.kernel_bound;
        k * self.alpha0 * self.norm_a * (self.beta0 * t).exp() + k * self.norm_b + self.abs_lambda
            - t
    }

    /// Minimiser of `H`, when it is positive.
    pub fn t_star(&self) -> Option<f64> {
        let arg = 1.0 / (self.kernel_bound * self.alpha0 * self.beta0 * self.norm_a);
        let t = arg.ln() / self.beta0;
        (t > 0.0 && t.is_finite()).then_some(t)
    }

    /// Both roots, bracketing the minimiser.
    pub fn solve(&self) -> Result<RadiusPair, HypothesisError> {
        let h0 = self.h(0.0);
        assert!(h0 > 0.0, "H(0) must be positive, got {h0}");
        let Some(ts) = self.t_star() else {
            return Err(HypothesisError::NoRealRoots {
                t_star: None,
                h_at_peak: h0,
            });
        };
        let hp = self.h(ts);
        if !(hp < 0.0) {
            return Err(HypothesisError::NoRealRoots {
                t_star: Some(ts),
                h_at_peak: hp,
            });
        }
        let r0 = bisect(|t| self.h(t), 0.0, ts);
        let mut hi = ts + ts.max(1.0);
        while self.h(hi) <= 0.0 {
            hi = ts + 2.0 * (hi - ts);
        }
        let r1 = bisect(|t| self.h(t), ts, hi);
        Ok(RadiusPair {
            r0,
            r1,
            t_star: ts,
            h_r0: self.h(r0),
            h_r1: self.h(r1),
        })
    }
}

/// Bisection on a sign change, run to floating-point resolution.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo_pos = f(lo) > 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == f_lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Solves the radius equation for a problem.
pub fn solve_radius_equation(p: &Problem) -> Result<RadiusPair, HypothesisError> {
    let unit = Region::Interval(-1.0, 1.0);
    let norm_a = sup_norm(&p.a, &unit, INTERVAL_SAMPLES)?;
    if norm_a == 0.0 {
        return Err(HypothesisError::DegenerateCoefficient);
    }
    let norm_b = sup_norm(&p.b, &unit, INTERVAL_SAMPLES)?;
    RadiusEquation::new(p, norm_a, norm_b).solve()
}

/// `Q = K ‖a‖ ‖Φ′‖_{[−R₀, R₀]}`; fails when `Q ≥ 1`.
pub fn contraction_constant(p: &Problem, r0: f64) -> Result<f64, HypothesisError> {
    let norm_a = p.norm_a()?;
    let dphi = derivative(&p.phi, 1).expect("order 1");
    let q =
        p.kernel_bound() * norm_a * sup_norm(&dphi, &Region::Interval(-r0, r0), INTERVAL_SAMPLES)?;
    if q >= 1.0 - STRICT_TOL {
        return Err(HypothesisError::NotContractive { q });
    }
    Ok(q)
}

/// `Λ(s) = (2+s)^α/(αΓ(α))·max(‖a‖‖Φ′‖, ‖a‖‖Φ‖ + ‖b‖)` with a, b normed on
/// `[−1,1]^s` and Φ, Φ′ on `[−R₀,R₀]_s` (real segments when `s = 0`).
pub fn lambda_function(p: &Problem, r0: f64, s: f64) -> Result<f64, HypothesisError> {
    let cap = p.sigma.min(1.0);
    if !(s >= 0.0 && s < cap) {
        return Err(HypothesisError::LambdaDomain { s, cap });
    }
    let (data_region, phi_region) = if s == 0.0 {
        (Region::Interval(-1.0, 1.0), Region::Interval(-r0, r0))
    } else {
        let phi_region = if r0 > 0.0 {
            Region::Tube(Tube::new(-r0, r0, s)?)
        } else {
            Region::Tube(Tube::new(-s * 1e-9, s * 1e-9, s)?)
        };
        (
            Region::Sector(LensSector::symmetric(-1.0, 1.0, s)?),
            phi_region,
        )
    };
    let samples = if s == 0.0 {
        INTERVAL_SAMPLES
    } else {
        REGION_SAMPLES
    };
    let na = sup_norm(&p.a, &data_region, samples)?;
    let nb = sup_norm(&p.b, &data_region, samples)?;
    let (nphi, ndphi) = if na > 0.0 {
        let dphi = derivative(&p.phi, 1).expect("order 1");
        (
            sup_norm(&p.phi, &phi_region, samples)?,
            sup_norm(&dphi, &phi_region, samples)?,
        )
    } else {
        (0.0, 0.0)
    };
    let a = p.alpha.value();
    let pre = (2.0 + s).powf(a) * p.kernel_bound() / 2f64.powf(a);
    Ok(pre * (na * ndphi).max(na * nphi + nb))
}

/// Largest `s = cap·2^{−j}` (`j ≥ 1`) with `Λ < 1` on every grid point up to it,
/// where `cap = min(1, σ, τ_ψ)`.
pub fn find_s1(p: &Problem, r0: f64, tau_psi: Option<f64>) -> Result<f64, HypothesisError> {
    let lambda0 = lambda_function(p, r0, 0.0)?;
    if lambda0 >= 1.0 {
        return Err(HypothesisError::NoExtensionRadius { lambda0 });
    }
    let cap = p.sigma.min(1.0).min(tau_psi.unwrap_or(f64::INFINITY));
    let mut s1 = None;
    for j in (1..=40).rev() {
        let s = cap * 0.5f64.powi(j);
        if lambda_function(p, r0, s)? < 1.0 {
            s1 = Some(s);
        } else {
            break;
        }
    }
    s1.ok_or(HypothesisError::NoExtensionRadius { lambda0 })
}

/// Numeric stand-in for the sector-inclusion threshold of ψ: the largest
/// `A ∈ {2^{−j}}` for which the inclusion is verified on stages `1..=n_max`.
pub fn tau_psi_surrogate(
    psi: &AnalyticExpr,
    k: f64,
    n_max: u32,
    samples: usize,
) -> Result<Option<f64>, HypothesisError> {
    for j in 0..=10 {
        let a = 0.5f64.powi(j);
        if check_s_property(psi, k, a, 1..=n_max, samples)?.verified() {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gamma;
    use proptest::prelude::*;

    fn ex1() -> Problem {
        Problem::example1(0.5, 0.05, 0.1, Complex64::new(0.0, 0.0)).unwrap()
    }

    #[test]
    fn sup_norm_examples() {
        let unit = Region::Interval(-1.0, 1.0);
        // the maximum of |sin(x+1)| is interior, at x = pi/2 - 1
        let v = sup_norm(&parse("sin(x+1)").unwrap(), &unit, 4097).unwrap();
        assert!((v - 1.0).abs() < 1e-15, "{v}");
        assert_eq!(sup_norm(&parse("3").unwrap(), &unit, 33).unwrap(), 3.0);
        let sector = Region::Sector(LensSector::symmetric(-1.0, 1.0, 0.3).unwrap());
        assert_eq!(sup_norm(&parse("3").unwrap(), &sector, 33).unwrap(), 3.0);
        let v = sup_norm(&parse("0.05*(x+1)").unwrap(), &unit, 4097).unwrap();
        assert!((v - 0.1).abs() < 1e-16);
    }

    #[test]
    fn sup_norm_is_monotone_in_samples() {
        let f = parse("sin(3*x)*exp(x)").unwrap();
        let mut prev = 0.0;
        for n in [3, 9, 33, 129, 513, 4097] {
            let v = sup_norm(&f, &Region::Interval(-1.0, 1.0), n).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn example1_conditions_pass() {
        let rep = check_conditions(&ex1()).unwrap();
        assert!(rep.all_passed(), "{rep:#?}");
        assert!(example1_bound(0.5, 0.1).unwrap() > 0.05);
        assert!((example1_bound(0.5, 0.1).unwrap() - 0.0983).abs() < 1e-4);
    }

    #[test]
    fn condition_a_cases() {
        let mut p = ex1();
        p.a = parse("x+1").unwrap();
        p.b = parse("sin(x+1)").unwrap();
        assert!(check_conditions(&p).unwrap().cond_a.passed);
        p.b = parse("cos(x)").unwrap();
        let c = check_conditions(&p).unwrap().cond_a;
        assert!(!c.passed);
        assert!((c.margin.unwrap() + 1f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn degenerate_coefficient() {
        let mut p = ex1();
        p.a = parse("0*x").unwrap();
        assert_eq!(
            check_conditions(&p),
            Err(HypothesisError::DegenerateCoefficient)
        );
    }

    #[test]
    fn radius_examples() {
        let eq = RadiusEquation {
            kernel_bound: FracOrder::new(0.5).unwrap().kernel_bound(),
            alpha0: 1.0,
            beta0: 1.0,
            norm_a: 0.05,
            norm_b: 0.1,
            abs_lambda: 0.0,
        };
        let r = eq.solve().unwrap();
        assert!(
            (r.r0 - 0.263).abs() < 1e-3
                && (r.r1 - 3.82).abs() < 1e-2
                && (r.t_star - 2.528).abs() < 1e-3,
            "{r:?}"
        );
        assert!(r.h_r0.abs() <= 1e-12 && r.h_r1.abs() <= 1e-12);
        let small = RadiusEquation {
            norm_a: 1e-12,
            norm_b: 0.0,
            ..eq
        };
        assert!(small.solve().unwrap().r0 < 1e-11);
    }

    #[test]
    fn contraction_examples() {
        let p = ex1();
        let r = solve_radius_equation(&p).unwrap();
        let q = contraction_constant(&p, r.r0).unwrap();
        assert!(q <= 1.5958 * 0.1 + 1e-12 && q > 0.15, "{q}");
        let mut lin = ex1();
        lin.phi = parse("x").unwrap();
        let a = 0.5;
        let c = a * gamma(a).unwrap() / 2f64.powf(a) / 2.0;
        lin.a = parse(&format!("{c:?}*(x+1)")).unwrap();
        assert!(matches!(
            contraction_constant(&lin, 0.5),
            Err(HypothesisError::NotContractive { .. })
        ));
    }

    #[test]
    fn lambda_examples() {
        let p = ex1();
        let r0 = solve_radius_equation(&p).unwrap().r0;
        let l0 = lambda_function(&p, r0, 0.0).unwrap();
        let k = p.kernel_bound();
        assert!((l0 - k * (0.1 * r0.sin() + 0.1)).abs() < 1e-12, "{l0}");
        let mut prev = l0;
        for s in [0.01, 0.05, 0.1, 0.2, 0.4, 0.8] {
            let v = lambda_function(&p, r0, s).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(lambda_function(&p, r0, 1.0).is_err());
        let mut zero = ex1();
        zero.a = parse("0").unwrap();
        zero.b = parse("0").unwrap();
        assert_eq!(lambda_function(&zero, 0.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn s1_examples() {
        let p = ex1();
        let r0 = solve_radius_equation(&p).unwrap().r0;
        assert!(find_s1(&p, r0, None).unwrap() > 0.0);
        let mut narrow = ex1();
        narrow.sigma = 1e-3;
        assert!(find_s1(&narrow, r0, None).unwrap() < 1e-3);
        let mut big = ex1();
        big.b = parse("0.9*sin(x+1)").unwrap();
        assert!(matches!(
            find_s1(&big, r0, None),
            Err(HypothesisError::NoExtensionRadius { .. })
        ));
    }

    #[test]
    fn exponential_map_derivative_bound() {
        for alpha in [0.1, 0.5, 0.9] {
            let p = Problem::example1(alpha, 0.01, 0.1, Complex64::new(0.0, 0.0)).unwrap();
            let rep = check_conditions(&p).unwrap();
            assert!(rep.cond_e.passed && (rep.cond_e.lhs.unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn large_c_fails_b() {
        let p = Problem::example1(0.5, 0.2, 0.1, Complex64::new(0.0, 0.0)).unwrap();
        let rep = check_conditions(&p).unwrap();
        assert!(!rep.cond_b.passed && rep.cond_b.margin.unwrap() < 0.0);
        assert_eq!(rep.first_failure().unwrap().name, "b");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn roots_bracket_the_minimum(
            alpha in 0.05f64..0.95, na in 1e-4f64..0.3, nb in 0.0f64..0.3,
            lam in 0.0f64..0.5, a0 in 0.2f64..3.0, b0 in 0.2f64..3.0,
        ) {
            let eq = RadiusEquation {
                kernel_bound: FracOrder::new(alpha).unwrap().kernel_bound(),
                alpha0: a0, beta0: b0, norm_a: na, norm_b: nb, abs_lambda: lam,
            };
            if let Some(ts) = eq.t_star() {
                if eq.h(ts) < 0.0 {
                    let r = eq.solve().unwrap();
                    prop_assert!(r.r0 < ts && ts < r.r1);
                    prop_assert!(r.h_r0.abs() <= 1e-10 && r.h_r1.abs() <= 1e-10);
                    prop_assert!(eq.h(r.r0 - 1e-6) > 0.0 && eq.h(r.r0 + 1e-6) < 0.0);
                }
            }
        }
    }
}
