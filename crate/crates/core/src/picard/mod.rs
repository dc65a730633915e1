//! Picard iteration for the integral form `u = λ + ^cI^α[a·Φ(u∘ψ) + b]`.
//!
//! Iterates live on a graded Chebyshev grid over [−1, 1]. The operator is
//! evaluated at the nodes with a graded Gauss–Jacobi rule and refit, so each
//! step is a fixed linear-cost map of nodal values.

mod lens;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{derivative, EvalError};
use crate::fracops::{caputo_derivative, FracError, FracOrder};
use crate::hypotheses::{
    check_conditions_seeded, contraction_constant, find_s1, lambda_function, sup_norm,
    tau_psi_surrogate, HypothesisError, HypothesisReport, Problem, RadiusEquation, RadiusPair,
    Region, INTERVAL_SAMPLES,
};
use crate::quadrature::{gamma, graded_jacobi_rule, ChebInterpolant, JacobiRule, QuadratureError};

pub use lens::{
    check_tube_inclusion, choose_s2, lens_iterate, omega_step_check, LensIterate, LensOptions,
    LensRun, OmegaStepReport, StageInclusion, TubeInclusionReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PicardError {
    #[error("psi maps t = {t} to {value}, outside [-1, 1]")]
    RangeEscape { t: f64, value: Complex64 },
    #[error("hypothesis ({name}) fails: {statement}; lhs = {lhs:?}, rhs = {rhs:?}")]
    HypothesisFailure {
        name: String,
        statement: String,
        lhs: Option<f64>,
        rhs: Option<f64>,
    },
    #[error("tolerance not reached after {iterations} iterations: bound {bound} > tol {tol}")]
    ToleranceNotReached {
        iterations: usize,
        bound: f64,
        tol: f64,
    },
    #[error("invalid solver option: {0}")]
    InvalidOption(String),
    #[error("inclusion check failed: {0}")]
    InclusionFailure(String),
    #[error("sample {z} escapes the stage-{stage} chart")]
    SampleEscape { stage: u32, z: Complex64 },
    #[error(transparent)]
    Hypothesis(#[from] HypothesisError),
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
}

/// Solver controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub quad_order: usize,
    pub grid_size: usize,
    /// Seed of the randomized growth spot check.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            quad_order: 64,
            grid_size: 129,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), PicardError> {
        if !(self.tol > 0.0) {
            return Err(PicardError::InvalidOption(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.grid_size < 2 || self.quad_order == 0 || self.max_iter == 0 {
            return Err(PicardError::InvalidOption(
                "grid_size >= 2, quad_order >= 1, max_iter >= 1 required".into(),
            ));
        }
        Ok(())
    }
}

/// The operator `T` frozen on a grid: every data value the iteration needs is
/// tabulated once.
pub struct PicardOperator<'p> {
    problem: &'p Problem,
    grid_size: usize,
    grading: u32,
    nodes: Vec<f64>,
    /// `(t_i+1)^α/Γ(α)·w_j·a(s_ij)`, row-major by node.
    a_weights: Vec<Complex64>,
    /// `ψ(s_ij)` in reference coordinates of the working grid.
    psi_y: Vec<f64>,
    /// `λ + (t_i+1)^α/Γ(α)·Σ_j w_j b(s_ij)`.
    offsets: Vec<Complex64>,
    order: usize,
}

impl<'p> PicardOperator<'p> {
    pub fn new(
        problem: &'p Problem,
        grid_size: usize,
        quad_order: usize,
    ) -> Result<Self, PicardError> {
        let alpha = problem.alpha.value();
        let grading = problem.alpha.grading();
        let nodes = ChebInterpolant::nodes_for(-1.0, 1.0, grid_size, grading)?;
        let rule: Arc<JacobiRule> = graded_jacobi_rule(alpha - 1.0, quad_order, grading)?;
        let chart = ChebInterpolant::from_values(
            -1.0,
            1.0,
            grading,
            vec![Complex64::new(0.0, 0.0); grid_size],
        )?;
        let g = gamma(alpha)?;
        let order = rule.order();

        let rows: Vec<(Vec<Complex64>, Vec<f64>, Complex64)> = nodes
            .par_iter()
            .map(|&t| -> Result<_, PicardError> {
                let h = t + 1.0;
                let pref = h.powf(alpha) / g;
                let mut aw = Vec::with_capacity(order);
                let mut py = Vec::with_capacity(order);
                let mut off = problem.lambda;
                if h == 0.0 {
                    return Ok((
                        vec![Complex64::new(0.0, 0.0); order],
                        vec![-1.0; order],
                        off,
                    ));
                }
                for (&tau, &w) in rule.nodes().iter().zip(rule.weights()) {
                    let s = -1.0 + tau * h;
                    let z = Complex64::new(s, 0.0);
                    let psi = problem.psi.eval(z)?;
                    if psi.im.abs() > 1e-12 || psi.re < -1.0 - 1e-12 || psi.re > 1.0 + 1e-12 {
                        return Err(PicardError::RangeEscape { t: s, value: psi });
                    }
                    aw.push(problem.a.eval(z)? * (pref * w));
                    py.push(chart.y_of(psi.re.clamp(-1.0, 1.0)));
                    off += problem.b.eval(z)? * (pref * w);
                }
                Ok((aw, py, off))
            })
            .collect::<Result<_, _>>()?;

        let mut a_weights = Vec::with_capacity(grid_size * order);
        let mut psi_y = Vec::with_capacity(grid_size * order);
        let mut offsets = Vec::with_capacity(grid_size);
        for (aw, py, off) in rows {
            a_weights.extend(aw);
            psi_y.extend(py);
            offsets.push(off);
        }
        Ok(Self {
            problem,
            grid_size,
            grading,
            nodes,
            a_weights,
            psi_y,
            offsets,
            order,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn grading(&self) -> u32 {
        self.grading
    }

    pub fn zero(&self) -> ChebInterpolant {
        ChebInterpolant::from_values(
            -1.0,
            1.0,
            self.grading,
            vec![Complex64::new(0.0, 0.0); self.grid_size],
        )
        .expect("valid grid")
    }

    /// `T(f)` on the working grid; `f` must live on the same grid.
    pub fn apply(&self, f: &ChebInterpolant) -> Result<ChebInterpolant, PicardError> {
        let phi = &self.problem.phi;
        let values: Vec<Complex64> = (0..self.grid_size)
            .into_par_iter()
            .map(|i| -> Result<Complex64, EvalError> {
                let mut acc = self.offsets[i];
                if i == 0 {
                    return Ok(acc);
                }
                let row = i * self.order..(i + 1) * self.order;
                for (aw, &y) in self.a_weights[row.clone()].iter().zip(&self.psi_y[row]) {
                    if *aw != Complex64::new(0.0, 0.0) {
                        acc += aw * phi.eval(f.eval_y(y))?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_, _>>()?;
        Ok(ChebInterpolant::from_values(
            -1.0,
            1.0,
            self.grading,
            values,
        )?)
    }
}

/// One application of `T` on the default grid of `f`.
pub fn apply_t(
    p: &Problem,
    f: &ChebInterpolant,
    quad_order: usize,
) -> Result<ChebInterpolant, PicardError> {
    let op = PicardOperator::new(p, f.len(), quad_order)?;
    let g = if f.grading() == op.grading() && f.lo() == -1.0 && f.hi() == 1.0 {
        f.clone()
    } else {
        f.resample(f.len(), op.grading())?
    };
    op.apply(&g)
}

/// Iteration history.
#[derive(Clone, Debug)]
pub struct PicardState {
    pub n: usize,
    /// `f_0, f_1, …, f_n`.
    pub history: Vec<ChebInterpolant>,
    /// `‖f_{m+1} − f_m‖` for `m < n`.
    pub diff_norm: Vec<f64>,
    /// `‖f_m′‖` for `m ≤ n`.
    pub deriv_norm: Vec<f64>,
    /// `‖f_m‖` for `m ≤ n`.
    pub sup_norm: Vec<f64>,
}

impl PicardState {
    pub fn current(&self) -> &ChebInterpolant {
        self.history.last().expect("history starts with f_0")
    }

    fn start(f0: ChebInterpolant) -> Self {
        Self {
            n: 0,
            deriv_norm: vec![0.0],
            sup_norm: vec![f0.check_norm()],
            history: vec![f0],
            diff_norm: vec![],
        }
    }

    fn push(&mut self, next: ChebInterpolant) -> Result<f64, PicardError> {
        let diff = next.sub(self.current())?.check_norm();
        self.deriv_norm.push(derivative_norm(&next));
        self.sup_norm.push(next.check_norm());
        self.diff_norm.push(diff);
        self.history.push(next);
        self.n += 1;
        Ok(diff)
    }
}

/// Max of |f′| over nodes and reference midpoints.
pub fn derivative_norm(f: &ChebInterpolant) -> f64 {
    let nodal = f
        .nodal_derivatives()
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    f.y_midpoints()
        .iter()
        .map(|&y| f.derivative_at(f.t_of(y)).norm())
        .fold(nodal, f64::max)
}

/// Runs exactly `steps` iterations from `f_0 = 0`.
pub fn iterate_fixed(
    p: &Problem,
    opts: &SolverOptions,
    steps: usize,
) -> Result<PicardState, PicardError> {
    opts.validate()?;
    let op = PicardOperator::new(p, opts.grid_size, opts.quad_order)?;
    let mut state = PicardState::start(op.zero());
    for _ in 0..steps {
        let next = op.apply(state.current())?;
        state.push(next)?;
    }
    Ok(state)
}

/// Derivative-bound bookkeeping for the iterates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeBoundReport {
    /// `K(‖a′‖‖Φ′‖ + ‖b′‖)` as stated for the recurrence.
    pub c1_stated: f64,
    pub bound_stated: f64,
    pub holds_stated: bool,
    /// `K(‖a′‖‖Φ‖ + ‖b′‖)`, the constant the integral estimate actually gives.
    pub c1_rigorous: f64,
    /// `K/(α+1)·‖a‖‖ψ′‖‖Φ′‖`, the coefficient of `‖f_n′‖`.
    pub rho: f64,
    pub bound_rigorous: Option<f64>,
    pub holds_rigorous: Option<bool>,
    pub recurrence_holds: bool,
    pub sup_derivative: f64,
    pub theta: f64,
    pub tail_checked: usize,
    pub tail_holds: bool,
    pub norms: BTreeMap<String, f64>,
}

/// Checks derivative growth of the iterates against the recurrence bounds.
pub fn track_derivative_bounds(
    state: &PicardState,
    p: &Problem,
    r0: f64,
    q: f64,
) -> Result<DerivativeBoundReport, PicardError> {
    let unit = Region::Interval(-1.0, 1.0);
    let ball = Region::Interval(-r0, r0);
    let k = p.kernel_bound();
    let alpha = p.alpha.value();
    let d = |f| derivative(f, 1).expect("order 1");
    let norm_a = sup_norm(&p.a, &unit, INTERVAL_SAMPLES)?;
    let norm_da = sup_norm(&d(&p.a), &unit, INTERVAL_SAMPLES)?;
    let norm_db = sup_norm(&d(&p.b), &unit, INTERVAL_SAMPLES)?;
    let norm_dpsi = sup_norm(&d(&p.psi), &unit, INTERVAL_SAMPLES)?;
    let norm_phi = sup_norm(&p.phi, &ball, INTERVAL_SAMPLES)?;
    let norm_dphi = sup_norm(&d(&p.phi), &ball, INTERVAL_SAMPLES)?;
    let norm_ddphi = sup_norm(
        &derivative(&p.phi, 2).expect("order 2"),
        &ball,
        INTERVAL_SAMPLES,
    )?;

    let c1_stated = k * (norm_da * norm_dphi + norm_db);
    let c1_rigorous = k * (norm_da * norm_phi + norm_db);
    let rho = k / (alpha + 1.0) * norm_a * norm_dpsi * norm_dphi;
    let slack = |v: f64| v * (1.0 + 1e-9) + 1e-12;

    let derivs = &state.deriv_norm;
    let sup_derivative = derivs.iter().copied().fold(0.0, f64::max);
    let bound_stated = if q < 1.0 {
        c1_stated / (1.0 - q)
    } else {
        f64::INFINITY
    };
    let holds_stated = derivs.iter().all(|&v| v <= slack(bound_stated));
    let bound_rigorous = (rho < 1.0).then(|| c1_rigorous / (1.0 - rho));
    let holds_rigorous = bound_rigorous.map(|b| derivs.iter().all(|&v| v <= slack(b)));
    let recurrence_holds = derivs
        .windows(2)
        .skip(1)
        .all(|w| w[1] <= slack(c1_stated + q * w[0]));

    let f1 = state.sup_norm.get(1).copied().unwrap_or(0.0);
    let theta = f1
        * (k * norm_a * norm_dphi
            + k / (alpha + 1.0) * norm_dpsi * norm_a * norm_ddphi * sup_derivative);

    // F_m = f_{m+1} − f_m; check ‖F′_{m+1}‖ ≤ θ m Q^m + ‖F′_1‖ Q^m.
    let mut big_f = Vec::new();
    for w in state.history.windows(2) {
        big_f.push(derivative_norm(&w[1].sub(&w[0])?));
    }
    let mut tail_checked = 0;
    let mut tail_holds = true;
    if big_f.len() > 2 {
        let f1p = big_f[1];
        for m in 1..big_f.len() - 1 {
            if m > 20 {
                break;
            }
            let qm = q.powi(m as i32);
            let bound = theta * m as f64 * qm + f1p * qm;
            tail_checked += 1;
            if big_f[m + 1] > slack(bound) + 1e-13 {
                tail_holds = false;
            }
        }
    }

    let mut norms = BTreeMap::new();
    norms.insert("a_sup_unit".into(), norm_a);
    norms.insert("da_sup_unit".into(), norm_da);
    norms.insert("db_sup_unit".into(), norm_db);
    norms.insert("dpsi_sup_unit".into(), norm_dpsi);
    norms.insert("phi_sup_r0".into(), norm_phi);
    norms.insert("dphi_sup_r0".into(), norm_dphi);
    norms.insert("ddphi_sup_r0".into(), norm_ddphi);
    Ok(DerivativeBoundReport {
        c1_stated,
        bound_stated,
        holds_stated,
        c1_rigorous,
        rho,
        bound_rigorous,
        holds_rigorous,
        recurrence_holds,
        sup_derivative,
        theta,
        tail_checked,
        tail_holds,
        norms,
    })
}

/// Everything a run certifies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub report: Option<HypothesisReport>,
    pub radii: Option<RadiusPair>,
    pub r0: f64,
    pub q: f64,
    pub lambda0: Option<f64>,
    pub tau_psi: Option<f64>,
    pub s1: Option<f64>,
    pub theta: f64,
    pub iterations: usize,
    pub apriori_bound: f64,
    pub aposteriori_bound: f64,
    pub residual_sup: f64,
    pub initial_error: f64,
    pub solution_sup: f64,
    pub max_contraction_ratio: Option<f64>,
    pub derivative_bounds: DerivativeBoundReport,
    pub options: SolverOptions,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub u: ChebInterpolant,
    pub certificate: Certificate,
    pub state: PicardState,
}

/// Constants that drive the iteration: the invariant radius and `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    pub report: Option<HypothesisReport>,
    pub radii: Option<RadiusPair>,
    pub r0: f64,
    pub q: f64,
}

/// Verifies the hypotheses and computes `R₀` and `Q`. When `a ≡ 0` the
/// operator is constant and `Q = 0`.
pub fn certify(p: &Problem, seed: u64) -> Result<Contraction, PicardError> {
    if p.a_vanishes()? {
        let unit = Region::Interval(-1.0, 1.0);
        let norm_b = sup_norm(&p.b, &unit, INTERVAL_SAMPLES)?;
        let r0 = p.kernel_bound() * norm_b + p.lambda.norm();
        return Ok(Contraction {
            report: None,
            radii: None,
            r0,
            q: 0.0,
        });
    }
    let report = check_conditions_seeded(p, seed)?;
    if let Some(c) = report.first_failure() {
        return Err(PicardError::HypothesisFailure {
            name: c.name.to_string(),
            statement: c.statement.to_string(),
            lhs: c.lhs,
            rhs: c.rhs,
        });
    }
    let norm_a = report.norms["a_sup_unit"];
    let norm_b = report.norms["b_sup_unit"];
    let radii = RadiusEquation::new(p, norm_a, norm_b).solve()?;
    let q = contraction_constant(p, radii.r0)?;
    Ok(Contraction {
        report: Some(report),
        r0: radii.r0,
        radii: Some(radii),
        q,
    })
}

/// Grid of `m` points `−1 + 2i/m`, `i = 1..=m`.
pub fn interior_grid(m: usize) -> Vec<f64> {
    (1..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect()
}

/// `max |^cD^α u(t) − a(t)Φ(u(ψ(t))) − b(t)|` over the grid.
pub fn residual(
    p: &Problem,
    u: &ChebInterpolant,
    grid: &[f64],
    quad_order: usize,
) -> Result<f64, PicardError> {
    residual_with(p.alpha, u, grid, quad_order, |t| {
        let z = Complex64::new(t, 0.0);
        let psi = p.psi.eval(z)?;
        let inner = if psi.im == 0.0 {
            u.eval(psi.re)
        } else {
            u.eval_complex(psi)
        };
        Ok(p.a.eval(z)? * p.phi.eval(inner)? + p.b.eval(z)?)
    })
}

/// `max |^cD^α u(t) − rhs(t)|` over the grid, for right-hand sides that are
/// not expressions.
pub fn residual_with<F>(
    alpha: FracOrder,
    u: &ChebInterpolant,
    grid: &[f64],
    quad_order: usize,
    rhs: F,
) -> Result<f64, PicardError>
where
    F: Fn(f64) -> Result<Complex64, PicardError> + Sync,
{
    let vals: Vec<f64> = grid
        .par_iter()
        .map(|&t| Ok((caputo_derivative(u, alpha, t, quad_order)? - rhs(t)?).norm()))
        .collect::<Result<_, PicardError>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Solves the problem and assembles its certificate.
pub fn solve(p: &Problem, opts: &SolverOptions) -> Result<Solution, PicardError> {
    opts.validate()?;
    let contraction = certify(p, opts.seed)?;
    let q = contraction.q;
    let op = PicardOperator::new(p, opts.grid_size, opts.quad_order)?;
    let mut state = PicardState::start(op.zero());
    let mut converged = None;
    for n in 0..opts.max_iter {
        let next = op.apply(state.current())?;
        let diff = state.push(next)?;
        let f1 = state.sup_norm[1];
        let apriori = f1 * q.powi(n as i32 + 1) / (1.0 - q);
        let aposteriori = diff / (1.0 - q);
        if apriori.min(aposteriori) <= opts.tol {
            converged = Some((apriori, aposteriori));
            break;
        }
    }
    let (apriori_bound, aposteriori_bound) = match converged {
        Some(b) => b,
        None => {
            let f1 = state.sup_norm[1];
            let bound = (f1 * q.powi(state.n as i32) / (1.0 - q))
                .min(state.diff_norm.last().copied().unwrap_or(f64::INFINITY) / (1.0 - q));
            return Err(PicardError::ToleranceNotReached {
                iterations: state.n,
                bound,
                tol: opts.tol,
            });
        }
    };

    let u = state.current().clone();
    let residual_sup = residual(p, &u, &interior_grid(64), opts.quad_order)?;
    let initial_error = (u.eval(-1.0) - p.lambda).norm();
    let max_contraction_ratio = state
        .diff_norm
        .windows(2)
        .filter(|w| w[0] > 1e-13)
        .map(|w| w[1] / w[0])
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.max(r)))
        });

    let (lambda0, tau_psi, s1) = if contraction.report.is_some() {
        let lambda0 = lambda_function(p, contraction.r0, 0.0)?;
        let tau = tau_psi_surrogate(&p.psi, p.k, 32, 128)?;
        let s1 = find_s1(p, contraction.r0, tau).ok();
        (Some(lambda0), tau, s1)
    } else {
        (None, None, None)
    };
    let derivative_bounds = track_derivative_bounds(&state, p, contraction.r0, q)?;
    let certificate = Certificate {
        report: contraction.report,
        radii: contraction.radii,
        r0: contraction.r0,
        q,
        lambda0,
        tau_psi,
        s1,
        theta: derivative_bounds.theta,
        iterations: state.n,
        apriori_bound,
        aposteriori_bound,
        residual_sup,
        initial_error,
        solution_sup: u.check_norm(),
        max_contraction_ratio,
        derivative_bounds,
        options: *opts,
    };
    Ok(Solution {
        u,
        certificate,
        state,
    })
}

#[cfg(test)]
mod tests;
