//! Picard iterates continued into the shrinking lens sectors around [−1, 1].
//!
//! Stage `n` lives on `S_n = [−1,1]^{k,s₂,n}` and is stored on a polar chart
//! about the apex: `z = −1 + ρe^{iθ}` with `ρ` graded like the real grid and
//! `θ ∈ [−r_n, r_n]`. Stage `n+1` is produced by integrating along rays, with
//! stage `n` read back at `ψ(ζ)` through its chart.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::PicardError;
use crate::geometry::{check_s_property, segment_distance, LensSector, ShrinkParams};
use crate::hypotheses::Problem;
use crate::quadrature::{gamma, graded_jacobi_rule, JacobiRule};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Relative slack for chart lookups of points on the closed sector boundary.
const CHART_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LensOptions {
    pub n_max: u32,
    pub quad_order: usize,
    /// Chart nodes along rays.
    pub radial: usize,
    /// Chart nodes across the aperture.
    pub angular: usize,
    /// Boundary samples per arc used by the inclusion checks.
    pub samples_per_arc: usize,
}

impl Default for LensOptions {
    fn default() -> Self {
        Self {
            n_max: 10,
            quad_order: 64,
            radial: 65,
            angular: 17,
            samples_per_arc: 128,
        }
    }
}

fn lobatto(n: usize) -> Vec<f64> {
    let mut y: Vec<f64> = (0..n)
        .map(|j| -(std::f64::consts::PI * j as f64 / (n - 1) as f64).cos())
        .collect();
    y[0] = -1.0;
    y[n - 1] = 1.0;
    if n % 2 == 1 {
        y[n / 2] = 0.0;
    }
    y
}

fn bary_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                0.5 * s
            } else {
                s
            }
        })
        .collect()
}

/// Barycentric basis values at `x`; exact Kronecker row at a node.
fn basis(nodes: &[f64], weights: &[f64], x: f64, out: &mut Vec<f64>) {
    out.clear();
    if let Some(k) = nodes.iter().position(|&v| v == x) {
        out.extend((0..nodes.len()).map(|j| if j == k { 1.0 } else { 0.0 }));
        return;
    }
    let mut den = 0.0;
    for (&v, &w) in nodes.iter().zip(weights) {
        let c = w / (x - v);
        out.push(c);
        den += c;
    }
    out.iter_mut().for_each(|c| *c /= den);
}

/// Tensor Chebyshev chart over a closed stage sector.
#[derive(Clone, Debug, PartialEq)]
struct PolarChart {
    rho_max: f64,
    theta_max: f64,
    grading: u32,
    y: Vec<f64>,
    x: Vec<f64>,
    wy: Vec<f64>,
    wx: Vec<f64>,
    /// Row-major, radial index outer.
    values: Vec<Complex64>,
}

impl PolarChart {
    fn new(sector: &LensSector, grading: u32, radial: usize, angular: usize) -> Self {
        Self {
            rho_max: sector.outer_radius(),
            theta_max: sector.aperture,
            grading,
            y: lobatto(radial),
            x: lobatto(angular),
            wy: bary_weights(radial),
            wx: bary_weights(angular),
            values: vec![ZERO; radial * angular],
        }
    }

    fn node(&self, i: usize, j: usize) -> Complex64 {
        let rho = self.rho_max * ((self.y[i] + 1.0) / 2.0).powi(self.grading as i32);
        Complex64::new(-1.0, 0.0) + Complex64::from_polar(rho, self.theta_max * self.x[j])
    }

    fn nodes(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.values.len());
        for i in 0..self.y.len() {
            for j in 0..self.x.len() {
                out.push(self.node(i, j));
            }
        }
        out
    }

    /// Chart coordinates of `z`, or `None` outside the closed sector.
    fn coords(&self, z: Complex64) -> Option<(f64, f64)> {
        let w = z + 1.0;
        let rho = w.norm();
        if rho <= 1e-15 * self.rho_max {
            return Some((-1.0, 0.0));
        }
        let theta = w.arg();
        if rho > self.rho_max * (1.0 + CHART_SLACK)
            || theta.abs() > self.theta_max * (1.0 + CHART_SLACK) + 1e-15
        {
            return None;
        }
        let r = (rho / self.rho_max).min(1.0);
        let y = 2.0 * r.powf(1.0 / self.grading as f64) - 1.0;
        let x = (theta / self.theta_max).clamp(-1.0, 1.0);
        Some((y, x))
    }

    fn eval(&self, z: Complex64) -> Option<Complex64> {
        let (y, x) = self.coords(z)?;
        let (mut by, mut bx) = (Vec::new(), Vec::new());
        basis(&self.y, &self.wy, y, &mut by);
        basis(&self.x, &self.wx, x, &mut bx);
        let m = self.x.len();
        let mut acc = ZERO;
        for (i, &cy) in by.iter().enumerate() {
            if cy == 0.0 {
                continue;
            }
            let row = &self.values[i * m..(i + 1) * m];
            let inner: Complex64 = row.iter().zip(&bx).map(|(v, &c)| v * c).sum();
            acc += inner * cy;
        }
        Some(acc)
    }
}

/// One stage `ω_n` on its sector.
#[derive(Clone, Debug, PartialEq)]
pub struct LensIterate {
    pub n: u32,
    pub domain: LensSector,
    chart: PolarChart,
}

impl LensIterate {
    /// Chart nodes of the stage.
    pub fn nodes(&self) -> Vec<Complex64> {
        self.chart.nodes()
    }

    /// Stored values at [`LensIterate::nodes`].
    pub fn values(&self) -> &[Complex64] {
        &self.chart.values
    }

    /// Interpolated `ω_n(z)`; `None` outside the closed sector.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        self.chart.eval(z)
    }

    /// Boundary and interior points used by the inclusion checks.
    pub fn sample_points(&self, per_arc: usize) -> Vec<Complex64> {
        let mut pts = self.domain.boundary_samples(per_arc);
        pts.extend(self.domain.interior_samples(16, 8));
        pts
    }
}

/// The sequence `ω_1, …, ω_{n_max}`.
#[derive(Clone, Debug)]
pub struct LensRun {
    pub s2: f64,
    pub k: f64,
    pub options: LensOptions,
    pub iterates: Vec<LensIterate>,
    /// `sup |ω₂ − ω₁|` over `S₁`.
    pub first_step_norm: f64,
}

struct Integrator<'a> {
    p: &'a Problem,
    rule: std::sync::Arc<JacobiRule>,
    gamma_alpha: f64,
}

impl Integrator<'_> {
    /// `λ + (z+1)^α/Γ(α)·Σ w_j [a(ζ_j)Φ(prev(ψ(ζ_j))) + b(ζ_j)]`.
    fn step<F>(&self, z: Complex64, stage: u32, prev: F) -> Result<Complex64, PicardError>
    where
        F: Fn(Complex64) -> Option<Complex64>,
    {
        let h = z + 1.0;
        if h.norm() == 0.0 {
            return Ok(self.p.lambda);
        }
        let alpha = self.p.alpha.value();
        let mut acc = ZERO;
        for (&tau, &w) in self.rule.nodes().iter().zip(self.rule.weights()) {
            let zeta = Complex64::new(-1.0, 0.0) + h * tau;
            let a = self.p.a.eval(zeta)?;
            let mut term = self.p.b.eval(zeta)?;
            if a != ZERO {
                let target = self.p.psi.eval(zeta)?;
                let inner = prev(target).ok_or(PicardError::SampleEscape { stage, z: target })?;
                term += a * self.p.phi.eval(inner)?;
            }
            acc += term * w;
        }
        Ok(self.p.lambda + h.powf(alpha) / self.gamma_alpha * acc)
    }
}

/// Builds `ω_1 ≡ 0, …, ω_{n_max}` on the sectors `[−1,1]^{k,s₂,n}`.
///
/// Fails unless ψ maps each stage-`(n+1)` sector into stage `n` for every
/// `n < n_max`.
pub fn lens_iterate(p: &Problem, s2: f64, opts: &LensOptions) -> Result<LensRun, PicardError> {
    if !(s2 > 0.0 && s2 < 1.0) || opts.n_max < 2 || opts.radial < 2 || opts.angular < 2 {
        return Err(PicardError::InvalidOption(format!(
            "lens run with s2 = {s2}, n_max = {}",
            opts.n_max
        )));
    }
    let incl = check_s_property(&p.psi, p.k, s2, 1..=opts.n_max, opts.samples_per_arc)?;
    if incl.threshold != Some(1) {
        let worst = incl
            .stages
            .iter()
            .map(|s| s.worst_margin)
            .fold(f64::INFINITY, f64::min);
        return Err(PicardError::InclusionFailure(format!(
            "psi does not map stage n+1 into stage n for all n <= {} at s2 = {s2} (worst margin {worst:e})",
            opts.n_max
        )));
    }
    let alpha = p.alpha.value();
    let grading = p.alpha.grading();
    let integ = Integrator {
        p,
        rule: graded_jacobi_rule(alpha - 1.0, opts.quad_order, grading)?,
        gamma_alpha: gamma(alpha)?,
    };
    let sector = |n: u32| -> Result<LensSector, PicardError> {
        Ok(LensSector::shrinking(
            -1.0,
            1.0,
            ShrinkParams::new(p.k, s2, n)?,
        )?)
    };

    let first = LensIterate {
        n: 1,
        domain: sector(1)?,
        chart: PolarChart::new(&sector(1)?, grading, opts.radial, opts.angular),
    };
    let zero = |_z: Complex64| Some(ZERO);
    let mut s1_pts = first.nodes();
    s1_pts.extend(first.sample_points(opts.samples_per_arc));
    let first_step_norm = s1_pts
        .par_iter()
        .map(|&z| integ.step(z, 1, zero).map(|v| v.norm()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut iterates = vec![first];
    for n in 2..=opts.n_max {
        let domain = sector(n)?;
        let mut chart = PolarChart::new(&domain, grading, opts.radial, opts.angular);
        let prev = &iterates.last().expect("stage 1 present").chart;
        chart.values = chart
            .nodes()
            .par_iter()
            .map(|&z| integ.step(z, n - 1, |w| prev.eval(w)))
            .collect::<Result<_, _>>()?;
        iterates.push(LensIterate { n, domain, chart });
    }
    Ok(LensRun {
        s2,
        k: p.k,
        options: *opts,
        iterates,
        first_step_norm,
    })
}

/// Worst tube margin of one stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageInclusion {
    pub n: u32,
    pub tube_radius: f64,
    pub worst_margin: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TubeInclusionReport {
    pub r0: f64,
    pub stages: Vec<StageInclusion>,
    pub holds: bool,
}

/// Checks `ω_n(S_n) ⊂ {w : dist(w, [−R₀,R₀]) < s₂n^{−1/k}}` on chart nodes
/// and boundary samples.
pub fn check_tube_inclusion(
    iterates: &[LensIterate],
    r0: f64,
    k: f64,
    s2: f64,
    per_arc: usize,
) -> TubeInclusionReport {
    let stages: Vec<StageInclusion> = iterates
        .par_iter()
        .map(|it| {
            let radius = s2 * (it.n as f64).powf(-1.0 / k);
            let mut vals: Vec<Complex64> = it.values().to_vec();
            vals.extend(
                it.sample_points(per_arc)
                    .into_iter()
                    .filter_map(|z| it.eval(z)),
            );
            let worst = vals
                .iter()
                .map(|&v| radius - segment_distance(v, -r0, r0))
                .fold(f64::INFINITY, f64::min);
            StageInclusion {
                n: it.n,
                tube_radius: radius,
                worst_margin: worst,
                samples: vals.len(),
            }
        })
        .collect();
    let holds = stages.iter().all(|s| s.worst_margin > 0.0);
    TubeInclusionReport { r0, stages, holds }
}

/// Stage norms of `Ω_n = ω_{n+1} − ω_n` against the geometric bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaStepReport {
    pub lambda_s2: f64,
    pub first_step_norm: f64,
    /// `‖Ω_n‖` over stage `n+1`, for `n = 1, 2, …`.
    pub norms: Vec<f64>,
    /// `‖ω₂ − ω₁‖·Λ(s₂)^{n−1}`.
    pub bounds: Vec<f64>,
    /// `‖Ω_{n+1}‖/‖Ω_n‖` while both exceed the noise floor.
    pub ratios: Vec<f64>,
    pub noise_floor: f64,
    pub bound_holds: bool,
    pub ratio_holds: bool,
}

/// Compares stage norms with `‖ω₂−ω₁‖Λ^{n−1}` and consecutive ratios with `Λ`.
pub fn omega_step_check(run: &LensRun, lambda_s2: f64, noise_floor: f64) -> OmegaStepReport {
    let slack = 1.0 + 1e-6;
    let norms: Vec<f64> = run
        .iterates
        .windows(2)
        .map(|w| {
            let (cur, next) = (&w[0], &w[1]);
            let mut pts = next.nodes();
            pts.extend(next.sample_points(run.options.samples_per_arc));
            pts.par_iter()
                .filter_map(|&z| Some((next.eval(z)? - cur.eval(z)?).norm()))
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    let bounds: Vec<f64> = (0..norms.len())
        .map(|i| run.first_step_norm * lambda_s2.powi(i as i32))
        .collect();
    let bound_holds = norms
        .iter()
        .zip(&bounds)
        .all(|(&v, &b)| v <= b * slack + noise_floor);
    let ratios: Vec<f64> = norms
        .windows(2)
        .take_while(|w| w[0] > noise_floor && w[1] > noise_floor)
        .map(|w| w[1] / w[0])
        .collect();
    let ratio_holds = ratios.iter().all(|&r| r <= lambda_s2 * slack);
    OmegaStepReport {
        lambda_s2,
        first_step_norm: run.first_step_norm,
        norms,
        bounds,
        ratios,
        noise_floor,
        bound_holds,
        ratio_holds,
    }
}

/// `s₂ = ½·min(s₁, 1, 1+d)`, halved until the sector inclusion holds from
/// stage 1 up to `n_max`.
pub fn choose_s2(p: &Problem, s1: f64, d: f64, opts: &LensOptions) -> Result<f64, PicardError> {
    if !(d > -1.0 && d < 1.0) {
        return Err(PicardError::InvalidOption(format!(
            "d = {d} must lie in (-1, 1)"
        )));
    }
    let mut s2 = 0.5 * s1.min(1.0).min(1.0 + d);
    for _ in 0..30 {
        if check_s_property(&p.psi, p.k, s2, 1..=opts.n_max, opts.samples_per_arc)?.threshold
            == Some(1)
        {
            return Ok(s2);
        }
        s2 *= 0.5;
    }
    Err(PicardError::InclusionFailure(format!(
        "no admissible s2 below {}",
        0.5 * s1
    )))
}
