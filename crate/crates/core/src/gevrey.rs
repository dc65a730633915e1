//! Regularity diagnostic: Chebyshev-coefficient decay of a solution on `[d, 1]`.
//!
//! The magnitudes `|c_n|` are replaced by their tail envelope `max_{m≥n}|c_m|`
//! and fitted to `log₁₀ A − rate·n^γ`, so rates and misfits are in decades. The fit is descriptive: it quantifies how
//! smoothness degrades toward the left endpoint and certifies nothing.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::quadrature::{ChebInterpolant, QuadratureError};

/// Coefficients at or below this are treated as noise.
pub const NOISE_FLOOR: f64 = 1e-13;
/// Fewer coefficients above the floor than this and no fit is attempted.
pub const MIN_FIT_POINTS: usize = 8;
pub const GAMMA_MAX: f64 = 1.5;
/// Threshold reported as `first_below`.
pub const SMALL_COEFF: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GevreyError {
    #[error("left endpoint d = {0} must lie in (-1, 1)")]
    InvalidEndpoint(f64),
    #[error("need at least {MIN_FIT_POINTS} coefficients, got {0}")]
    TooFewCoefficients(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Least-squares fit of `log₁₀ env_n ≈ log₁₀ A − rate·n^γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StretchedFit {
    pub gamma: f64,
    pub rate: f64,
    pub log_amplitude: f64,
    /// RMS misfit in decades.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub d: f64,
    pub n_coeffs: usize,
    pub n_above_floor: usize,
    /// `None` when the function is too simple to fit.
    pub fit: Option<StretchedFit>,
    /// Best fit with `γ = 1`, comparable across intervals.
    pub geometric_rate: Option<f64>,
    /// First index whose envelope is below [`SMALL_COEFF`].
    pub first_below: Option<usize>,
    pub coefficients: Vec<f64>,
}

impl DecayFit {
    pub fn too_simple(&self) -> bool {
        self.fit.is_none()
    }
}

/// Linear least squares of `ys ≈ c − rate·xs`; returns `(c, rate, rms)`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - c - slope * x).powi(2))
        .sum();
    (c, -slope, (rss / n).sqrt())
}

fn fit_at(ns: &[f64], logs: &[f64], gamma: f64) -> StretchedFit {
    let xs: Vec<f64> = ns.iter().map(|n| n.powf(gamma)).collect();
    let (c, rate, residual) = line_fit(&xs, logs);
    StretchedFit {
        gamma,
        rate,
        log_amplitude: c,
        residual,
    }
}

/// Grid search over `γ ∈ (0, 1.5]` refined by golden section.
fn stretched_fit(ns: &[f64], logs: &[f64]) -> StretchedFit {
    let grid: Vec<f64> = (1..=30).map(|i| GAMMA_MAX * i as f64 / 30.0).collect();
    let best = grid
        .iter()
        .map(|&g| fit_at(ns, logs, g))
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .expect("grid is non-empty");
    let step = GAMMA_MAX / 30.0;
    let (mut lo, mut hi) = (
        (best.gamma - step).max(1e-3),
        (best.gamma + step).min(GAMMA_MAX),
    );
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if fit_at(ns, logs, m1).residual <= fit_at(ns, logs, m2).residual {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let refined = fit_at(ns, logs, 0.5 * (lo + hi));
    if refined.residual <= best.residual {
        refined
    } else {
        best
    }
}

/// Decay fit of `u` restricted to `[d, 1]` from an `n_coeffs`-point Chebyshev fit.
pub fn coefficient_decay(
    u: &ChebInterpolant,
    d: f64,
    n_coeffs: usize,
) -> Result<DecayFit, GevreyError> {
    if !(d > -1.0 && d < 1.0) {
        return Err(GevreyError::InvalidEndpoint(d));
    }
    if n_coeffs < MIN_FIT_POINTS {
        return Err(GevreyError::TooFewCoefficients(n_coeffs));
    }
    let restricted = ChebInterpolant::from_fn(d, 1.0, n_coeffs, 1, |t| u.eval(t))?;
    let coefficients: Vec<f64> = restricted.coeffs().iter().map(|c| c.norm()).collect();
    let mut envelope = coefficients.clone();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let first_below = envelope.iter().position(|&v| v < SMALL_COEFF);
    let (ns, logs): (Vec<f64>, Vec<f64>) = envelope
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &v)| v > NOISE_FLOOR)
        .map(|(i, &v)| (i as f64, v.log10()))
        .unzip();
    let n_above_floor = ns.len();
    let (fit, geometric_rate) = if n_above_floor < MIN_FIT_POINTS {
        (None, None)
    } else {
        (
            Some(stretched_fit(&ns, &logs)),
            Some(fit_at(&ns, &logs, 1.0).rate),
        )
    };
    Ok(DecayFit {
        d,
        n_coeffs,
        n_above_floor,
        fit,
        geometric_rate,
        first_below,
        coefficients,
    })
}

/// Decay fits on `[d, 1]` for each `d`, in the given order.
pub fn endpoint_contrast(
    u: &ChebInterpolant,
    d_list: &[f64],
    n_coeffs: usize,
) -> Result<Vec<DecayFit>, GevreyError> {
    d_list
        .par_iter()
        .map(|&d| coefficient_decay(u, d, n_coeffs))
        .collect()
}
