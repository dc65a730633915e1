//! Planar regions around a real segment: tubes, lens sectors and their
//! shrinking families, plus the sector-inclusion property of a map.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, Evaluable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty stage range")]
    EmptyRange,
    #[error("A = {a} is not admissible: need 0 < A < 1/(mu*l) = {bound}")]
    Inadmissible { a: f64, bound: f64 },
    #[error("inequality still fails at the scan cap n = {0}")]
    BeyondCap(u64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `(3/2)·tan(1) − 1`, the curvature constant of the exponential map.
pub fn mu() -> f64 {
    1.5 * 1f64.tan() - 1.0
}

/// Membership verdict with a signed margin (positive strictly inside).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    pub margin: f64,
}

/// Open neighbourhood `{z : dist(z, [q1, q2]) < r}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tube {
    pub q1: f64,
    pub q2: f64,
    pub r: f64,
}

impl Tube {
    pub fn new(q1: f64, q2: f64, r: f64) -> Result<Self, GeometryError> {
        if !(q1 < q2) || !(r > 0.0) || !r.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "tube [{q1}, {q2}] radius {r}"
            )));
        }
        Ok(Self { q1, q2, r })
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        segment_distance(z, self.q1, self.q2)
    }

    /// Samples on the stadium boundary: two edges and two caps.
    pub fn boundary_samples(&self, per_arc: usize) -> Vec<Complex64> {
        let m = per_arc.max(2);
        let mut out = Vec::with_capacity(4 * m);
        for j in 0..m {
            let x = self.q1 + (self.q2 - self.q1) * j as f64 / (m - 1) as f64;
            out.push(Complex64::new(x, self.r));
            out.push(Complex64::new(x, -self.r));
        }
        for j in 0..m {
            let th = -FRAC_PI_2 + PI * j as f64 / (m - 1) as f64;
            out.push(Complex64::new(self.q2, 0.0) + Complex64::from_polar(self.r, th));
            out.push(Complex64::new(self.q1, 0.0) - Complex64::from_polar(self.r, th));
        }
        out
    }
}

/// Distance from `z` to the real segment `[q1, q2]`.
pub fn segment_distance(z: Complex64, q1: f64, q2: f64) -> f64 {
    let x = z.re.clamp(q1, q2);
    (z - Complex64::new(x, 0.0)).norm()
}

/// `{q1 + s·e^{iθ} : 0 < s < q2 − q1 + radius, |θ| < aperture}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LensSector {
    pub q1: f64,
    pub q2: f64,
    pub aperture: f64,
    pub radius: f64,
}

/// Parameters of the shrinking family: radius and aperture `A·n^{−1/l}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShrinkParams {
    pub l: f64,
    pub a: f64,
    pub n: u32,
}

impl ShrinkParams {
    pub fn new(l: f64, a: f64, n: u32) -> Result<Self, GeometryError> {
        if !(l > 0.0) || !(a > 0.0) || n == 0 || !l.is_finite() || !a.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "l = {l}, A = {a}, n = {n}"
            )));
        }
        Ok(Self { l, a, n })
    }

    pub fn radius(&self) -> f64 {
        self.a * (self.n as f64).powf(-1.0 / self.l)
    }
}

impl LensSector {
    pub fn new(q1: f64, q2: f64, aperture: f64, radius: f64) -> Result<Self, GeometryError> {
        if !(q1 < q2)
            || !(aperture > 0.0 && aperture < PI)
            || !(radius > 0.0)
            || !radius.is_finite()
        {
            return Err(GeometryError::InvalidParameter(format!(
                "sector [{q1}, {q2}] aperture {aperture} radius {radius}"
            )));
        }
        Ok(Self {
            q1,
            q2,
            aperture,
            radius,
        })
    }

    /// `[q1, q2]^r`: aperture equal to radius.
    pub fn symmetric(q1: f64, q2: f64, r: f64) -> Result<Self, GeometryError> {
        Self::new(q1, q2, r, r)
    }

    /// Stage `n` of the shrinking family.
    pub fn shrinking(q1: f64, q2: f64, p: ShrinkParams) -> Result<Self, GeometryError> {
        Self::symmetric(q1, q2, p.radius())
    }

    pub fn outer_radius(&self) -> f64 {
        self.q2 - self.q1 + self.radius
    }

    pub fn point(&self, s: f64, theta: f64) -> Complex64 {
        Complex64::new(self.q1, 0.0) + Complex64::from_polar(s, theta)
    }

    /// Samples on the two rays (apex excluded) and the outer arc.
    pub fn boundary_samples(&self, per_arc: usize) -> Vec<Complex64> {
        let m = per_arc.max(2);
        let big_r = self.outer_radius();
        let mut out = Vec::with_capacity(3 * m);
        for j in 1..=m {
            let s = big_r * j as f64 / m as f64;
            out.push(self.point(s, self.aperture));
            out.push(self.point(s, -self.aperture));
        }
        for j in 0..m {
            let th = -self.aperture + 2.0 * self.aperture * j as f64 / (m - 1) as f64;
            out.push(self.point(big_r, th));
        }
        out
    }

    /// Tensor grid strictly inside, uniform in `(s, θ)`.
    pub fn interior_samples(&self, radial: usize, angular: usize) -> Vec<Complex64> {
        let big_r = self.outer_radius();
        let mut out = Vec::with_capacity(radial * angular);
        for i in 0..radial {
            let s = big_r * (i as f64 + 0.5) / radial as f64;
            for j in 0..angular {
                let th = self.aperture * (2.0 * (j as f64 + 0.5) / angular as f64 - 1.0);
                out.push(self.point(s, th));
            }
        }
        out
    }
}

pub fn sector_membership(z: Complex64, sector: &LensSector) -> Membership {
    let w = z - sector.q1;
    let s = w.norm();
    if s == 0.0 {
        return Membership {
            inside: false,
            margin: 0.0,
        };
    }
    let radial = sector.outer_radius() - s;
    let slack = sector.aperture - w.arg().abs();
    let angular = s * slack.clamp(-FRAC_PI_2, FRAC_PI_2).sin();
    let margin = radial.min(angular);
    Membership {
        inside: margin > 0.0,
        margin,
    }
}

pub fn tube_membership(z: Complex64, tube: &Tube) -> Membership {
    let margin = tube.r - tube.distance(z);
    Membership {
        inside: margin > 0.0,
        margin,
    }
}

/// Outcome of the tube-in-sector inclusion test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionReport {
    pub holds: bool,
    pub worst_margin: f64,
    pub samples: usize,
}

/// Checks `[d, q2]_{l,r,n} ⊂ [q1, q2]^{l,r,n}` on boundary samples of the tube.
///
/// The closed tube touches the outer arc at `q2 + r_n`, so the test accepts
/// margins down to `-1e-12`.
pub fn tangent_inclusion_check(
    d: f64,
    q1: f64,
    q2: f64,
    l: f64,
    r: f64,
    n: u32,
    samples: usize,
) -> Result<InclusionReport, GeometryError> {
    if !(d > q1 && d <= q2) {
        return Err(GeometryError::InvalidParameter(format!(
            "d = {d} must lie in ({q1}, {q2}]"
        )));
    }
    if !(r > 0.0 && r < d - q1) {
        return Err(GeometryError::InvalidParameter(format!(
            "r = {r} must lie in (0, {})",
            d - q1
        )));
    }
    let p = ShrinkParams::new(l, r, n)?;
    let rn = p.radius();
    let sector = LensSector::shrinking(q1, q2, p)?;
    let pts = if d < q2 {
        Tube::new(d, q2, rn)?.boundary_samples(samples)
    } else {
        (0..samples.max(4))
            .map(|j| {
                Complex64::new(d, 0.0)
                    + Complex64::from_polar(rn, 2.0 * PI * j as f64 / samples.max(4) as f64)
            })
            .collect()
    };
    let worst = pts
        .iter()
        .map(|&z| sector_membership(z, &sector).margin)
        .fold(f64::INFINITY, f64::min);
    Ok(InclusionReport {
        holds: worst >= -1e-12,
        worst_margin: worst,
        samples: pts.len(),
    })
}

/// Per-stage outcome of the sector-inclusion property.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageMargin {
    pub n: u32,
    pub worst_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SPropertyReport {
    pub l: f64,
    pub a: f64,
    pub samples_per_arc: usize,
    pub stages: Vec<StageMargin>,
    /// Least `N` with every stage `n ∈ [N, max]` passing, if any.
    pub threshold: Option<u32>,
}

impl SPropertyReport {
    pub fn verified(&self) -> bool {
        self.threshold.is_some()
    }
}

/// Checks that `ψ` maps `∂[−1,1]^{l,A,n+1}` strictly inside `[−1,1]^{l,A,n}`.
///
/// Verified at the given boundary resolution only.
pub fn check_s_property(
    psi: &dyn Evaluable,
    l: f64,
    a: f64,
    n_range: RangeInclusive<u32>,
    samples_per_arc: usize,
) -> Result<SPropertyReport, GeometryError> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo == 0 || lo > hi {
        return Err(GeometryError::EmptyRange);
    }
    let mut stages = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        let outer = LensSector::shrinking(-1.0, 1.0, ShrinkParams::new(l, a, n)?)?;
        let inner = LensSector::shrinking(-1.0, 1.0, ShrinkParams::new(l, a, n + 1)?)?;
        let mut worst = f64::INFINITY;
        for z in inner.boundary_samples(samples_per_arc) {
            let w = psi.eval_at(z)?;
            worst = worst.min(sector_membership(w, &outer).margin);
        }
        stages.push(StageMargin {
            n,
            worst_margin: worst,
        });
    }
    let mut threshold = None;
    for st in stages.iter().rev() {
        if st.worst_margin > 0.0 {
            threshold = Some(st.n);
        } else {
            break;
        }
    }
    Ok(SPropertyReport {
        l,
        a,
        samples_per_arc,
        stages,
        threshold,
    })
}

/// Sufficient stage threshold for the exponential map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpMapThreshold {
    pub n: u64,
    pub mu: f64,
    pub cap: u64,
}

/// Least `N` with `(1+1/n)^{−1/l} + μA/n ≤ 1` for every `n ∈ [N, cap]`.
pub fn exp_map_threshold(l: f64, a: f64) -> Result<ExpMapThreshold, GeometryError> {
    const CAP: u64 = 1_000_000;
    if !(l > 0.0 && l <= 1.0) {
        return Err(GeometryError::InvalidParameter(format!(
            "l = {l} must lie in (0, 1]"
        )));
    }
    let m = mu();
    let bound = 1.0 / (m * l);
    if !(a > 0.0 && a < bound) {
        return Err(GeometryError::Inadmissible { a, bound });
    }
    let mut last_fail = 0u64;
    for n in 1..=CAP {
        let nf = n as f64;
        if (1.0 + 1.0 / nf).powf(-1.0 / l) + m * a / nf > 1.0 {
            last_fail = n;
        }
    }
    if last_fail == CAP {
        return Err(GeometryError::BeyondCap(CAP));
    }
    Ok(ExpMapThreshold {
        n: last_fail + 1,
        mu: m,
        cap: CAP,
    })
}
