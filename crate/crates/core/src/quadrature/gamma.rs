//! Lanczos approximation of the Gamma function (g = 7, nine terms).

use std::f64::consts::PI;

use super::QuadratureError;

const G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (k, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    let t = x + G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Γ(x) for `x > 0`.
pub fn gamma(x: f64) -> Result<f64, QuadratureError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(QuadratureError::GammaDomain(x));
    }
    Ok(lanczos(x))
}
