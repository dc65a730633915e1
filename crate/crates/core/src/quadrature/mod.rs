//! Special functions, Gauss–Jacobi rules and Chebyshev interpolation.

mod chebyshev;
mod gamma;
mod jacobi;

use thiserror::Error;

use crate::expr::EvalError;

pub use chebyshev::{cheb_derivative, cheb_fit, lobatto_nodes, ChebInterpolant};
pub use gamma::gamma;
pub use jacobi::{graded_jacobi_rule, jacobi_rule, JacobiRule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("gamma is only defined here for positive arguments, got {0}")]
    GammaDomain(f64),
    #[error("Jacobi exponent must lie in (-1, 1), got {0}")]
    ExponentOutOfRange(f64),
    #[error("quadrature order must be at least 1")]
    ZeroOrder,
    #[error("grading must be at least 1")]
    ZeroGrading,
    #[error("an interpolant needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
    #[error("function evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

/// Grading exponent that makes `(t+1)^(1+α)`-type endpoint behaviour smooth
/// in the graded variable: the least `p ≤ 8` with `p·α` an integer, else 8.
pub fn grading_for_order(alpha: f64) -> u32 {
    for p in 1..=8u32 {
        let x = p as f64 * alpha;
        if (x - x.round()).abs() < 1e-9 {
            return p;
        }
    }
    8
}
