//! Certified Picard solver for nonlinear Caputo fractional functional
//! differential equations
//!
//! ```text
//! ^cD_{-1}^α y(t) = a(t)·Φ(y(ψ(t))) + b(t),   y(-1) = λ,   t ∈ [-1, 1]
//! ```
//!
//! The crate is layered bottom-up: [`expr`] parses the data functions,
//! [`quadrature`] provides Gamma, Gauss–Jacobi rules and Chebyshev
//! interpolants, [`fracops`] builds the Caputo operators on top of them,
//! [`geometry`] models lens sectors and tubes in the complex plane,
//! [`hypotheses`] checks the existence conditions and the contraction
//! constants, [`picard`] runs the fixed-point iteration on the real segment and
//! on shrinking complex sectors, and [`gevrey`] inspects coefficient decay of
//! the computed solution. [`cli`] wires everything into the command-line tool.

// Validation compares with `!(x < y)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod expr;
pub mod fracops;
pub mod geometry;
pub mod gevrey;
pub mod hypotheses;
pub mod picard;
pub mod quadrature;

pub use num_complex::Complex64;
