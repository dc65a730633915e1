//! Closed-form analytic expressions in one complex variable.
//!
//! Expressions are built from the variable `x`, real literals, the constants
//! `pi`, `e` and `i`, the four arithmetic operators, integer powers and the
//! entire functions `sin`, `cos` and `exp`. Everything here is holomorphic
//! away from zeros of denominators, which is what the solver needs from its
//! data functions.

mod diff;
mod parse;
mod print;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

pub use parse::ParseError;

/// Expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Var,
    Imag,
    Pi,
    E,
    Num(f64),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Sin(Box<Node>),
    Cos(Box<Node>),
    Exp(Box<Node>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("division by zero in `{subexpr}`")]
    DivisionByZero { subexpr: String },
    #[error("non-finite value at z = {re}{im:+}i")]
    NonFinite { re: f64, im: f64 },
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DerivativeError {
    #[error("derivative order must be 1 or 2, got {0}")]
    UnsupportedOrder(u32),
}

/// Anything that can be evaluated at a complex point.
pub trait Evaluable: Sync {
    fn eval_at(&self, z: Complex64) -> Result<Complex64, EvalError>;
}

impl<F> Evaluable for F
where
    F: Fn(Complex64) -> Result<Complex64, EvalError> + Sync,
{
    fn eval_at(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self(z)
    }
}

/// A parsed expression. Cheap to clone and safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticExpr {
    root: Arc<Node>,
}

impl AnalyticExpr {
    pub fn from_node(node: Node) -> Self {
        Self {
            root: Arc::new(node),
        }
    }

    pub fn constant(v: f64) -> Self {
        Self::from_node(Node::Num(v))
    }

    pub fn node(&self) -> &Node {
        &self.root
    }

    /// True when the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        !self.root.mentions_var()
    }

    /// True when the tree is the literal zero.
    pub fn is_zero_literal(&self) -> bool {
        matches!(*self.root, Node::Num(v) if v == 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        let v = self.root.eval(z)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { re: z.re, im: z.im })
        }
    }

    pub fn eval_real(&self, t: f64) -> Result<Complex64, EvalError> {
        self.eval(Complex64::new(t, 0.0))
    }
}

impl Evaluable for AnalyticExpr {
    fn eval_at(&self, z: Complex64) -> Result<Complex64, EvalError> {
        self.eval(z)
    }
}

impl fmt::Display for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(&self.root))
    }
}

impl std::str::FromStr for AnalyticExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Parses an expression.
pub fn parse(src: &str) -> Result<AnalyticExpr, ParseError> {
    parse::parse(src).map(AnalyticExpr::from_node)
}

/// Evaluates `f` at `z`.
pub fn eval(f: &AnalyticExpr, z: Complex64) -> Result<Complex64, EvalError> {
    f.eval(z)
}

/// Exact symbolic derivative of order 1 or 2.
pub fn derivative(f: &AnalyticExpr, order: u32) -> Result<AnalyticExpr, DerivativeError> {
    match order {
        1 => Ok(AnalyticExpr::from_node(diff::diff(&f.root))),
        2 => Ok(AnalyticExpr::from_node(diff::diff(&diff::diff(&f.root)))),
        other => Err(DerivativeError::UnsupportedOrder(other)),
    }
}

impl Node {
    fn mentions_var(&self) -> bool {
        match self {
            Node::Var => true,
            Node::Imag | Node::Pi | Node::E | Node::Num(_) => false,
            Node::Neg(a) | Node::Pow(a, _) | Node::Sin(a) | Node::Cos(a) | Node::Exp(a) => {
                a.mentions_var()
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.mentions_var() || b.mentions_var()
            }
        }
    }

    fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        Ok(match self {
            Node::Var => z,
            Node::Imag => Complex64::i(),
            Node::Pi => Complex64::from(std::f64::consts::PI),
            Node::E => Complex64::from(std::f64::consts::E),
            Node::Num(v) => Complex64::from(*v),
            Node::Neg(a) => -a.eval(z)?,
            Node::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Node::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Node::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Node::Div(a, b) => {
                let den = b.eval(z)?;
                if den == Complex64::new(0.0, 0.0) {
                    return Err(EvalError::DivisionByZero {
                        subexpr: print::print(b),
                    });
                }
                a.eval(z)? / den
            }
            Node::Pow(a, n) => {
                let base = a.eval(z)?;
                if *n < 0 && base == Complex64::new(0.0, 0.0) {
                    return Err(EvalError::DivisionByZero {
                        subexpr: print::print(self),
                    });
                }
                base.powi(*n)
            }
            Node::Sin(a) => a.eval(z)?.sin(),
            Node::Cos(a) => a.eval(z)?.cos(),
            Node::Exp(a) => a.eval(z)?.exp(),
        })
    }
}
