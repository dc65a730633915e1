//! Symbolic differentiation with light constant folding.

use super::parse::neg;
use super::Node;

fn num(v: f64) -> Node {
    Node::Num(v)
}

fn is_num(n: &Node, v: f64) -> bool {
    matches!(n, Node::Num(w) if *w == v)
}

fn add(a: Node, b: Node) -> Node {
    match (&a, &b) {
        _ if is_num(&a, 0.0) => b,
        _ if is_num(&b, 0.0) => a,
        (Node::Num(x), Node::Num(y)) => num(x + y),
        _ => Node::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Node, b: Node) -> Node {
    match (&a, &b) {
        _ if is_num(&b, 0.0) => a,
        _ if is_num(&a, 0.0) => neg(b),
        (Node::Num(x), Node::Num(y)) => num(x - y),
        _ => Node::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Node, b: Node) -> Node {
    match (&a, &b) {
        _ if is_num(&a, 0.0) || is_num(&b, 0.0) => num(0.0),
        _ if is_num(&a, 1.0) => b,
        _ if is_num(&b, 1.0) => a,
        _ if is_num(&a, -1.0) => neg(b),
        _ if is_num(&b, -1.0) => neg(a),
        (Node::Num(x), Node::Num(y)) => num(x * y),
        _ => Node::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Node, b: Node) -> Node {
    if is_num(&a, 0.0) {
        return num(0.0);
    }
    if is_num(&b, 1.0) {
        return a;
    }
    Node::Div(Box::new(a), Box::new(b))
}

fn pow(a: Node, n: i32) -> Node {
    match n {
        0 => num(1.0),
        1 => a,
        _ => Node::Pow(Box::new(a), n),
    }
}

pub(super) fn diff(node: &Node) -> Node {
    match node {
        Node::Var => num(1.0),
        Node::Imag | Node::Pi | Node::E | Node::Num(_) => num(0.0),
        Node::Neg(a) => neg(diff(a)),
        Node::Add(a, b) => add(diff(a), diff(b)),
        Node::Sub(a, b) => sub(diff(a), diff(b)),
        Node::Mul(a, b) => add(mul(diff(a), (**b).clone()), mul((**a).clone(), diff(b))),
        Node::Div(a, b) => {
            let da = diff(a);
            let db = diff(b);
            if is_num(&db, 0.0) {
                div(da, (**b).clone())
            } else {
                div(
                    sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    pow((**b).clone(), 2),
                )
            }
        }
        Node::Pow(a, n) => mul(mul(num(*n as f64), pow((**a).clone(), n - 1)), diff(a)),
        Node::Sin(a) => mul(Node::Cos(a.clone()), diff(a)),
        Node::Cos(a) => mul(neg(Node::Sin(a.clone())), diff(a)),
        Node::Exp(a) => mul(Node::Exp(a.clone()), diff(a)),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{derivative, parse};
    use num_complex::Complex64;

    #[test]
    fn exponential_map_derivative_is_exponential() {
        let d = derivative(&parse("2*e^((x-1)/2)-1").unwrap(), 1).unwrap();
        for t in [-1.0, 0.0, 0.3, 1.0] {
            let v = d.eval(Complex64::new(t, 0.0)).unwrap();
            assert!((v.re - ((t - 1.0) / 2.0).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn constants_differentiate_to_zero() {
        let d = derivative(&parse("pi*e+3*i").unwrap(), 1).unwrap();
        assert!(d.is_zero_literal());
    }

    #[test]
    fn quotient_rule() {
        let d = derivative(&parse("1/(1+x^2)").unwrap(), 1).unwrap();
        let z = Complex64::new(0.3, 0.2);
        let exact = -2.0 * z / (1.0 + z * z).powi(2);
        assert!((d.eval(z).unwrap() - exact).norm() < 1e-14);
    }
}
