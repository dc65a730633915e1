//! Precedence-aware printer whose output parses back to the same tree.

use super::Node;

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

pub(super) fn print(node: &Node) -> String {
    let mut out = String::new();
    write(node, 0, &mut out);
    out
}

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => SUM,
        Node::Mul(..) | Node::Div(..) => PRODUCT,
        Node::Neg(_) => UNARY,
        Node::Num(v) if v.is_sign_negative() => UNARY,
        Node::Pow(..) => POWER,
        _ => ATOM,
    }
}

fn write(node: &Node, min: u8, out: &mut String) {
    let wrap = precedence(node) < min;
    if wrap {
        out.push('(');
    }
    match node {
        Node::Var => out.push('x'),
        Node::Imag => out.push('i'),
        Node::Pi => out.push_str("pi"),
        Node::E => out.push('e'),
        Node::Num(v) => {
            if v.is_sign_negative() {
                out.push('-');
            }
            out.push_str(&format!("{}", v.abs()));
        }
        Node::Neg(a) => {
            out.push('-');
            write(a, POWER, out);
        }
        Node::Add(a, b) => binary(a, b, "+", SUM, out),
        Node::Sub(a, b) => binary(a, b, "-", SUM, out),
        Node::Mul(a, b) => binary(a, b, "*", PRODUCT, out),
        Node::Div(a, b) => binary(a, b, "/", PRODUCT, out),
        Node::Pow(a, n) => {
            write(a, ATOM, out);
            if *n < 0 {
                out.push_str(&format!("^({n})"));
            } else {
                out.push_str(&format!("^{n}"));
            }
        }
        Node::Sin(a) => call("sin", a, out),
        Node::Cos(a) => call("cos", a, out),
        Node::Exp(a) => call("exp", a, out),
    }
    if wrap {
        out.push(')');
    }
}

fn binary(a: &Node, b: &Node, op: &str, prec: u8, out: &mut String) {
    write(a, prec, out);
    out.push_str(op);
    write(b, prec + 1, out);
}

fn call(name: &str, a: &Node, out: &mut String) {
    out.push_str(name);
    out.push('(');
    write(a, 0, out);
    out.push(')');
}
