//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | factor
//! factor   := atom ('^' exponent)?
//! exponent := '-' exponent | factor
//! atom     := number | 'i' | 'pi' | 'e' | 'x' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `e^u` becomes `exp(u)` for any `u`; every other base needs a constant
//! integer exponent.

use num_complex::Complex64;
use thiserror::Error;

use super::Node;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at byte {offset} is not an integer constant")]
    NonIntegerExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::NonIntegerExponent { offset } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match ch {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            i += 1;
        } else if ch.is_ascii_digit() || ch == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            out.push((Tok::Num(v), start));
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            let c = src[start..].chars().next().unwrap_or('?');
            return Err(ParseError::Syntax {
                offset: start,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

pub(super) fn parse(src: &str) -> Result<Node, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let node = p.expr()?;
    match p.peek() {
        Tok::End => Ok(node),
        _ => Err(p.unexpected()),
    }
}

pub(super) fn neg(a: Node) -> Node {
    match a {
        Node::Num(v) => Node::Num(-v),
        other => Node::Neg(Box::new(other)),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        let message = match self.peek() {
            Tok::End => "unexpected end of input".to_string(),
            t => format!("unexpected token {t:?}"),
        };
        ParseError::Syntax {
            offset: self.offset(),
            message,
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(neg(self.unary()?));
        }
        self.factor()
    }

    fn exponent(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(neg(self.exponent()?));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exp = self.exponent()?;
        if base == Node::E {
            return Ok(Node::Exp(Box::new(exp)));
        }
        let n = integer_value(&exp).ok_or(ParseError::NonIntegerExponent { offset: at })?;
        Ok(Node::Pow(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let at = self.offset();
        let tok = self.peek().clone();
        if !matches!(tok, Tok::Num(_) | Tok::LParen | Tok::Ident(_)) {
            return Err(self.unexpected());
        }
        self.bump();
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Node::Var),
                "i" => Ok(Node::Imag),
                "pi" => Ok(Node::Pi),
                "e" => Ok(Node::E),
                "sin" | "cos" | "exp" => {
                    if *self.peek() != Tok::LParen {
                        return Err(ParseError::Syntax {
                            offset: self.offset(),
                            message: format!("expected `(` after `{name}`"),
                        });
                    }
                    self.bump();
                    let arg = Box::new(self.expr()?);
                    self.expect_rparen()?;
                    Ok(match name.as_str() {
                        "sin" => Node::Sin(arg),
                        "cos" => Node::Cos(arg),
                        _ => Node::Exp(arg),
                    })
                }
                _ => Err(ParseError::UnknownIdentifier { offset: at, name }),
            },
            _ => unreachable!(),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: self.offset(),
                message: "expected `)`".into(),
            })
        }
    }
}

fn integer_value(node: &Node) -> Option<i32> {
    if node.mentions_var() {
        return None;
    }
    let v: Complex64 = node.eval(Complex64::new(0.0, 0.0)).ok()?;
    let r = v.re.round();
    if v.im == 0.0 && v.re == r && r.abs() <= i32::MAX as f64 {
        Some(r as i32)
    } else {
        None
    }
}
