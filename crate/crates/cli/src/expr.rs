//! Radial expressions in `r`: `+ - * / ^`, `exp`, `sin`, `cos`, `pi`,
//! numeric literals and parentheses, with symbolic differentiation.

use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    R,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    /// Only produced by differentiation of non-constant exponents.
    Ln(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message} at position {position} in `{input}`")]
pub struct ParseError {
    pub input: String,
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Num(f64),
    Ident(usize, usize),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let err = |position, message: &str| ParseError {
        input: src.to_string(),
        position,
        message: message.to_string(),
    };
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' | '-' | '*' | '/' | '^' => {
                out.push((i, Token::Op(c)));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent part, e.g. 1e-3
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
                let v: f64 = src[start..i].parse().map_err(|_| err(start, "malformed number"))?;
                out.push((start, Token::Num(v)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((start, Token::Ident(start, i)));
            }
            _ => return Err(err(i, &format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        let position = self.tokens.get(self.pos).map_or(self.src.len(), |t| t.0);
        ParseError {
            input: self.src.to_string(),
            position,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).map(|t| t.1)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(lhs.into(), rhs.into())
            } else {
                Expr::Sub(lhs.into(), rhs.into())
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(lhs.into(), rhs.into())
            } else {
                Expr::Div(lhs.into(), rhs.into())
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(self.unary()?.into()))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    // `^` binds tighter than unary minus on its left and is right associative:
    // -r^2 = -(r^2), 2^-r = 2^(-r), 2^3^2 = 2^(3^2).
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Pow(base.into(), exponent.into()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => {
                        self.pos -= 1;
                        Err(self.error("expected `)`"))
                    }
                }
            }
            Some(Token::Ident(a, b)) => {
                let name = &self.src[a..b];
                match name {
                    "r" => Ok(Expr::R),
                    "pi" => Ok(Expr::Num(PI)),
                    "exp" | "sin" | "cos" => {
                        if self.next() != Some(Token::LParen) {
                            self.pos -= 1;
                            return Err(self.error(format!("expected `(` after `{name}`")));
                        }
                        let arg = self.expr()?;
                        if self.next() != Some(Token::RParen) {
                            self.pos -= 1;
                            return Err(self.error("expected `)`"));
                        }
                        Ok(match name {
                            "exp" => Expr::Exp(arg.into()),
                            "sin" => Expr::Sin(arg.into()),
                            _ => Expr::Cos(arg.into()),
                        })
                    }
                    _ => {
                        self.pos -= 1;
                        Err(self.error(format!("unknown identifier `{name}`")))
                    }
                }
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.error("unexpected token"))
            }
            None => Err(self.error("unexpected end of input")),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { src, tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos < p.tokens.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, r: f64) -> f64 {
        use Expr::*;
        match self {
            Num(v) => *v,
            R => r,
            Neg(a) => -a.eval(r),
            Add(a, b) => a.eval(r) + b.eval(r),
            Sub(a, b) => a.eval(r) - b.eval(r),
            Mul(a, b) => a.eval(r) * b.eval(r),
            Div(a, b) => a.eval(r) / b.eval(r),
            Pow(a, b) => match **b {
                Num(n) if n == n.trunc() && n.abs() <= 64.0 => a.eval(r).powi(n as i32),
                _ => a.eval(r).powf(b.eval(r)),
            },
            Exp(a) => a.eval(r).exp(),
            Sin(a) => a.eval(r).sin(),
            Cos(a) => a.eval(r).cos(),
            Ln(a) => a.eval(r).ln(),
        }
    }

    /// True when the expression does not mention `r`.
    pub fn is_constant(&self) -> bool {
        use Expr::*;
        match self {
            Num(_) => true,
            R => false,
            Neg(a) | Exp(a) | Sin(a) | Cos(a) | Ln(a) => a.is_constant(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// `d/dr`, lightly simplified.
    pub fn derivative(&self) -> Expr {
        use Expr::*;
        match self {
            Num(_) => Num(0.0),
            R => Num(1.0),
            Neg(a) => neg(a.derivative()),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
            Div(a, b) => div(
                sub(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
                pow((**b).clone(), Num(2.0)),
            ),
            Pow(a, b) if b.is_constant() => mul(
                mul((**b).clone(), pow((**a).clone(), sub((**b).clone(), Num(1.0)))),
                a.derivative(),
            ),
            Pow(a, b) => mul(
                self.clone(),
                add(
                    mul(b.derivative(), Ln(a.clone())),
                    div(mul((**b).clone(), a.derivative()), (**a).clone()),
                ),
            ),
            Exp(a) => mul(self.clone(), a.derivative()),
            Sin(a) => mul(Cos(a.clone()), a.derivative()),
            Cos(a) => mul(neg(Sin(a.clone())), a.derivative()),
            Ln(a) => div(a.derivative(), (**a).clone()),
        }
    }
}

fn num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        _ => None,
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => Expr::Num(-v),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(a.into()),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Expr::Num(x + y),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => Expr::Add(a.into(), b.into()),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Expr::Num(x - y),
        (Some(0.0), _) => neg(b),
        (_, Some(0.0)) => a,
        _ => Expr::Sub(a.into(), b.into()),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Expr::Num(x * y),
        (Some(0.0), _) | (_, Some(0.0)) => Expr::Num(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        _ => Expr::Mul(a.into(), b.into()),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(0.0), _) => Expr::Num(0.0),
        (_, Some(1.0)) => a,
        _ => Expr::Div(a.into(), b.into()),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match num(&b) {
        Some(1.0) => a,
        Some(0.0) => Expr::Num(1.0),
        _ => Expr::Pow(a.into(), b.into()),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            Num(v) => write!(f, "{v}"),
            R => write!(f, "r"),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, b) => write!(f, "({a}^{b})"),
            Exp(a) => write!(f, "exp({a})"),
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Ln(a) => write!(f, "ln({a})"),
        }
    }
}

/// Parses an expression that must not depend on `r` and evaluates it.
pub fn parse_constant(src: &str) -> Result<f64, ParseError> {
    let e = Expr::parse(src)?;
    if !e.is_constant() {
        return Err(ParseError {
            input: src.to_string(),
            position: 0,
            message: "expected a constant expression".into(),
        });
    }
    Ok(e.eval(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(e: &Expr, r: f64) -> f64 {
        let h = 1e-6 * r.max(1.0);
        (e.eval(r + h) - e.eval(r - h)) / (2.0 * h)
    }

    #[test]
    fn precedence() {
        assert_eq!(Expr::parse("1 + 2 * 3").unwrap().eval(0.0), 7.0);
        assert_eq!(Expr::parse("-2^2").unwrap().eval(0.0), -4.0);
        assert_eq!(Expr::parse("2^3^2").unwrap().eval(0.0), 512.0);
        assert_eq!(Expr::parse("2^-1").unwrap().eval(0.0), 0.5);
        assert_eq!(Expr::parse("8/4/2").unwrap().eval(0.0), 1.0);
        assert_eq!(Expr::parse("1 - 2 - 3").unwrap().eval(0.0), -4.0);
        assert!((Expr::parse("pi/2").unwrap().eval(0.0) - PI / 2.0).abs() < 1e-16);
        assert_eq!(Expr::parse("1.5e-3*r").unwrap().eval(2.0), 3e-3);
    }

    #[test]
    fn example_two_expression() {
        let e = Expr::parse("pi*exp(-r)/2").unwrap();
        for r in [0.0, 0.3, 1.0, 4.0] {
            assert!((e.eval(r) - PI * (-r).exp() / 2.0).abs() < 1e-15);
            assert!((e.derivative().eval(r) + PI * (-r).exp() / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let cases = [
            "r",
            "3*r^2 - r + 1",
            "pi/(1+r)",
            "pi*exp(-r^2)",
            "sin(r)*cos(2*r)",
            "exp(sin(r))/(2 + cos(r))",
            "r^r",
            "(1+r)^(0.5*r)",
            "2^(-r)",
            "-(r - 1)^3",
            "r^-2",
        ];
        for src in cases {
            let e = Expr::parse(src).unwrap();
            let d = e.derivative();
            for r in [0.2, 0.7, 1.3, 3.0, 8.0] {
                let (a, b) = (d.eval(r), fd(&e, r));
                assert!(
                    (a - b).abs() < 1e-6 * a.abs().max(1.0),
                    "{src} at {r}: {a} vs {b} ({d})"
                );
            }
        }
    }

    #[test]
    fn constants() {
        assert_eq!(parse_constant("2*pi").unwrap(), 2.0 * PI);
        assert!(parse_constant("r + 1").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        for src in ["", "1 +", "(r", "r)", "tan(r)", "sin r", "1 $ 2", "2 3", "exp()"] {
            assert!(Expr::parse(src).is_err(), "{src}");
        }
        let e = Expr::parse("foo(r)").unwrap_err();
        assert_eq!(e.position, 0);
    }
}
