//! Scalar field expressions over chart coordinates `x0 … x{n-1}`.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = atom [ "^" exponent ] ;
//! exponent = [ "-" ] power ;                (must fold to a number)
//! atom     = number | ident | func "(" expr { "," expr } ")" | "(" expr ")" ;
//! func     = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" | "sinh" | "cosh" ;
//! ident    = "x" digit { digit } ;
//! number   = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//!          | "." digits [ exponent part ] ;
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::taylor::Taylor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn pow(self, p: f64) -> Expr {
        Expr::Pow(Box::new(self), p)
    }

    /// Highest coordinate index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Plain numeric evaluation.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, p) => {
                let v = a.eval(x);
                if p.fract() == 0.0 {
                    v.powi(*p as i32)
                } else {
                    v.powf(*p)
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => v.tan(),
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                    Func::Sqrt => v.sqrt(),
                    Func::Sinh => v.sinh(),
                    Func::Cosh => v.cosh(),
                }
            }
        }
    }

    /// Truncated Taylor expansion at `x` to order `order`, with domain checks.
    pub fn eval_taylor(&self, x: &[f64], order: usize) -> Result<Taylor> {
        let n = x.len();
        let t = self.taylor_rec(x, n)?;
        Ok(t.truncate(order))
    }

    fn taylor_rec(&self, x: &[f64], n: usize) -> Result<Taylor> {
        let domain = |reason: &str| Error::Domain {
            node: self.to_string(),
            reason: reason.to_string(),
        };
        Ok(match self {
            Expr::Num(v) => Taylor::constant(n, *v),
            Expr::Var(i) => {
                if *i >= n {
                    return Err(Error::UnknownIdentifier {
                        name: format!("x{i}"),
                        offset: 0,
                    });
                }
                Taylor::variable(n, *i, x[*i])
            }
            Expr::Neg(a) => -a.taylor_rec(x, n)?,
            Expr::Add(a, b) => a.taylor_rec(x, n)? + b.taylor_rec(x, n)?,
            Expr::Sub(a, b) => a.taylor_rec(x, n)? - b.taylor_rec(x, n)?,
            Expr::Mul(a, b) => a.taylor_rec(x, n)? * b.taylor_rec(x, n)?,
            Expr::Div(a, b) => {
                let d = b.taylor_rec(x, n)?;
                if d.value() == 0.0 {
                    return Err(domain("division by zero"));
                }
                a.taylor_rec(x, n)? / d
            }
            Expr::Pow(a, p) => {
                let v = a.taylor_rec(x, n)?;
                let integral = p.fract() == 0.0;
                if integral && *p < 0.0 && v.value() == 0.0 {
                    return Err(domain("negative power of zero"));
                }
                if !integral && v.value() <= 0.0 {
                    return Err(domain("fractional power of a non-positive value"));
                }
                v.powf(*p)
            }
            Expr::Call(f, a) => {
                let v = a.taylor_rec(x, n)?;
                let a0 = v.value();
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => {
                        if a0.cos().abs() < 1e-300 {
                            return Err(domain("tan at a pole"));
                        }
                        v.tan()
                    }
                    Func::Exp => v.exp(),
                    Func::Log => {
                        if a0 <= 0.0 {
                            return Err(domain("log of a non-positive value"));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if a0 < 0.0 || (a0 == 0.0 && v.order() > 0) {
                            return Err(domain("sqrt of a non-positive value"));
                        }
                        v.sqrt()
                    }
                    Func::Sinh => v.sinh(),
                    Func::Cosh => v.cosh(),
                }
            }
        })
    }

    /// Structural normal form: operands of `+` and `*` sorted by their printed
    /// form, so that equal-up-to-commutation expressions compare equal.
    pub fn canonical(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.canonical())),
            Expr::Add(a, b) | Expr::Mul(a, b) => {
                let (mut a, mut b) = (a.canonical(), b.canonical());
                if a.to_string() > b.to_string() {
                    std::mem::swap(&mut a, &mut b);
                }
                if matches!(self, Expr::Add(..)) {
                    Expr::Add(Box::new(a), Box::new(b))
                } else {
                    Expr::Mul(Box::new(a), Box::new(b))
                }
            }
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.canonical()), Box::new(b.canonical())),
            Expr::Div(a, b) => Expr::Div(Box::new(a.canonical()), Box::new(b.canonical())),
            Expr::Pow(a, p) => Expr::Pow(Box::new(a.canonical()), *p),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.canonical())),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if v.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

macro_rules! expr_binop {
    ($tr:ident, $m:ident, $v:ident) => {
        impl std::ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                Expr::$v(Box::new(self), Box::new(o))
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(v) => write!(f, "{}", fmt_num(*v)),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(a, 3, f)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { "+" } else { "-" })?;
                wrap(b, 2, f)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                wrap(b, 3, f)
            }
            Expr::Pow(a, p) => {
                wrap(a, 5, f)?;
                if *p < 0.0 {
                    write!(f, "^(-{})", fmt_num(-p))
                } else {
                    write!(f, "^{}", fmt_num(*p))
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Parses an expression over `n` coordinates.
pub fn parse(src: &str, n: usize) -> Result<Expr> {
    let mut p = Parser { src, pos: 0, n };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn syntax(&self, msg: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            let neg = self.eat('-');
            let e = self.power()?;
            let v = fold_constant(&e).ok_or(Error::Syntax {
                offset: start,
                message: "power exponent must be a numeric literal".into(),
            })?;
            return Ok(Expr::Pow(Box::new(base), if neg { -v } else { v }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.syntax("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.ident(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let mut mantissa = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            mantissa += digits(&mut i);
        }
        if mantissa == 0 {
            return Err(self.syntax("malformed number"));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) == 0 {
                self.pos = j;
                return Err(self.syntax("malformed exponent"));
            }
            i = j;
        }
        let text = &self.src[start..i];
        let v: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number '{text}'"),
        })?;
        self.pos = i;
        Ok(Expr::Num(v))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
            i += 1;
        }
        let name = &self.src[start..i];
        self.pos = i;
        if let Some(f) = Func::from_name(name) {
            if !self.eat('(') {
                return Err(Error::Syntax {
                    offset: self.pos,
                    message: format!("expected '(' after function '{name}'"),
                });
            }
            let mut args = vec![self.expr()?];
            while self.eat(',') {
                args.push(self.expr()?);
            }
            if !self.eat(')') {
                return Err(self.syntax("expected ')'"));
            }
            if args.len() != 1 {
                return Err(Error::Arity {
                    name: name.to_string(),
                    expected: 1,
                    found: args.len(),
                    offset: start,
                });
            }
            return Ok(Expr::Call(f, Box::new(args.pop().unwrap())));
        }
        let idx = name
            .strip_prefix('x')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse::<usize>().ok());
        match idx {
            Some(k) if k < self.n => Ok(Expr::Var(k)),
            _ => Err(Error::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            }),
        }
    }
}

fn fold_constant(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::Neg(a) => fold_constant(a).map(|v| -v),
        Expr::Pow(a, p) => fold_constant(a).map(|v| v.powf(*p)),
        _ => None,
    }
}

/// A parsed scalar field on an `n`-dimensional chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub n: usize,
    pub expr: Expr,
}

impl ScalarField {
    pub fn parse(src: &str, n: usize) -> Result<ScalarField> {
        Ok(ScalarField {
            n,
            expr: parse(src, n)?,
        })
    }

    pub fn constant(n: usize, v: f64) -> ScalarField {
        ScalarField { n, expr: Expr::Num(v) }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    pub fn taylor(&self, x: &[f64], order: usize) -> Result<Taylor> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, field expects {}",
                x.len(),
                self.n
            )));
        }
        self.expr.eval_taylor(x, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sum_of_product() {
        let e = parse("x0*x0 + 1", 1).unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Mul(Box::new(Expr::Var(0)), Box::new(Expr::Var(0)))),
                Box::new(Expr::Num(1.0))
            )
        );
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = parse("-x0^2", 1).unwrap();
        assert_eq!(e, Expr::Neg(Box::new(Expr::Var(0).pow(2.0))));
        assert_eq!(e.eval(&[3.0]), -9.0);
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse("x0^2^3", 1).unwrap();
        assert_eq!(e, Expr::Var(0).pow(8.0));
        assert_eq!(parse("x0^-2", 1).unwrap(), Expr::Var(0).pow(-2.0));
    }

    #[test]
    fn rejects_unknown_identifier() {
        match parse("sin(x1)^2", 1) {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "x1");
                assert_eq!(offset, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_arity_and_syntax() {
        assert!(matches!(parse("sin(x0, x0)", 1), Err(Error::Arity { found: 2, .. })));
        assert!(matches!(parse("x0 + ", 1), Err(Error::Syntax { offset: 5, .. })));
        assert!(matches!(parse("x0^x0", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("1e", 1), Err(Error::Syntax { .. })));
    }

    #[test]
    fn number_forms() {
        assert_eq!(parse("1.5e-3", 1).unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse(".25", 1).unwrap(), Expr::Num(0.25));
        assert_eq!(parse("2E+2", 1).unwrap(), Expr::Num(200.0));
    }

    #[test]
    fn domain_errors_name_the_node() {
        let e = parse("log(x0 - 1)", 1).unwrap();
        match e.eval_taylor(&[1.0], 2) {
            Err(Error::Domain { node, .. }) => assert_eq!(node, "log(x0 - 1)"),
            other => panic!("unexpected {other:?}"),
        }
        let e = parse("1/x0", 1).unwrap();
        assert!(matches!(e.eval_taylor(&[0.0], 1), Err(Error::Domain { .. })));
    }

    #[test]
    fn canonical_ignores_commutation() {
        let a = parse("x1*x0 + sin(x0)", 2).unwrap();
        let b = parse("sin(x0) + x0*x1", 2).unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }
}
