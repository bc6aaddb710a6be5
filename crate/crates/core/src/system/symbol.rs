//! Small expression language for Fourier symbols.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' signed-number | '^(' signed-number ')')?
//! atom  := number | 'i' | 'xi1' | 'xi2' | 'xi3' | '|xi|' | '(' expr ')'
//! ```
//!
//! `xi1..xi3` are the frequency components, `|xi|` the Euclidean norm and
//! `i` the imaginary unit.

use std::fmt;
use std::ops;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SymbolExpr {
    Const(Complex64),
    /// Zero-based frequency component.
    Xi(usize),
    Norm,
    Neg(Box<SymbolExpr>),
    Add(Box<SymbolExpr>, Box<SymbolExpr>),
    Sub(Box<SymbolExpr>, Box<SymbolExpr>),
    Mul(Box<SymbolExpr>, Box<SymbolExpr>),
    Div(Box<SymbolExpr>, Box<SymbolExpr>),
    Pow(Box<SymbolExpr>, f64),
}

impl SymbolExpr {
    pub fn real(v: f64) -> Self {
        SymbolExpr::Const(Complex64::new(v, 0.0))
    }

    pub fn imag_unit() -> Self {
        SymbolExpr::Const(Complex64::new(0.0, 1.0))
    }

    pub fn xi(axis: usize) -> Self {
        SymbolExpr::Xi(axis)
    }

    pub fn norm() -> Self {
        SymbolExpr::Norm
    }

    pub fn pow(self, exponent: f64) -> Self {
        SymbolExpr::Pow(Box::new(self), exponent)
    }

    /// Evaluates at `xi != 0`.
    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        let v = self.eval_raw(xi)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Symbol(format!("`{self}` is not finite at xi = {xi:?}")))
        }
    }

    fn eval_raw(&self, xi: &[f64]) -> Result<Complex64> {
        Ok(match self {
            SymbolExpr::Const(c) => *c,
            SymbolExpr::Xi(a) => {
                let v = xi
                    .get(*a)
                    .ok_or_else(|| Error::Symbol(format!("xi{} used in dimension {}", a + 1, xi.len())))?;
                Complex64::new(*v, 0.0)
            }
            SymbolExpr::Norm => Complex64::new(xi.iter().map(|v| v * v).sum::<f64>().sqrt(), 0.0),
            SymbolExpr::Neg(e) => -e.eval_raw(xi)?,
            SymbolExpr::Add(a, b) => a.eval_raw(xi)? + b.eval_raw(xi)?,
            SymbolExpr::Sub(a, b) => a.eval_raw(xi)? - b.eval_raw(xi)?,
            SymbolExpr::Mul(a, b) => a.eval_raw(xi)? * b.eval_raw(xi)?,
            SymbolExpr::Div(a, b) => a.eval_raw(xi)? / b.eval_raw(xi)?,
            SymbolExpr::Pow(e, p) => {
                let base = e.eval_raw(xi)?;
                if p.fract() == 0.0 && p.abs() <= 64.0 {
                    base.powi(*p as i32)
                } else if base.im == 0.0 && base.re >= 0.0 {
                    Complex64::new(base.re.powf(*p), 0.0)
                } else {
                    base.powf(*p)
                }
            }
        })
    }

    /// Largest axis referenced, plus one.
    pub fn required_dim(&self) -> usize {
        match self {
            SymbolExpr::Const(_) | SymbolExpr::Norm => 0,
            SymbolExpr::Xi(a) => a + 1,
            SymbolExpr::Neg(e) | SymbolExpr::Pow(e, _) => e.required_dim(),
            SymbolExpr::Add(a, b) | SymbolExpr::Sub(a, b) | SymbolExpr::Mul(a, b) | SymbolExpr::Div(a, b) => {
                a.required_dim().max(b.required_dim())
            }
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Symbol(format!("unexpected trailing input in `{src}`")));
        }
        Ok(e)
    }
}

impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolExpr::Const(c) => match (c.re, c.im) {
                (re, im) if im == 0.0 => write!(f, "{}", Num(re)),
                (re, im) if re == 0.0 => write!(f, "({}*i)", Num(im)),
                (re, im) => write!(f, "({}+{}*i)", Num(re), Num(im)),
            },
            SymbolExpr::Xi(a) => write!(f, "xi{}", a + 1),
            SymbolExpr::Norm => write!(f, "|xi|"),
            SymbolExpr::Neg(e) => write!(f, "(-{e})"),
            SymbolExpr::Add(a, b) => write!(f, "({a}+{b})"),
            SymbolExpr::Sub(a, b) => write!(f, "({a}-{b})"),
            SymbolExpr::Mul(a, b) => write!(f, "({a}*{b})"),
            SymbolExpr::Div(a, b) => write!(f, "({a}/{b})"),
            SymbolExpr::Pow(e, p) => write!(f, "({e}^{})", Num(*p)),
        }
    }
}

/// Round-trippable number formatting; negatives are parenthesized.
struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 < 0.0 {
            write!(f, "(-{:?})", -self.0)
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

impl From<SymbolExpr> for String {
    fn from(e: SymbolExpr) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for SymbolExpr {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        SymbolExpr::parse(&s)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl ops::$trait for SymbolExpr {
            type Output = SymbolExpr;
            fn $method(self, rhs: SymbolExpr) -> SymbolExpr {
                SymbolExpr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl ops::Neg for SymbolExpr {
    type Output = SymbolExpr;
    fn neg(self) -> SymbolExpr {
        SymbolExpr::Neg(Box::new(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    I,
    Xi(usize),
    Norm,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '/' => {
                out.push(Token::Slash);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '(' => {
                out.push(Token::LParen);
                i += 1
            }
            ')' => {
                out.push(Token::RParen);
                i += 1
            }
            '|' => {
                let rest: String = chars[i..].iter().take(4).collect();
                if rest == "|xi|" {
                    out.push(Token::Norm);
                    i += 4;
                } else {
                    return Err(Error::Symbol(format!("expected `|xi|` at offset {i} in `{src}`")));
                }
            }
            'x' => {
                if chars.get(i + 1) == Some(&'i') {
                    match chars.get(i + 2).and_then(|d| d.to_digit(10)) {
                        Some(d @ 1..=3) => {
                            out.push(Token::Xi(d as usize - 1));
                            i += 3;
                        }
                        _ => return Err(Error::Symbol(format!("expected xi1, xi2 or xi3 at offset {i} in `{src}`"))),
                    }
                } else {
                    return Err(Error::Symbol(format!("unexpected `x` at offset {i} in `{src}`")));
                }
            }
            'i' => {
                out.push(Token::I);
                i += 1
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    i += 1;
                    if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                        i += 1;
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::Symbol(format!("bad number `{text}` in `{src}`")))?;
                out.push(Token::Num(v));
            }
            other => return Err(Error::Symbol(format!("unexpected character `{other}` in `{src}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<SymbolExpr> {
        let mut lhs = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Token::Plus => {
                    self.pos += 1;
                    lhs = lhs + self.term()?;
                }
                Token::Minus => {
                    self.pos += 1;
                    lhs = lhs - self.term()?;
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<SymbolExpr> {
        let mut lhs = self.unary()?;
        while let Some(t) = self.peek() {
            match t {
                Token::Star => {
                    self.pos += 1;
                    lhs = lhs * self.unary()?;
                }
                Token::Slash => {
                    self.pos += 1;
                    lhs = lhs / self.unary()?;
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<SymbolExpr> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<SymbolExpr> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let mut sign = 1.0;
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            sign = -1.0;
        }
        let mut paren = false;
        if self.peek() == Some(&Token::LParen) {
            self.pos += 1;
            paren = true;
            if self.peek() == Some(&Token::Minus) {
                self.pos += 1;
                sign = -sign;
            }
        }
        let exp = match self.next() {
            Some(Token::Num(v)) => sign * v,
            other => return Err(Error::Symbol(format!("exponent must be a number, found {other:?}"))),
        };
        if paren && self.next() != Some(Token::RParen) {
            return Err(Error::Symbol("unbalanced parenthesis in exponent".into()));
        }
        Ok(base.pow(exp))
    }

    fn atom(&mut self) -> Result<SymbolExpr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(SymbolExpr::real(v)),
            Some(Token::I) => Ok(SymbolExpr::imag_unit()),
            Some(Token::Xi(a)) => Ok(SymbolExpr::Xi(a)),
            Some(Token::Norm) => Ok(SymbolExpr::Norm),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::Symbol("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::Symbol(format!("unexpected token {other:?}"))),
        }
    }
}
