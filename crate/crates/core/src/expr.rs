//! Generator expressions: a small grammar over complex literals, the
//! variable `z`, `+ - * /`, integer powers and `sqrt`/`exp`/`log`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' ['-'] integer)*
//! atom  := number ['i'] | 'i' | 'z' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Expressions are compiled to a stack program that evaluates either plain
//! complex numbers or value/derivative pairs, so parsed generators carry an
//! exact derivative channel.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as Cx;
use thiserror::Error;

use crate::holo::HoloMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Real(f64),
    Imag(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Direct recursive evaluation of the tree.
    pub fn eval_recursive(&self, z: Cx) -> Cx {
        match self {
            Expr::Real(x) => Cx::new(*x, 0.0),
            Expr::Imag(y) => Cx::new(0.0, *y),
            Expr::Var => z,
            Expr::Neg(a) => -a.eval_recursive(z),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval_recursive(z), b.eval_recursive(z));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(a, n) => a.eval_recursive(z).powi(*n),
            Expr::Call(f, a) => {
                let a = a.eval_recursive(z);
                match f {
                    Func::Sqrt => a.sqrt(),
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Real(x) => write!(f, "{x:?}"),
            Expr::Imag(y) => write!(f, "{y:?}i"),
            Expr::Var => write!(f, "z"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Pow(a, n) => write!(f, "({a}^{n})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    ImagNum(f64),
    I,
    Z,
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::ImagNum(x) => format!("imaginary literal {x}i"),
            Tok::I => "'i'".into(),
            Tok::Z => "'z'".into(),
            Tok::Func(f) => format!("function {}", f.name()),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
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
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("'{text}'"),
                })?;
                let tok = if i < bytes.len() && bytes[i] == b'i' && !is_ident(bytes.get(i + 1)) {
                    i += 1;
                    Tok::ImagNum(value)
                } else {
                    Tok::Num(value)
                };
                out.push((start, tok));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let tok = match &src[start..i] {
                    "z" => Tok::Z,
                    "i" => Tok::I,
                    "sqrt" => Tok::Func(Func::Sqrt),
                    "exp" => Tok::Func(Func::Exp),
                    "log" => Tok::Func(Func::Log),
                    other => {
                        return Err(ParseError {
                            offset: start,
                            expected: vec!["z", "i", "sqrt", "exp", "log"],
                            found: format!("identifier '{other}'"),
                        })
                    }
                };
                out.push((start, tok));
                continue;
            }
            _ => {
                return Err(ParseError {
                    offset: start,
                    expected: vec!["operand", "operator"],
                    found: format!("'{}'", src[start..].chars().next().unwrap_or('?')),
                })
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

fn is_ident(b: Option<&u8>) -> bool {
    b.is_some_and(|b| b.is_ascii_alphanumeric())
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const OPERAND: &[&str] = &["number", "'i'", "'z'", "function", "'('", "'-'"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail(&self, expected: &[&'static str]) -> ParseError {
        let (offset, tok) = &self.toks[self.pos];
        ParseError {
            offset: *offset,
            expected: expected.to_vec(),
            found: tok.describe(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let negative = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let n = match self.peek() {
                Tok::Num(x) if x.fract() == 0.0 && *x <= i32::MAX as f64 => *x as i32,
                _ => return Err(self.fail(&["integer exponent"])),
            };
            self.bump();
            base = Expr::Pow(Box::new(base), if negative { -n } else { n });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Real(x))
            }
            Tok::ImagNum(y) => {
                self.bump();
                Ok(Expr::Imag(y))
            }
            Tok::I => {
                self.bump();
                Ok(Expr::Imag(1.0))
            }
            Tok::Z => {
                self.bump();
                Ok(Expr::Var)
            }
            Tok::Func(f) => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Err(self.fail(&["'('"]));
                }
                self.bump();
                let arg = self.expr()?;
                self.close()?;
                Ok(Expr::Call(f, Box::new(arg)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.close()?;
                Ok(inner)
            }
            _ => Err(self.fail(OPERAND)),
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.fail(&["')'", "operator"]))
        }
    }
}

/// Parses a generator expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError {
            offset: 0,
            expected: OPERAND.to_vec(),
            found: "empty input".into(),
        });
    }
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.fail(&["operator", "end of input"]));
    }
    Ok(e)
}

/// Value together with its derivative in `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: Cx,
    pub d: Cx,
}

impl Dual {
    fn constant(v: Cx) -> Self {
        Self { v, d: Cx::new(0.0, 0.0) }
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}

impl Div for Dual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v;
        Self {
            v: q,
            d: (self.d - q * o.d) / o.v,
        }
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d: -self.d }
    }
}

trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self> {
    fn lit(c: Cx) -> Self;
    fn powi(self, n: i32) -> Self;
    fn apply(self, f: Func) -> Self;
}

impl Scalar for Cx {
    fn lit(c: Cx) -> Self {
        c
    }
    fn powi(self, n: i32) -> Self {
        Cx::powi(&self, n)
    }
    fn apply(self, f: Func) -> Self {
        match f {
            Func::Sqrt => self.sqrt(),
            Func::Exp => self.exp(),
            Func::Log => self.ln(),
        }
    }
}

impl Scalar for Dual {
    fn lit(c: Cx) -> Self {
        Dual::constant(c)
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dual::constant(Cx::new(1.0, 0.0));
        }
        let lower = self.v.powi(n - 1);
        Dual {
            v: lower * self.v,
            d: lower * self.d * n as f64,
        }
    }
    fn apply(self, f: Func) -> Self {
        match f {
            Func::Sqrt => {
                let s = self.v.sqrt();
                Dual { v: s, d: self.d / (2.0 * s) }
            }
            Func::Exp => {
                let e = self.v.exp();
                Dual { v: e, d: e * self.d }
            }
            Func::Log => Dual {
                v: self.v.ln(),
                d: self.d / self.v,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(Cx),
    Var,
    Neg,
    Bin(BinOp),
    Pow(i32),
    Call(Func),
}

/// A parsed expression compiled to a postfix program.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorExpr {
    pub source: String,
    pub ast: Expr,
    program: Vec<Op>,
}

impl GeneratorExpr {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let ast = parse(source)?;
        let mut program = Vec::new();
        compile(&ast, &mut program);
        Ok(Self {
            source: source.to_string(),
            ast,
            program,
        })
    }

    fn run<S: Scalar>(&self, z: S) -> S {
        let mut stack: Vec<S> = Vec::with_capacity(8);
        for op in &self.program {
            match *op {
                Op::Const(c) => stack.push(S::lit(c)),
                Op::Var => stack.push(z),
                Op::Neg => {
                    let a = stack.pop().expect("stack underflow");
                    stack.push(-a);
                }
                Op::Bin(b) => {
                    let rhs = stack.pop().expect("stack underflow");
                    let lhs = stack.pop().expect("stack underflow");
                    stack.push(match b {
                        BinOp::Add => lhs + rhs,
                        BinOp::Sub => lhs - rhs,
                        BinOp::Mul => lhs * rhs,
                        BinOp::Div => lhs / rhs,
                    });
                }
                Op::Pow(n) => {
                    let a = stack.pop().expect("stack underflow");
                    stack.push(a.powi(n));
                }
                Op::Call(f) => {
                    let a = stack.pop().expect("stack underflow");
                    stack.push(a.apply(f));
                }
            }
        }
        stack.pop().expect("empty program")
    }

    pub fn eval(&self, z: Cx) -> Cx {
        self.run(z)
    }

    pub fn eval_dual(&self, z: Cx) -> Dual {
        self.run(Dual { v: z, d: Cx::new(1.0, 0.0) })
    }

    /// The expression as a map with an exact derivative channel.
    pub fn to_holo_map(&self) -> HoloMap {
        let (a, b) = (self.clone(), self.clone());
        HoloMap::with_derivative(self.source.clone(), move |z| a.eval(z), move |z| b.eval_dual(z).d)
    }
}

fn compile(e: &Expr, out: &mut Vec<Op>) {
    match e {
        Expr::Real(x) => out.push(Op::Const(Cx::new(*x, 0.0))),
        Expr::Imag(y) => out.push(Op::Const(Cx::new(0.0, *y))),
        Expr::Var => out.push(Op::Var),
        Expr::Neg(a) => {
            compile(a, out);
            out.push(Op::Neg);
        }
        Expr::Bin(op, a, b) => {
            compile(a, out);
            compile(b, out);
            out.push(Op::Bin(*op));
        }
        Expr::Pow(a, n) => {
            compile(a, out);
            out.push(Op::Pow(*n));
        }
        Expr::Call(f, a) => {
            compile(a, out);
            out.push(Op::Call(*f));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn var() -> Box<Expr> {
        Box::new(Expr::Var)
    }

    #[test]
    fn parses_example_generators() {
        let e = parse("z*(1-z)").unwrap();
        assert_eq!(
            e,
            Expr::Bin(
                BinOp::Mul,
                var(),
                Box::new(Expr::Bin(BinOp::Sub, Box::new(Expr::Real(1.0)), var()))
            )
        );
        let e = parse("z/(1-z)").unwrap();
        assert_eq!(
            e,
            Expr::Bin(
                BinOp::Div,
                var(),
                Box::new(Expr::Bin(BinOp::Sub, Box::new(Expr::Real(1.0)), var()))
            )
        );
    }

    #[test]
    fn truncated_input_reports_offset() {
        let err = parse("z*(1+").unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(err.expected.contains(&"'('"));
        assert_eq!(err.found, "end of input");
    }

    #[test]
    fn other_syntax_errors() {
        assert_eq!(parse("").unwrap_err().offset, 0);
        assert_eq!(parse("z + foo").unwrap_err().offset, 4);
        assert_eq!(parse("z^1.5").unwrap_err().offset, 2);
        assert_eq!(parse("(z").unwrap_err().offset, 2);
        assert_eq!(parse("z z").unwrap_err().offset, 2);
        assert_eq!(parse("sqrt z").unwrap_err().offset, 5);
    }

    #[test]
    fn precedence_and_associativity() {
        let z = Cx::new(0.3, -0.2);
        let e = GeneratorExpr::parse("-z^2").unwrap();
        assert_eq!(e.eval(z), -(z * z));
        let e = GeneratorExpr::parse("1-z-z").unwrap();
        assert_eq!(e.eval(z), 1.0 - z - z);
        let e = GeneratorExpr::parse("z/2/4").unwrap();
        assert_eq!(e.eval(z), z / 8.0);
        let e = GeneratorExpr::parse("z^2^3").unwrap();
        assert!((e.eval(z) - z.powi(6)).norm() < 1e-15);
        let e = GeneratorExpr::parse("z^-2").unwrap();
        assert!((e.eval(z) - z.powi(-2)).norm() < 1e-12);
    }

    #[test]
    fn complex_literals() {
        let e = GeneratorExpr::parse("0.5+2i").unwrap();
        assert_eq!(e.eval(Cx::new(0.0, 0.0)), Cx::new(0.5, 2.0));
        let e = GeneratorExpr::parse("i*z").unwrap();
        assert_eq!(e.eval(Cx::new(1.0, 0.0)), Cx::new(0.0, 1.0));
        let e = GeneratorExpr::parse("1e-3 + 2.5e1i").unwrap();
        assert_eq!(e.eval(Cx::new(0.0, 0.0)), Cx::new(1e-3, 25.0));
    }

    #[test]
    fn dual_derivatives_match_closed_forms() {
        let cases: [(&str, fn(Cx) -> Cx); 4] = [
            ("z*(1-z)", |z| 1.0 - 2.0 * z),
            ("z/(1-z)", |z| 1.0 / ((1.0 - z) * (1.0 - z))),
            ("z*exp(z)", |z| z.exp() * (1.0 + z)),
            ("sqrt(1+z)*log(2-z)", |z| {
                (2.0 - z).ln() / (2.0 * (1.0 + z).sqrt()) - (1.0 + z).sqrt() / (2.0 - z)
            }),
        ];
        for (src, d) in cases {
            let e = GeneratorExpr::parse(src).unwrap();
            for z in [Cx::new(0.1, 0.2), Cx::new(-0.5, 0.4), Cx::new(0.7, -0.1)] {
                assert!((e.eval_dual(z).d - d(z)).norm() < 1e-13, "{src} at {z}");
            }
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::Var),
            (0.0f64..10.0).prop_map(Expr::Real),
            (0.0f64..10.0).prop_map(Expr::Imag),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), inner.clone(), 0usize..4).prop_map(|(a, b, k)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][k];
                    Expr::Bin(op, Box::new(a), Box::new(b))
                }),
                (inner.clone(), -3i32..4).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
                (inner, 0usize..3).prop_map(|(a, k)| {
                    Expr::Call([Func::Sqrt, Func::Exp, Func::Log][k], Box::new(a))
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(parse(&reparsed.to_string()).unwrap(), reparsed);
        }

        #[test]
        fn compiled_matches_recursive(e in arb_expr(), re in -0.7f64..0.7, im in -0.7f64..0.7) {
            let z = Cx::new(re, im);
            let g = GeneratorExpr::parse(&e.to_string()).unwrap();
            let (a, b) = (g.eval(z), e.eval_recursive(z));
            if a.norm().is_finite() && b.norm().is_finite() {
                prop_assert!((a - b).norm() <= 1e-14 * (1.0 + b.norm()), "{} vs {}", a, b);
            }
        }
    }
}
