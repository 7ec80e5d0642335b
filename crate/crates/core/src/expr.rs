//! Textual function definitions.
//!
//! Grammar (whitespace-insensitive, no implicit multiplication):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and associates to the right, so
//! `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`. Names are the variables
//! (`x` in one dimension, `x1..xn` otherwise), the constants `pi`, `e` and
//! the imaginary unit `i`, and the functions `sin cos tan exp log sqrt sinh
//! cosh`.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::{domain, Result};

/// Integer exponents up to this magnitude are kept as repeated products.
const MAX_INT_EXPONENT: f64 = 1024.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {message}{}", expected.as_ref().map(|e| format!(" (expected {e})")).unwrap_or_default())]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: Option<String>,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>, expected: Option<&str>) -> Self {
        Self {
            offset,
            message: message.into(),
            expected: expected.map(str::to_owned),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
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
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
    ];

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

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedConst {
    Pi,
    E,
    I,
}

impl NamedConst {
    pub fn value(self) -> Complex64 {
        match self {
            NamedConst::Pi => Complex64::new(std::f64::consts::PI, 0.0),
            NamedConst::E => Complex64::new(std::f64::consts::E, 0.0),
            NamedConst::I => Complex64::i(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            NamedConst::Pi => "pi",
            NamedConst::E => "e",
            NamedConst::I => "i",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    Named(NamedConst),
    /// Zero-based variable index.
    Var(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    /// Power with an integer literal exponent.
    PowInt(Box<Node>, i32),
    Call(Func, Box<Node>),
}

/// A parsed function of `dims` real variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprAst {
    root: Node,
    dims: usize,
}

/// Operations a value type must provide to evaluate an [`ExprAst`].
///
/// Implemented for plain complex points and for truncated Taylor jets, so
/// the same tree walk produces values and derivatives.
pub trait Evaluator {
    type Value;

    fn constant(&self, c: Complex64) -> Self::Value;
    fn variable(&self, index: usize) -> Self::Value;
    fn add(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn neg(&self, a: Self::Value) -> Self::Value;
    fn div(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value>;
    fn powi(&self, a: Self::Value, n: i32) -> Result<Self::Value>;
    fn call(&self, f: Func, a: Self::Value) -> Result<Self::Value>;

    fn pow(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value> {
        let l = self.call(Func::Log, a)?;
        self.call(Func::Exp, self.mul(b, l))
    }
}

impl ExprAst {
    pub fn new(root: Node, dims: usize) -> Self {
        Self { root, dims }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn evaluate<E: Evaluator>(&self, ev: &E) -> Result<E::Value> {
        eval_node(&self.root, ev)
    }

    /// Evaluates at a complex point using principal branches.
    pub fn eval_complex(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.dims {
            return Err(crate::error::validation(format!(
                "point has {} coordinates, function takes {}",
                point.len(),
                self.dims
            )));
        }
        self.evaluate(&PointEvaluator { point })
    }

    /// Evaluates at a real point.
    pub fn eval_real(&self, point: &[f64]) -> Result<Complex64> {
        let pt: Vec<Complex64> = point.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.eval_complex(&pt)
    }

    fn var_name(&self, index: usize) -> String {
        if self.dims == 1 {
            "x".to_owned()
        } else {
            format!("x{}", index + 1)
        }
    }

    fn write_node(&self, node: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match node {
            Node::Const(c) => {
                if c.im == 0.0 && c.re >= 0.0 {
                    write!(f, "{}", c.re)
                } else if c.im == 0.0 {
                    write!(f, "(-{})", -c.re)
                } else {
                    write!(f, "({} + {}*i)", c.re, c.im)
                }
            }
            Node::Named(n) => f.write_str(n.name()),
            Node::Var(i) => f.write_str(&self.var_name(*i)),
            Node::Neg(a) => {
                f.write_str("(-")?;
                self.write_node(a, f)?;
                f.write_str(")")
            }
            Node::Binary(op, a, b) => {
                f.write_str("(")?;
                self.write_node(a, f)?;
                write!(f, " {} ", op.symbol())?;
                self.write_node(b, f)?;
                f.write_str(")")
            }
            Node::PowInt(a, n) => {
                f.write_str("(")?;
                self.write_node(a, f)?;
                write!(f, "^{n})")
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                self.write_node(a, f)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(&self.root, f)
    }
}

fn eval_node<E: Evaluator>(node: &Node, ev: &E) -> Result<E::Value> {
    Ok(match node {
        Node::Const(c) => ev.constant(*c),
        Node::Named(n) => ev.constant(n.value()),
        Node::Var(i) => ev.variable(*i),
        Node::Neg(a) => ev.neg(eval_node(a, ev)?),
        Node::Binary(op, a, b) => {
            let l = eval_node(a, ev)?;
            let r = eval_node(b, ev)?;
            match op {
                BinOp::Add => ev.add(l, r),
                BinOp::Sub => ev.sub(l, r),
                BinOp::Mul => ev.mul(l, r),
                BinOp::Div => ev.div(l, r)?,
                BinOp::Pow => ev.pow(l, r)?,
            }
        }
        Node::PowInt(a, n) => ev.powi(eval_node(a, ev)?, *n)?,
        Node::Call(f, a) => ev.call(*f, eval_node(a, ev)?)?,
    })
}

struct PointEvaluator<'a> {
    point: &'a [Complex64],
}

impl Evaluator for PointEvaluator<'_> {
    type Value = Complex64;

    fn constant(&self, c: Complex64) -> Complex64 {
        c
    }

    fn variable(&self, index: usize) -> Complex64 {
        self.point[index]
    }

    fn add(&self, a: Complex64, b: Complex64) -> Complex64 {
        a + b
    }

    fn sub(&self, a: Complex64, b: Complex64) -> Complex64 {
        a - b
    }

    fn mul(&self, a: Complex64, b: Complex64) -> Complex64 {
        a * b
    }

    fn neg(&self, a: Complex64) -> Complex64 {
        -a
    }

    fn div(&self, a: Complex64, b: Complex64) -> Result<Complex64> {
        if b == Complex64::new(0.0, 0.0) {
            return Err(domain("division by zero"));
        }
        Ok(a / b)
    }

    fn powi(&self, a: Complex64, n: i32) -> Result<Complex64> {
        if n < 0 && a == Complex64::new(0.0, 0.0) {
            return Err(domain("zero raised to a negative power"));
        }
        Ok(a.powi(n))
    }

    fn call(&self, f: Func, a: Complex64) -> Result<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        Ok(match f {
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Tan => {
                let c = a.cos();
                if c == zero {
                    return Err(domain("tan at a pole"));
                }
                a.sin() / c
            }
            Func::Exp => a.exp(),
            Func::Log => {
                if a == zero {
                    return Err(domain("log of zero"));
                }
                a.ln()
            }
            Func::Sqrt => {
                if a == zero {
                    return Err(domain("sqrt of zero"));
                }
                a.sqrt()
            }
            Func::Sinh => a.sinh(),
            Func::Cosh => a.cosh(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part only when followed by a digit (optionally signed)
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
            let value: f64 = text
                .parse()
                .map_err(|_| ParseError::new(start, format!("malformed number '{text}'"), None))?;
            toks.push((Tok::Num(value), start));
            if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                return Err(ParseError::new(
                    i,
                    "implicit multiplication is not supported",
                    Some("operator"),
                ));
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((Tok::Ident(src[start..i].to_owned()), start));
        } else {
            let tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    let ch = src[start..].chars().next().unwrap_or('?');
                    return Err(ParseError::new(start, format!("unexpected character '{ch}'"), None));
                }
            };
            toks.push((tok, start));
            i += 1;
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    dims: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn expr(&mut self) -> std::result::Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> std::result::Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> std::result::Result<Node, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> std::result::Result<Node, ParseError> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(match integer_literal(&exponent) {
                Some(n) => Node::PowInt(Box::new(base), n),
                None => Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)),
            });
        }
        Ok(base)
    }

    fn primary(&mut self) -> std::result::Result<Node, ParseError> {
        let offset = self.offset();
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return Err(ParseError::new(offset, "unexpected end of input", Some("operand")));
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Node::Const(Complex64::new(v, 0.0))),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if self.peek() != Some(&Tok::LParen) {
                        return Err(ParseError::new(
                            self.offset(),
                            format!("function '{name}' requires an argument"),
                            Some("'('"),
                        ));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call(func, Box::new(arg)));
                }
                match name.as_str() {
                    "pi" => return Ok(Node::Named(NamedConst::Pi)),
                    "e" => return Ok(Node::Named(NamedConst::E)),
                    "i" => return Ok(Node::Named(NamedConst::I)),
                    _ => {}
                }
                self.variable(&name)
                    .map(Node::Var)
                    .ok_or_else(|| ParseError::new(offset, format!("unknown identifier '{name}'"), None))
            }
            Tok::RParen => Err(ParseError::new(offset, "unexpected ')'", Some("operand"))),
            Tok::Op(c) => Err(ParseError::new(offset, format!("unexpected '{c}'"), Some("operand"))),
        }
    }

    fn expect_rparen(&mut self) -> std::result::Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ParseError::new(self.offset(), "unclosed parenthesis", Some("')'"))),
        }
    }

    fn variable(&self, name: &str) -> Option<usize> {
        if self.dims == 1 {
            return (name == "x").then_some(0);
        }
        let idx: usize = name.strip_prefix('x')?.parse().ok()?;
        (1..=self.dims).contains(&idx).then(|| idx - 1)
    }
}

fn integer_literal(node: &Node) -> Option<i32> {
    let (value, sign) = match node {
        Node::Const(c) => (*c, 1.0),
        Node::Neg(inner) => match inner.as_ref() {
            Node::Const(c) => (*c, -1.0),
            _ => return None,
        },
        _ => return None,
    };
    (value.im == 0.0 && value.re.fract() == 0.0 && value.re <= MAX_INT_EXPONENT)
        .then_some((sign * value.re) as i32)
}

/// Parses `src` as a function of `dims` variables.
pub fn parse(src: &str, dims: usize) -> std::result::Result<ExprAst, ParseError> {
    if dims == 0 {
        return Err(ParseError::new(0, "dimension must be at least 1", None));
    }
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ParseError::new(0, "empty expression", Some("operand")));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
        dims,
    };
    let root = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(ParseError::new(p.offset(), "trailing input", Some("operator or end of input")));
    }
    Ok(ExprAst { root, dims })
}
