//! Closed-form scalar expressions over the chart coordinates.
//!
//! Coefficients of every form, field and metric are [`Expr`] trees. The
//! smart constructors fold constants and apply `x + 0`, `x * 0`, `x * 1`
//! style rules only; no further canonicalization is attempted, so identity
//! checks are done by evaluating both sides at sample points.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use crate::chart::{ChartPoint, Coord};
use crate::error::{Error, Result};

/// Exponent `num/den` in lowest terms with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i32,
    den: u32,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };
    pub const HALF: Rational = Rational { num: 1, den: 2 };

    pub fn new(num: i32, den: i32) -> Rational {
        assert!(den != 0, "zero denominator in rational exponent");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Rational {
            num: sign * num / g as i32,
            den: den.unsigned_abs() / g,
        }
    }

    pub const fn integer(n: i32) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn num(self) -> i32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn minus_one(self) -> Rational {
        Rational::new(self.num - self.den as i32, self.den as i32)
    }

    /// `base^self`, or `None` outside the real domain.
    pub fn pow(self, base: f64) -> Option<f64> {
        if base == 0.0 && self.num < 0 {
            return None;
        }
        if self.den == 1 {
            return Some(libm::pow(base, self.num as f64));
        }
        if base < 0.0 {
            if self.den.is_multiple_of(2) {
                return None;
            }
            // odd root of a negative number
            let mag = libm::pow(-base, self.to_f64());
            return Some(if self.num % 2 == 0 { mag } else { -mag });
        }
        if self.den == 2 {
            return Some(libm::pow(libm::sqrt(base), self.num as f64));
        }
        Some(libm::pow(base, self.to_f64()))
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Coord(Coord),
    /// The mass parameter, read from the evaluation point.
    Mass,
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Rational),
    Exp(Expr),
    Ln(Expr),
    Sin(Expr),
    Cos(Expr),
}

/// Immutable, cheaply clonable expression tree.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Expr {
    fn wrap(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Expr {
        Expr::wrap(Node::Const(c))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn coord(c: Coord) -> Expr {
        Expr::wrap(Node::Coord(c))
    }

    pub fn u() -> Expr {
        Expr::coord(Coord::U)
    }

    pub fn v() -> Expr {
        Expr::coord(Coord::V)
    }

    pub fn r() -> Expr {
        Expr::coord(Coord::R)
    }

    pub fn t() -> Expr {
        Expr::coord(Coord::T)
    }

    pub fn mass() -> Expr {
        Expr::wrap(Node::Mass)
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn add(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            (Some(0.0), _) => b.clone(),
            (_, Some(0.0)) => a.clone(),
            _ => Expr::wrap(Node::Add(a.clone(), b.clone())),
        }
    }

    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x * y),
            (Some(0.0), _) => Expr::zero(),
            (_, Some(0.0)) => Expr::zero(),
            (Some(1.0), _) => b.clone(),
            (_, Some(1.0)) => a.clone(),
            _ => Expr::wrap(Node::Mul(a.clone(), b.clone())),
        }
    }

    pub fn div(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::constant(x / y),
            (Some(0.0), _) => Expr::zero(),
            (_, Some(1.0)) => a.clone(),
            _ => Expr::wrap(Node::Div(a.clone(), b.clone())),
        }
    }

    pub fn neg(a: &Expr) -> Expr {
        Expr::mul(&Expr::constant(-1.0), a)
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        Expr::add(a, &Expr::neg(b))
    }

    pub fn pow(a: &Expr, q: Rational) -> Expr {
        if q == Rational::ZERO {
            return Expr::one();
        }
        if q == Rational::ONE {
            return a.clone();
        }
        if let Some(x) = a.as_const() {
            if let Some(y) = q.pow(x) {
                return Expr::constant(y);
            }
        }
        Expr::wrap(Node::Pow(a.clone(), q))
    }

    pub fn powi(&self, n: i32) -> Expr {
        Expr::pow(self, Rational::integer(n))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::pow(self, Rational::HALF)
    }

    pub fn exp(&self) -> Expr {
        match self.as_const() {
            Some(x) => Expr::constant(libm::exp(x)),
            None => Expr::wrap(Node::Exp(self.clone())),
        }
    }

    pub fn ln(&self) -> Expr {
        match self.as_const() {
            Some(x) if x > 0.0 => Expr::constant(libm::log(x)),
            _ => Expr::wrap(Node::Ln(self.clone())),
        }
    }

    pub fn sin(&self) -> Expr {
        match self.as_const() {
            Some(x) => Expr::constant(libm::sin(x)),
            None => Expr::wrap(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Expr {
        match self.as_const() {
            Some(x) => Expr::constant(libm::cos(x)),
            None => Expr::wrap(Node::Cos(self.clone())),
        }
    }

    /// Evaluates the closed form at a validated chart point.
    pub fn eval(&self, p: &ChartPoint) -> Result<f64> {
        let fail = |reason| Error::Evaluation { point: *p, reason };
        let value = match self.node() {
            Node::Const(c) => *c,
            Node::Coord(c) => p.coord(*c),
            Node::Mass => p.m,
            Node::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Node::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Node::Div(a, b) => {
                let d = b.eval(p)?;
                if d == 0.0 {
                    return Err(fail("division by zero"));
                }
                a.eval(p)? / d
            }
            Node::Pow(a, q) => q
                .pow(a.eval(p)?)
                .ok_or_else(|| fail("power outside real domain"))?,
            Node::Exp(a) => libm::exp(a.eval(p)?),
            Node::Ln(a) => {
                let x = a.eval(p)?;
                if x <= 0.0 {
                    return Err(fail("logarithm of a non-positive value"));
                }
                libm::log(x)
            }
            Node::Sin(a) => libm::sin(a.eval(p)?),
            Node::Cos(a) => libm::cos(a.eval(p)?),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(fail("non-finite result"))
        }
    }

    /// Exact partial derivative with respect to one chart coordinate.
    pub fn diff(&self, c: Coord) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Mass => Expr::zero(),
            Node::Coord(x) => {
                if *x == c {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(a, b) => Expr::add(&a.diff(c), &b.diff(c)),
            Node::Mul(a, b) => Expr::add(&Expr::mul(&a.diff(c), b), &Expr::mul(a, &b.diff(c))),
            Node::Div(a, b) => {
                let num = Expr::sub(&Expr::mul(&a.diff(c), b), &Expr::mul(a, &b.diff(c)));
                Expr::div(&num, &b.powi(2))
            }
            Node::Pow(a, q) => {
                let da = a.diff(c);
                if da.is_zero() {
                    return Expr::zero();
                }
                let outer = Expr::mul(&Expr::constant(q.to_f64()), &Expr::pow(a, q.minus_one()));
                Expr::mul(&outer, &da)
            }
            Node::Exp(a) => Expr::mul(&self.clone(), &a.diff(c)),
            Node::Ln(a) => Expr::div(&a.diff(c), a),
            Node::Sin(a) => Expr::mul(&a.cos(), &a.diff(c)),
            Node::Cos(a) => Expr::neg(&Expr::mul(&a.sin(), &a.diff(c))),
        }
    }

    /// Whether the expression mentions coordinate `c` structurally.
    pub fn depends_on(&self, c: Coord) -> bool {
        match self.node() {
            Node::Const(_) | Node::Mass => false,
            Node::Coord(x) => *x == c,
            Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_on(c) || b.depends_on(c)
            }
            Node::Pow(a, _) | Node::Exp(a) | Node::Ln(a) | Node::Sin(a) | Node::Cos(a) => {
                a.depends_on(c)
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Mass | Node::Coord(_) => 1,
            Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => 1 + a.size() + b.size(),
            Node::Pow(a, _) | Node::Exp(a) | Node::Ln(a) | Node::Sin(a) | Node::Cos(a) => {
                1 + a.size()
            }
        }
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

impl From<Coord> for Expr {
    fn from(c: Coord) -> Expr {
        Expr::coord(c)
    }
}

macro_rules! binary_ops {
    ($($tr:ident $method:ident $ctor:ident;)*) => {$(
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr { Expr::$ctor(&self, &rhs) }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr { Expr::$ctor(&self, rhs) }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr { Expr::$ctor(self, &rhs) }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr { Expr::$ctor(self, rhs) }
        }
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr { Expr::$ctor(&self, &Expr::constant(rhs)) }
        }
        impl $tr<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr { Expr::$ctor(self, &Expr::constant(rhs)) }
        }
        impl $tr<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr { Expr::$ctor(&Expr::constant(self), &rhs) }
        }
        impl $tr<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr { Expr::$ctor(&Expr::constant(self), rhs) }
        }
    )*};
}

binary_ops! {
    Add add add;
    Sub sub sub;
    Mul mul mul;
    Div div div;
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

/// Prefix (s-expression) text form, e.g. `(* 0.5 (ln (+ 1.0 (* -2.0 (/ m r)))))`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{:?}", c),
            Node::Coord(c) => f.write_str(c.name()),
            Node::Mass => f.write_str("m"),
            Node::Add(a, b) => write!(f, "(+ {} {})", a, b),
            Node::Mul(a, b) => write!(f, "(* {} {})", a, b),
            Node::Div(a, b) => write!(f, "(/ {} {})", a, b),
            Node::Pow(a, q) => write!(f, "(^ {} {})", a, q),
            Node::Exp(a) => write!(f, "(exp {})", a),
            Node::Ln(a) => write!(f, "(ln {})", a),
            Node::Sin(a) => write!(f, "(sin {})", a),
            Node::Cos(a) => write!(f, "(cos {})", a),
        }
    }
}

impl FromStr for Expr {
    type Err = Error;

    /// Parses the prefix form produced by `Display`. Nodes are rebuilt
    /// verbatim, without constant folding.
    fn from_str(s: &str) -> Result<Expr> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let e = parse_expr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(parse_error(&tokens, pos, "trailing input"));
        }
        Ok(e)
    }
}

struct Token<'a> {
    text: &'a str,
    offset: usize,
}

fn tokenize(s: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        let is_delim = ch == '(' || ch == ')' || ch.is_whitespace();
        if is_delim {
            if let Some(st) = start.take() {
                out.push(Token { text: &s[st..i], offset: st });
            }
            if !ch.is_whitespace() {
                out.push(Token { text: &s[i..i + 1], offset: i });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(Token { text: &s[st..], offset: st });
    }
    out
}

fn parse_error(tokens: &[Token<'_>], pos: usize, msg: &str) -> Error {
    let offset = tokens
        .get(pos)
        .map(|t| t.offset)
        .or_else(|| tokens.last().map(|t| t.offset + t.text.len()))
        .unwrap_or(0);
    Error::Parse { pos: offset, msg: msg.to_string() }
}

fn parse_expr(tokens: &[Token<'_>], pos: &mut usize) -> Result<Expr> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| parse_error(tokens, *pos, "unexpected end of input"))?;
    *pos += 1;
    if tok.text != "(" {
        return parse_atom(tokens, *pos - 1);
    }
    let head = tokens
        .get(*pos)
        .ok_or_else(|| parse_error(tokens, *pos, "missing operator"))?
        .text;
    *pos += 1;
    let node = match head {
        "+" | "*" | "/" => {
            let a = parse_expr(tokens, pos)?;
            let b = parse_expr(tokens, pos)?;
            match head {
                "+" => Node::Add(a, b),
                "*" => Node::Mul(a, b),
                _ => Node::Div(a, b),
            }
        }
        "^" => {
            let a = parse_expr(tokens, pos)?;
            let q = tokens
                .get(*pos)
                .ok_or_else(|| parse_error(tokens, *pos, "missing exponent"))?;
            let q = parse_rational(q.text).ok_or_else(|| parse_error(tokens, *pos, "bad exponent"))?;
            *pos += 1;
            Node::Pow(a, q)
        }
        "exp" | "ln" | "sin" | "cos" => {
            let a = parse_expr(tokens, pos)?;
            match head {
                "exp" => Node::Exp(a),
                "ln" => Node::Ln(a),
                "sin" => Node::Sin(a),
                _ => Node::Cos(a),
            }
        }
        _ => return Err(parse_error(tokens, *pos - 1, "unknown operator")),
    };
    match tokens.get(*pos) {
        Some(t) if t.text == ")" => {
            *pos += 1;
            Ok(Expr::wrap(node))
        }
        _ => Err(parse_error(tokens, *pos, "expected ')'")),
    }
}

fn parse_atom(tokens: &[Token<'_>], pos: usize) -> Result<Expr> {
    let text = tokens[pos].text;
    if text == "m" {
        return Ok(Expr::mass());
    }
    if let Some(c) = Coord::from_name(text) {
        return Ok(Expr::coord(c));
    }
    text.parse::<f64>()
        .map(Expr::constant)
        .map_err(|_| parse_error(tokens, pos, "unknown atom"))
}

fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i32 = d.parse().ok()?;
            if d <= 0 {
                return None;
            }
            let r = Rational::new(n.parse().ok()?, d);
            // reject non-canonical spellings so text round-trips exactly
            (r.den as i32 == d).then_some(r)
        }
        None => Some(Rational::integer(s.parse().ok()?)),
    }
}

/// Mixed absolute/relative discrepancy `|a - b| / max(1, |a|, |b|)`.
///
/// Used by every pointwise identity check: absolute for quantities of order
/// one or smaller, relative for large coefficients near the horizon.
pub fn scaled_residual(a: f64, b: f64) -> f64 {
    libm::fabs(a - b) / libm::fmax(1.0, libm::fmax(libm::fabs(a), libm::fabs(b)))
}

/// Pure relative discrepancy, falling back to absolute when both vanish.
pub fn relative_residual(a: f64, b: f64) -> f64 {
    let scale = libm::fmax(libm::fabs(a), libm::fabs(b));
    if scale == 0.0 {
        0.0
    } else {
        libm::fabs(a - b) / scale
    }
}
