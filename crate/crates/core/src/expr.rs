//! Arithmetic expressions in the variables `t` and `x`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          // right associative
//! atom    := number | 't' | 'x' | 'pi' | name '(' args ')' | '(' sum ')'
//! ```
//!
//! Functions: `sin cos exp log sqrt abs` (one argument), `min max` (two).

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    T,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    source: String,
    root: Node,
}

impl Expression {
    pub fn parse(src: &str) -> Result<Expression> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let root = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expression { source: src.to_string(), root })
    }

    pub fn from_node(root: Node) -> Expression {
        let source = root.to_string();
        Expression { source, root }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        let v = self.root.eval(t, x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::EvaluationError(format!("non-finite value at (t, x) = ({t}, {x})")))
        }
    }

    /// Symbolic partial derivative.
    pub fn derivative(&self, v: Var) -> Expression {
        Expression::from_node(self.root.derivative(v))
    }
}

impl Node {
    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        Ok(match self {
            Node::Num(c) => *c,
            Node::Var(Var::T) => t,
            Node::Var(Var::X) => x,
            Node::Neg(a) => -a.eval(t, x)?,
            Node::Bin(op, a, b) => {
                let (a, b) = (a.eval(t, x)?, b.eval(t, x)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Error::EvaluationError("division by zero".into()));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        let r = a.powf(b);
                        if r.is_nan() {
                            return Err(Error::EvaluationError(format!("{a}^{b} is undefined")));
                        }
                        r
                    }
                }
            }
            Node::Call(f, args) => {
                let a = args[0].eval(t, x)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(Error::EvaluationError(format!("log of {a}")));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(Error::EvaluationError(format!("sqrt of {a}")));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Min => a.min(args[1].eval(t, x)?),
                    Func::Max => a.max(args[1].eval(t, x)?),
                }
            }
        })
    }

    fn is_const(&self, c: f64) -> bool {
        matches!(self, Node::Num(v) if *v == c)
    }

    pub fn derivative(&self, v: Var) -> Node {
        use Node::*;
        match self {
            Num(_) => Num(0.0),
            Var(w) => Num(if *w == v { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.derivative(v)),
            Bin(op, a, b) => {
                let (da, db) = (a.derivative(v), b.derivative(v));
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul(da, b), mul(a, db)),
                    BinOp::Div => div(sub(mul(da, b.clone()), mul(a, db)), pow(b, Num(2.0))),
                    BinOp::Pow => {
                        if let Num(c) = b {
                            // c a^(c-1) a'
                            mul(mul(Num(c), pow(a, Num(c - 1.0))), da)
                        } else {
                            // a^b (b' log a + b a'/a)
                            let me = pow(a.clone(), b.clone());
                            mul(me, add(mul(db, call(Func::Log, a.clone())), div(mul(b, da), a)))
                        }
                    }
                }
            }
            Call(f, args) => {
                let a = args[0].clone();
                let da = a.derivative(v);
                match f {
                    Func::Sin => mul(call(Func::Cos, a), da),
                    Func::Cos => neg(mul(call(Func::Sin, a), da)),
                    Func::Exp => mul(call(Func::Exp, a), da),
                    Func::Log => div(da, a),
                    Func::Sqrt => div(da, mul(Num(2.0), call(Func::Sqrt, a))),
                    // sign(a) a', written as a a' / |a|
                    Func::Abs => div(mul(a.clone(), da), call(Func::Abs, a)),
                    Func::Min | Func::Max => {
                        // derivative of the active branch: (a' + b')/2 -/+ sign(a-b)(a' - b')/2
                        let b = args[1].clone();
                        let db = b.derivative(v);
                        let diff = sub(a.clone(), b.clone());
                        let sign = div(diff.clone(), call(Func::Abs, diff));
                        let half_sum = mul(Num(0.5), add(da.clone(), db.clone()));
                        let half_diff = mul(Num(0.5), mul(sign, sub(da, db)));
                        if *f == Func::Max {
                            add(half_sum, half_diff)
                        } else {
                            sub(half_sum, half_diff)
                        }
                    }
                }
            }
        }
    }
}

fn add(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Num(x), Node::Num(y)) => Node::Num(x + y),
        _ if a.is_const(0.0) => b,
        _ if b.is_const(0.0) => a,
        _ => Node::Bin(BinOp::Add, Box::new(a), Box::new(b)),
    }
}

fn sub(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Num(x), Node::Num(y)) => Node::Num(x - y),
        _ if b.is_const(0.0) => a,
        _ if a.is_const(0.0) => neg(b),
        _ => Node::Bin(BinOp::Sub, Box::new(a), Box::new(b)),
    }
}

fn mul(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Num(x), Node::Num(y)) => Node::Num(x * y),
        _ if a.is_const(0.0) || b.is_const(0.0) => Node::Num(0.0),
        _ if a.is_const(1.0) => b,
        _ if b.is_const(1.0) => a,
        _ => Node::Bin(BinOp::Mul, Box::new(a), Box::new(b)),
    }
}

fn div(a: Node, b: Node) -> Node {
    if a.is_const(0.0) {
        return Node::Num(0.0);
    }
    if b.is_const(1.0) {
        return a;
    }
    Node::Bin(BinOp::Div, Box::new(a), Box::new(b))
}

fn pow(a: Node, b: Node) -> Node {
    if b.is_const(1.0) {
        return a;
    }
    if b.is_const(0.0) {
        return Node::Num(1.0);
    }
    Node::Bin(BinOp::Pow, Box::new(a), Box::new(b))
}

fn neg(a: Node) -> Node {
    match a {
        Node::Num(c) => Node::Num(-c),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

fn call(f: Func, a: Node) -> Node {
    Node::Call(f, vec![a])
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(c) => {
                if *c < 0.0 {
                    write!(f, "({c:?})")
                } else {
                    write!(f, "{c:?}")
                }
            }
            Node::Var(Var::T) => write!(f, "t"),
            Node::Var(Var::X) => write!(f, "x"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a}{s}{b})")
            }
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for Expression {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Expression {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expression::parse(&s).map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::SyntaxError { position: self.pos, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Node> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if self.peek() == Some(b'(') {
                    let f = Func::lookup(name).ok_or_else(|| Error::UnknownFunction(name.to_string()))?;
                    self.pos += 1;
                    let mut args = vec![self.sum()?];
                    while self.eat(b',') {
                        args.push(self.sum()?);
                    }
                    if !self.eat(b')') {
                        return Err(self.error("expected `)` after arguments"));
                    }
                    if args.len() != f.arity() {
                        return Err(Error::SyntaxError {
                            position: start,
                            message: format!("{name} takes {} argument(s)", f.arity()),
                        });
                    }
                    return Ok(Node::Call(f, args));
                }
                match name {
                    "t" => Ok(Node::Var(Var::T)),
                    "x" => Ok(Node::Var(Var::X)),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    _ => Err(Error::SyntaxError {
                        position: start,
                        message: format!("unknown variable `{name}`"),
                    }),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Node::Num)
            .map_err(|_| Error::SyntaxError { position: start, message: format!("bad number `{text}`") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, t: f64, x: f64) -> f64 {
        Expression::parse(s).unwrap().eval(t, x).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(ev("-x^2", 0.0, 3.0), -9.0);
        assert_eq!(ev("1+2*3-4/2", 0.0, 0.0), 5.0);
        assert_eq!(ev("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(ev("(1+2)*3", 0.0, 0.0), 9.0);
        assert_eq!(ev("8/2/2", 0.0, 0.0), 2.0);
        assert_eq!(ev("1 - 2 - 3", 0.0, 0.0), -4.0);
    }

    #[test]
    fn conformal_factor_example() {
        let v = ev("1 + 0.3*sin(pi*x)*exp(-t^2)", 0.0, 0.5);
        assert!((v - 1.3).abs() < 1e-15);
    }

    #[test]
    fn functions() {
        assert_eq!(ev("min(t, x) + max(t, x)", 2.0, 5.0), 7.0);
        assert_eq!(ev("abs(-2.5e-1)", 0.0, 0.0), 0.25);
        assert!((ev("log(exp(1.5))", 0.0, 0.0) - 1.5).abs() < 1e-15);
        assert_eq!(ev("sqrt(16)", 0.0, 0.0), 4.0);
    }

    #[test]
    fn errors_carry_location() {
        match Expression::parse("1 + * 2") {
            Err(Error::SyntaxError { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Expression::parse("foo(x)"), Err(Error::UnknownFunction(n)) if n == "foo"));
        assert!(matches!(Expression::parse("(1+2"), Err(Error::SyntaxError { .. })));
        assert!(matches!(Expression::parse("y"), Err(Error::SyntaxError { .. })));
        let e = Expression::parse("log(x)").unwrap();
        assert!(matches!(e.eval(0.0, -1.0), Err(Error::EvaluationError(_))));
        let e = Expression::parse("1/x").unwrap();
        assert!(matches!(e.eval(0.0, 0.0), Err(Error::EvaluationError(_))));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            "1 + 0.3*sin(pi*x)*exp(-t^2)",
            "exp((t^2 - x^2)/4)",
            "sqrt(1 + t^2) * log(2 + x)",
            "x^t + cos(t*x)",
            "max(t, x^2) - min(2*t, x)",
            "abs(t - 0.3) / (1 + x)",
        ];
        let (t, x) = (0.37, 0.61);
        let h = 1e-6;
        for src in cases {
            let e = Expression::parse(src).unwrap();
            for (v, dt, dx) in [(Var::T, h, 0.0), (Var::X, 0.0, h)] {
                let d = e.derivative(v).eval(t, x).unwrap();
                let fd = (e.eval(t + dt, x + dx).unwrap() - e.eval(t - dt, x - dx).unwrap()) / (2.0 * h);
                assert!((d - fd).abs() < 1e-7 * (1.0 + d.abs()), "{src}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn display_round_trips() {
        let e = Expression::parse("-x^2 + 3*sin(t)/(1 - t)").unwrap();
        let back = Expression::parse(&e.root().to_string()).unwrap();
        for (t, x) in [(0.1, 0.2), (-0.4, 0.9)] {
            assert_eq!(e.eval(t, x).unwrap(), back.eval(t, x).unwrap());
        }
    }
}
