//! Expression language for the user-supplied functions (eigenvalue entries,
//! constraint right-hand sides, closures, initial data).
//!
//! Grammar:
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := unary ('^' factor)?          right associative
//! unary   := '-' unary | primary
//! primary := number | ident | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ident   := 'u'digit+ | 't' | 'x' | 's' | 'pi'
//! func    := exp | log | sin | cos | sqrt | tanh | pow
//! ```
//!
//! Named constants (descriptor `params`) are resolved by the parser and
//! become numeric literals in the tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::dual::Scalar;
use crate::error::{EvalError, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    X,
    /// The characteristic label σ.
    S,
    /// `u{i+1}`; zero based.
    U(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => f.write_str("t"),
            Var::X => f.write_str("x"),
            Var::S => f.write_str("s"),
            Var::U(i) => write!(f, "u{}", i + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Tanh,
    Pow,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Pow => "pow",
        }
    }

    fn n_args(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// `base ^ exp`; `int_exp` is set when the exponent is a variable-free integer.
    Pow { base: Box<Expr>, exp: Box<Expr>, int_exp: Option<i32> },
    Call(Func, Vec<Expr>),
}

/// Variable bindings for one evaluation.
#[derive(Clone, Copy, Debug)]
pub struct Bindings<'a, T> {
    pub t: T,
    pub x: T,
    pub s: T,
    pub u: &'a [T],
}

impl Expr {
    pub fn free_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Num(_) | Expr::Pi => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Neg(e) => e.free_vars(out),
            Expr::Bin(_, a, b) | Expr::Pow { base: a, exp: b, .. } => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.free_vars(out)),
        }
    }

    fn is_constant(&self) -> bool {
        let mut vars = BTreeSet::new();
        self.free_vars(&mut vars);
        vars.is_empty()
    }

    fn pow(base: Expr, exp: Expr) -> Expr {
        let int_exp = exp.integer_exponent();
        Expr::Pow { base: Box::new(base), exp: Box::new(exp), int_exp }
    }

    /// Integer value of a variable-free exponent, if it is one.
    fn integer_exponent(&self) -> Option<i32> {
        if !self.is_constant() {
            return None;
        }
        let v = self.eval::<f64>(&Bindings { t: 0.0, x: 0.0, s: 0.0, u: &[] }).ok()?;
        if v.fract() == 0.0 && v.abs() <= 1024.0 {
            Some(v as i32)
        } else {
            None
        }
    }

    pub fn eval<T: Scalar>(&self, b: &Bindings<'_, T>) -> Result<T, EvalError> {
        let v = match self {
            Expr::Num(v) => T::cst(*v),
            Expr::Pi => T::cst(std::f64::consts::PI),
            Expr::Var(Var::T) => b.t,
            Expr::Var(Var::X) => b.x,
            Expr::Var(Var::S) => b.s,
            Expr::Var(Var::U(i)) => *b.u.get(*i).ok_or(EvalError::Arity {
                expected: i + 1,
                got: b.u.len(),
            })?,
            Expr::Neg(e) => -e.eval(b)?,
            Expr::Bin(op, l, r) => {
                let lv = l.eval(b)?;
                let rv = r.eval(b)?;
                match op {
                    BinOp::Add => lv + rv,
                    BinOp::Sub => lv - rv,
                    BinOp::Mul => lv * rv,
                    BinOp::Div => {
                        if rv.re() == 0.0 {
                            return Err(self.domain("division by zero"));
                        }
                        lv / rv
                    }
                }
            }
            Expr::Pow { base, exp, int_exp } => {
                let bv = base.eval(b)?;
                let ev = exp.eval(b)?;
                self.power(bv, ev, *int_exp)?
            }
            Expr::Call(func, args) => {
                let a = args[0].eval(b)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a.re() <= 0.0 {
                            return Err(self.domain("log of non-positive value"));
                        }
                        a.ln()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tanh => a.tanh(),
                    Func::Sqrt => {
                        if a.re() < 0.0 {
                            return Err(self.domain("sqrt of negative value"));
                        }
                        if a.re() == 0.0 && T::DIFFERENTIATED {
                            return Err(EvalError::NonDifferentiable { subexpr: self.to_string() });
                        }
                        a.sqrt()
                    }
                    Func::Pow => unreachable!("pow() is parsed into Expr::Pow"),
                }
            }
        };
        if !v.re().is_finite() {
            return Err(self.domain("non-finite value"));
        }
        Ok(v)
    }

    fn power<T: Scalar>(&self, base: T, exp: T, int_exp: Option<i32>) -> Result<T, EvalError> {
        if let Some(n) = int_exp {
            if n < 0 && base.re() == 0.0 {
                return Err(self.domain("zero raised to a negative power"));
            }
            return Ok(base.powi(n));
        }
        let b = base.re();
        if b > 0.0 {
            Ok((exp * base.ln()).exp())
        } else if b == 0.0 && exp.re() > 0.0 && !T::DIFFERENTIATED {
            Ok(T::cst(0.0))
        } else if b == 0.0 && exp.re() > 0.0 {
            Err(EvalError::NonDifferentiable { subexpr: self.to_string() })
        } else {
            Err(self.domain("non-integer power of a non-positive base"))
        }
    }

    fn domain(&self, what: &'static str) -> EvalError {
        EvalError::Domain { what, subexpr: self.to_string() }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        write!(f, "(-{:?})", -v)
    } else {
        write!(f, "{v:?}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write_num(f, *v),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow { base, exp, .. } => write!(f, "({base} ^ {exp})"),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
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
                message: format!("malformed number '{text}'"),
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character '{c}'"),
                })
            }
        };
        out.push((tok, start));
        i += c.len_utf8();
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    arity: usize,
    constants: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.offset(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if matches!(self.peek(), Tok::Op('^')) {
            self.bump();
            let exp = self.factor()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Tok::Op('-')) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, offset),
            Tok::End => Err(ParseError::Syntax {
                offset,
                message: "unexpected end of expression".into(),
            }),
            other => Err(ParseError::Syntax { offset, message: format!("unexpected token {other:?}") }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            _ => self.syntax("expected ')'"),
        }
    }

    fn ident(&mut self, name: String, offset: usize) -> Result<Expr, ParseError> {
        if let Some(func) = Func::from_name(&name) {
            if !matches!(self.peek(), Tok::LParen) {
                return self.syntax(format!("expected '(' after function '{name}'"));
            }
            self.bump();
            let mut args = vec![self.expr()?];
            while matches!(self.peek(), Tok::Comma) {
                self.bump();
                args.push(self.expr()?);
            }
            self.expect_rparen()?;
            if args.len() != func.n_args() {
                return Err(ParseError::FuncArgs {
                    func: name,
                    expected: func.n_args(),
                    got: args.len(),
                    offset,
                });
            }
            if func == Func::Pow {
                let exp = args.pop().expect("two arguments");
                let base = args.pop().expect("two arguments");
                return Ok(Expr::pow(base, exp));
            }
            return Ok(Expr::Call(func, args));
        }
        match name.as_str() {
            "t" => return Ok(Expr::Var(Var::T)),
            "x" => return Ok(Expr::Var(Var::X)),
            "s" => return Ok(Expr::Var(Var::S)),
            "pi" => return Ok(Expr::Pi),
            _ => {}
        }
        if let Some(digits) = name.strip_prefix('u') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let k: usize = digits.parse().map_err(|_| ParseError::UnknownIdent {
                    name: name.clone(),
                    offset,
                })?;
                if k == 0 || k > self.arity {
                    return Err(ParseError::Arity { ident: name, arity: self.arity, offset });
                }
                return Ok(Expr::Var(Var::U(k - 1)));
            }
        }
        if let Some(v) = self.constants.get(&name) {
            return Ok(Expr::Num(*v));
        }
        Err(ParseError::UnknownIdent { name, offset })
    }
}

/// Names that descriptor parameters may not shadow.
pub fn is_reserved(name: &str) -> bool {
    if Func::from_name(name).is_some() || matches!(name, "t" | "x" | "s" | "pi") {
        return true;
    }
    name.strip_prefix('u')
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

pub fn parse(src: &str, arity: usize, constants: &BTreeMap<String, f64>) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, arity, constants };
    let e = p.expr()?;
    if !matches!(p.peek(), Tok::End) {
        return p.syntax("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str, n: usize) -> Result<Expr, ParseError> {
        parse(src, n, &BTreeMap::new())
    }

    fn ev(e: &Expr, u: &[f64]) -> f64 {
        e.eval(&Bindings { t: 0.0, x: 0.0, s: 0.0, u }).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev(&p("1 + 2 * 3", 0).unwrap(), &[]), 7.0);
        assert_eq!(ev(&p("2 ^ 3 ^ 2", 0).unwrap(), &[]), 512.0);
        assert_eq!(ev(&p("8 / 4 / 2", 0).unwrap(), &[]), 1.0);
        assert_eq!(ev(&p("1 - 2 - 3", 0).unwrap(), &[]), -4.0);
        // unary binds tighter than '^' in this grammar
        assert_eq!(ev(&p("-2^2", 0).unwrap(), &[]), 4.0);
        assert_eq!(ev(&p("2.5e-1 * 4", 0).unwrap(), &[]), 1.0);
    }

    #[test]
    fn errors_carry_offsets() {
        match p("u1 + * 2", 1) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(p("foo + 1", 1), Err(ParseError::UnknownIdent { offset: 0, .. })));
        assert!(matches!(p("u3", 2), Err(ParseError::Arity { arity: 2, .. })));
        assert!(matches!(p("u0", 2), Err(ParseError::Arity { .. })));
        assert!(matches!(p("pow(u1)", 1), Err(ParseError::FuncArgs { .. })));
        assert!(matches!(p("exp u1", 1), Err(ParseError::Syntax { .. })));
        assert!(matches!(p("(u1", 1), Err(ParseError::Syntax { .. })));
        assert!(matches!(p("   ", 1), Err(ParseError::Empty)));
        assert!(matches!(p("u1 $", 1), Err(ParseError::Syntax { offset: 3, .. })));
    }

    #[test]
    fn constants_are_substituted() {
        let mut c = BTreeMap::new();
        c.insert("a".to_string(), 1.0);
        let e = parse("-(u3*u2 + a*u4)/(u3 + a)", 4, &c).unwrap();
        assert_eq!(ev(&e, &[1.0, 2.0, 3.0, 4.0]), -2.5);
    }

    #[test]
    fn reserved_names() {
        assert!(is_reserved("u12"));
        assert!(is_reserved("exp"));
        assert!(is_reserved("s"));
        assert!(!is_reserved("a"));
        assert!(!is_reserved("u"));
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = p("1 + log(u2)", 2).unwrap();
        match e.eval(&Bindings { t: 0.0, x: 0.0, s: 0.0, u: &[1.0, 0.0] }) {
            Err(EvalError::Domain { subexpr, .. }) => assert_eq!(subexpr, "log(u2)"),
            other => panic!("{other:?}"),
        }
        let e = p("1/(u1 - 1)", 1).unwrap();
        assert!(matches!(
            e.eval(&Bindings { t: 0.0, x: 0.0, s: 0.0, u: &[1.0] }),
            Err(EvalError::Domain { .. })
        ));
        let e = p("(-2)^0.5", 0).unwrap();
        assert!(e.eval(&Bindings { t: 0.0, x: 0.0, s: 0.0, u: &[] }).is_err());
        let e = p("(-2)^3", 0).unwrap();
        assert_eq!(ev(&e, &[]), -8.0);
    }
}
