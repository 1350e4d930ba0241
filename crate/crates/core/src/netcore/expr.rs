//! Arithmetic/logical expression language used by deterministic nodes.
//!
//! Grammar (EBNF), whitespace-insensitive:
//!
//! ```text
//! expr    = or ;
//! or      = and , { "or" , and } ;
//! and     = not , { "and" , not } ;
//! not     = "not" , not | cmp ;
//! cmp     = sum , [ ( "<" | "<=" | ">" | ">=" | "=" ) , sum ] ;
//! sum     = product , { ( "+" | "-" ) , product } ;
//! product = unary , { ( "*" | "/" ) , unary } ;
//! unary   = "-" , number | "-" , unary | primary ;
//! primary = number | ident | call | "(" , expr , ")" ;
//! call    = ( "min" | "max" ) , "(" , expr , "," , expr , ")"
//!         | "abs" , "(" , expr , ")"
//!         | "if" , "(" , expr , "," , expr , "," , expr , ")" ;
//! number  = digit , { digit } , [ "." , { digit } ] , [ ( "e" | "E" ) , [ "+" | "-" ] , digit , { digit } ] ;
//! ident   = letter | "_" , { letter | digit | "_" | "." } ;
//! ```
//!
//! `and`, `or`, `not`, `if`, `min`, `max` and `abs` are reserved words.
//! A minus sign written directly in front of a number token is part of the
//! literal (`-3` is `Literal(-3)`, `-(3)` is `Neg(Literal(3))`), so the
//! canonical printer round-trips.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Maximum nesting depth accepted by the parser.
pub const MAX_DEPTH: usize = 64;
/// Maximum number of AST nodes in one expression.
pub const MAX_NODES: usize = 4096;

const RESERVED: &[&str] = &["and", "or", "not", "if", "min", "max", "abs"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
    Abs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(f64),
    Ident(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at offset {position}: {message}")]
pub struct SyntaxError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
}

impl Expr {
    pub fn lit(v: f64) -> Self {
        Expr::Literal(v)
    }

    pub fn ident(name: impl Into<String>) -> Self {
        Expr::Ident(name.into())
    }

    /// Identifiers referenced anywhere in the tree, sorted.
    pub fn identifiers(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_idents(&mut out);
        out
    }

    fn collect_idents<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Literal(_) => {}
            Expr::Ident(name) => {
                out.insert(name.as_str());
            }
            Expr::Unary(_, a) => a.collect_idents(out),
            Expr::Binary(_, a, b) => {
                a.collect_idents(out);
                b.collect_idents(out);
            }
            Expr::If(c, a, b) => {
                c.collect_idents(out);
                a.collect_idents(out);
                b.collect_idents(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Literal(_) | Expr::Ident(_) => 1,
            Expr::Unary(_, a) => 1 + a.depth(),
            Expr::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
            Expr::If(c, a, b) => 1 + c.depth().max(a.depth()).max(b.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Literal(_) | Expr::Ident(_) => 1,
            Expr::Unary(_, a) => 1 + a.node_count(),
            Expr::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
            Expr::If(c, a, b) => 1 + c.node_count() + a.node_count() + b.node_count(),
        }
    }

    /// Replace every occurrence of `name` with a literal.
    pub fn substitute(&self, name: &str, value: f64) -> Expr {
        match self {
            Expr::Ident(n) if n == name => Expr::Literal(value),
            Expr::Literal(_) | Expr::Ident(_) => self.clone(),
            Expr::Unary(op, a) => Expr::Unary(*op, Box::new(a.substitute(name, value))),
            Expr::Binary(op, a, b) => Expr::Binary(
                *op,
                Box::new(a.substitute(name, value)),
                Box::new(b.substitute(name, value)),
            ),
            Expr::If(c, a, b) => Expr::If(
                Box::new(c.substitute(name, value)),
                Box::new(a.substitute(name, value)),
                Box::new(b.substitute(name, value)),
            ),
        }
    }

    /// Evaluate against a name → value environment.
    pub fn eval(&self, env: &HashMap<String, f64>) -> Result<f64, EvalError> {
        self.eval_with(&mut |name| env.get(name).copied())
    }

    /// Evaluate with an arbitrary identifier lookup.
    pub fn eval_with<F>(&self, lookup: &mut F) -> Result<f64, EvalError>
    where
        F: FnMut(&str) -> Option<f64>,
    {
        Ok(match self {
            Expr::Literal(v) => *v,
            Expr::Ident(name) => lookup(name).ok_or_else(|| EvalError::UnboundIdentifier(name.clone()))?,
            Expr::Unary(op, a) => {
                let a = a.eval_with(lookup)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Not => truth(a == 0.0),
                }
            }
            Expr::Binary(op, a, b) => {
                let a = a.eval_with(lookup)?;
                let b = b.eval_with(lookup)?;
                apply_binary(*op, a, b)?
            }
            Expr::If(c, a, b) => {
                if c.eval_with(lookup)? != 0.0 {
                    a.eval_with(lookup)?
                } else {
                    b.eval_with(lookup)?
                }
            }
        })
    }
}

#[inline]
fn truth(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub(crate) fn apply_binary(op: BinaryOp, a: f64, b: f64) -> Result<f64, EvalError> {
    Ok(match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            a / b
        }
        BinaryOp::Min => a.min(b),
        BinaryOp::Max => a.max(b),
        BinaryOp::Lt => truth(a < b),
        BinaryOp::Le => truth(a <= b),
        BinaryOp::Gt => truth(a > b),
        BinaryOp::Ge => truth(a >= b),
        BinaryOp::Eq => truth(a == b),
        BinaryOp::And => truth(a != 0.0 && b != 0.0),
        BinaryOp::Or => truth(a != 0.0 || b != 0.0),
    })
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let err = |position: usize, message: String| SyntaxError { position, message };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'/' => out.push((start, Tok::Slash)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b',' => out.push((start, Tok::Comma)),
            b'<' | b'>' => {
                let eq = bytes.get(i + 1) == Some(&b'=');
                let tok = match (c, eq) {
                    (b'<', false) => Tok::Lt,
                    (b'<', true) => Tok::Le,
                    (_, false) => Tok::Gt,
                    (_, true) => Tok::Ge,
                };
                if eq {
                    i += 1;
                }
                out.push((start, tok));
            }
            b'=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                }
                out.push((start, Tok::Eq));
            }
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
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| err(start, format!("malformed number `{s}`")))?;
                if !v.is_finite() {
                    return Err(err(start, format!("number `{s}` is not finite")));
                }
                out.push((start, Tok::Num(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'.') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(err(start, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn enter(&mut self) -> Result<(), SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error(format!("expression nested deeper than {MAX_DEPTH}"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.enter()?;
        let mut lhs = self.and()?;
        while self.is_word("or") {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = Expr::Binary(BinaryOp::Or, Box::new(lhs), Box::new(rhs));
        }
        self.leave();
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.not()?;
        while self.is_word("and") {
            self.pos += 1;
            let rhs = self.not()?;
            lhs = Expr::Binary(BinaryOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, SyntaxError> {
        if self.is_word("not") {
            self.pos += 1;
            self.enter()?;
            let inner = self.not()?;
            self.leave();
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(inner)));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Some(Tok::Lt) => BinaryOp::Lt,
            Some(Tok::Le) => BinaryOp::Le,
            Some(Tok::Gt) => BinaryOp::Gt,
            Some(Tok::Ge) => BinaryOp::Ge,
            Some(Tok::Eq) => BinaryOp::Eq,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.sum()?;
        if matches!(self.peek(), Some(Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::Eq)) {
            return self.error("comparisons are non-associative; add parentheses");
        }
        Ok(Expr::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinaryOp::Add,
                Some(Tok::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinaryOp::Mul,
                Some(Tok::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            if let Some(Tok::Num(v)) = self.peek() {
                let v = -*v;
                self.pos += 1;
                return Ok(Expr::Literal(v));
            }
            self.enter()?;
            let inner = self.unary()?;
            self.leave();
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Literal(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "min" | "max" | "abs" | "if" => {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    self.enter()?;
                    let first = self.expr()?;
                    let node = match name.as_str() {
                        "abs" => Expr::Unary(UnaryOp::Abs, Box::new(first)),
                        "if" => {
                            self.expect(Tok::Comma, "`,`")?;
                            let a = self.expr()?;
                            self.expect(Tok::Comma, "`,`")?;
                            let b = self.expr()?;
                            Expr::If(Box::new(first), Box::new(a), Box::new(b))
                        }
                        _ => {
                            self.expect(Tok::Comma, "`,`")?;
                            let second = self.expr()?;
                            let op = if name == "min" { BinaryOp::Min } else { BinaryOp::Max };
                            Expr::Binary(op, Box::new(first), Box::new(second))
                        }
                    };
                    self.leave();
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(node)
                }
                w if RESERVED.contains(&w) => Err(SyntaxError {
                    position: at,
                    message: format!("unexpected keyword `{w}`"),
                }),
                _ => Ok(Expr::Ident(name)),
            },
            Some(_) => Err(SyntaxError {
                position: at,
                message: "expected a number, identifier or `(`".into(),
            }),
            None => Err(SyntaxError {
                position: at,
                message: "unexpected end of expression".into(),
            }),
        }
    }
}

/// Parse expression text into an AST.
pub fn parse_expression(text: &str) -> Result<Expr, SyntaxError> {
    if text.trim().is_empty() {
        return Err(SyntaxError {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        depth: 0,
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.error("unexpected trailing input");
    }
    if e.node_count() > MAX_NODES {
        return Err(SyntaxError {
            position: 0,
            message: format!("expression has more than {MAX_NODES} nodes"),
        });
    }
    Ok(e)
}

/// Evaluate an expression. Comparisons and logic yield 1.0 / 0.0.
pub fn eval_expression(expr: &Expr, env: &HashMap<String, f64>) -> Result<f64, EvalError> {
    expr.eval(env)
}

// ---------------------------------------------------------------------------
// Canonical printer

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_NOT: u8 = 3;
const PREC_CMP: u8 = 4;
const PREC_SUM: u8 = 5;
const PREC_PRODUCT: u8 = 6;
const PREC_UNARY: u8 = 7;
const PREC_ATOM: u8 = 8;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Literal(v) if v.is_sign_negative() => PREC_UNARY,
        Expr::Literal(_) | Expr::Ident(_) | Expr::If(..) => PREC_ATOM,
        Expr::Unary(UnaryOp::Abs, _) => PREC_ATOM,
        Expr::Unary(UnaryOp::Neg, _) => PREC_UNARY,
        Expr::Unary(UnaryOp::Not, _) => PREC_NOT,
        Expr::Binary(op, ..) => match op {
            BinaryOp::Or => PREC_OR,
            BinaryOp::And => PREC_AND,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge | BinaryOp::Eq => PREC_CMP,
            BinaryOp::Add | BinaryOp::Sub => PREC_SUM,
            BinaryOp::Mul | BinaryOp::Div => PREC_PRODUCT,
            BinaryOp::Min | BinaryOp::Max => PREC_ATOM,
        },
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => write!(f, "{v}"),
            Expr::Ident(n) => f.write_str(n),
            Expr::Unary(UnaryOp::Abs, a) => write!(f, "abs({a})"),
            Expr::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                // a bare literal after `-` would lex as a negative literal
                if matches!(**a, Expr::Literal(_)) {
                    write!(f, "({a})")
                } else {
                    write_child(f, a, PREC_UNARY)
                }
            }
            Expr::Unary(UnaryOp::Not, a) => {
                f.write_str("not ")?;
                write_child(f, a, PREC_NOT)
            }
            Expr::If(c, a, b) => write!(f, "if({c}, {a}, {b})"),
            Expr::Binary(op, a, b) => {
                let (sym, prec) = match op {
                    BinaryOp::Min => return write!(f, "min({a}, {b})"),
                    BinaryOp::Max => return write!(f, "max({a}, {b})"),
                    BinaryOp::Or => ("or", PREC_OR),
                    BinaryOp::And => ("and", PREC_AND),
                    BinaryOp::Lt => ("<", PREC_CMP),
                    BinaryOp::Le => ("<=", PREC_CMP),
                    BinaryOp::Gt => (">", PREC_CMP),
                    BinaryOp::Ge => (">=", PREC_CMP),
                    BinaryOp::Eq => ("=", PREC_CMP),
                    BinaryOp::Add => ("+", PREC_SUM),
                    BinaryOp::Sub => ("-", PREC_SUM),
                    BinaryOp::Mul => ("*", PREC_PRODUCT),
                    BinaryOp::Div => ("/", PREC_PRODUCT),
                };
                // Left-associative: the right operand needs strictly higher precedence.
                // Comparisons are non-associative, so both sides need higher precedence.
                let left_min = if prec == PREC_CMP { prec + 1 } else { prec };
                write_child(f, a, left_min)?;
                write!(f, " {sym} ")?;
                write_child(f, b, prec + 1)
            }
        }
    }
}
