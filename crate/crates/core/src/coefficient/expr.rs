//! Recursive-descent parser and evaluator for coefficient expressions in `t`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 't' | func '(' expr ')' | '(' expr ')'
//! func    := ln | exp | sin | cos | abs | sqrt
//! ```
//!
//! `^` binds tighter than unary minus, so `-t^2` is `-(t^2)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Ln,
    Exp,
    Sin,
    Cos,
    Abs,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "ln" => Func::Ln,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

const NEG_PRECEDENCE: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    Number(f64),
    Var,
    Neg(Box<ExprNode>),
    Binary(BinOp, Box<ExprNode>, Box<ExprNode>),
    Call(Func, Box<ExprNode>),
}

impl ExprNode {
    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match self {
            ExprNode::Number(v) => *v,
            ExprNode::Var => t,
            ExprNode::Neg(e) => -e.eval(t)?,
            ExprNode::Binary(op, a, b) => {
                let a = a.eval(t)?;
                let b = b.eval(t)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Error::Eval(format!("division by zero at t = {t}")));
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                }
            }
            ExprNode::Call(f, e) => {
                let x = e.eval(t)?;
                match f {
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(Error::Eval(format!(
                                "ln of non-positive value {x} at t = {t}"
                            )));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(Error::Eval(format!(
                                "sqrt of negative value {x} at t = {t}"
                            )));
                        }
                        x.sqrt()
                    }
                    Func::Exp => x.exp(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Abs => x.abs(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval(format!("non-finite value at t = {t}")))
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprNode::Binary(op, ..) => op.precedence(),
            ExprNode::Neg(_) => NEG_PRECEDENCE,
            _ => u8::MAX,
        }
    }
}

/// Prints with the minimum parentheses needed to reparse to the same tree.
impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &mut fmt::Formatter<'_>, e: &ExprNode, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            ExprNode::Number(v) => write!(f, "{v}"),
            ExprNode::Var => f.write_str("t"),
            ExprNode::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, e.precedence() < NEG_PRECEDENCE)
            }
            ExprNode::Call(func, e) => write!(f, "{}({e})", func.name()),
            ExprNode::Binary(op, a, b) => {
                let p = op.precedence();
                if *op == BinOp::Pow {
                    // base must be a primary; exponent may be any unary
                    wrap(f, a, a.precedence() <= p)?;
                    f.write_str("^")?;
                    wrap(f, b, b.precedence() < NEG_PRECEDENCE)
                } else {
                    wrap(f, a, a.precedence() < p)?;
                    write!(f, " {} ", op.symbol())?;
                    // left-associative: equal precedence on the right needs parens;
                    // a bare negation is a valid unary operand
                    let right_paren = match **b {
                        ExprNode::Neg(_) => false,
                        _ => b.precedence() <= p,
                    };
                    wrap(f, b, right_paren)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, expected: &[&str], found: String) -> Error {
    Error::Syntax {
        offset,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found,
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((i, Tok::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // optional exponent, only if followed by digits
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
                let v: f64 = text
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| syntax(start, &["finite number"], format!("`{text}`")))?;
                out.push((start, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(syntax(
                    i,
                    &["number", "`t`", "function", "operator", "`(`", "`)`"],
                    format!("`{ch}`"),
                ));
            }
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<ExprNode> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = ExprNode::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<ExprNode> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = ExprNode::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<ExprNode> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(ExprNode::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprNode> {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(ExprNode::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ExprNode> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(ExprNode::Number(v)),
            Tok::Ident(name) => {
                if name == "t" {
                    return Ok(ExprNode::Var);
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(Error::UnknownIdentifier { name, offset });
                };
                self.expect_lparen()?;
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(ExprNode::Call(func, Box::new(arg)))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            other => Err(syntax(
                offset,
                &["number", "`t`", "function", "`(`", "`-`"],
                other.describe(),
            )),
        }
    }

    fn expect_lparen(&mut self) -> Result<()> {
        let offset = self.offset();
        match self.bump() {
            Tok::LParen => Ok(()),
            other => Err(syntax(offset, &["`(`"], other.describe())),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let offset = self.offset();
        match self.bump() {
            Tok::RParen => Ok(()),
            other => Err(syntax(offset, &["`)`", "operator"], other.describe())),
        }
    }
}

/// Parses a coefficient expression. Implicit multiplication is not supported.
pub fn parse_expr(src: &str) -> Result<ExprNode> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    if *p.peek() == Tok::End {
        return Err(syntax(0, &["expression"], "end of input".into()));
    }
    let e = p.expr()?;
    let offset = p.offset();
    match p.peek() {
        Tok::End => Ok(e),
        other => Err(syntax(
            offset,
            &["operator", "end of input"],
            other.describe(),
        )),
    }
}
