//! Scalar expressions in one real variable.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    S,
    T,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::S => "s",
            Variable::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

const FUNCS: [(&str, Func); 9] = [
    ("sin", Func::Sin),
    ("cos", Func::Cos),
    ("tan", Func::Tan),
    ("sinh", Func::Sinh),
    ("cosh", Func::Cosh),
    ("tanh", Func::Tanh),
    ("exp", Func::Exp),
    ("log", Func::Log),
    ("sqrt", Func::Sqrt),
];

impl Func {
    pub fn name(self) -> &'static str {
        FUNCS.iter().find(|(_, f)| *f == self).map(|(n, _)| *n).unwrap_or("?")
    }

    fn apply(self, x: f64) -> Option<f64> {
        let y = match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => {
                if x.cos() == 0.0 {
                    return None;
                }
                x.tan()
            }
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return None;
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return None;
                }
                x.sqrt()
            }
        };
        y.is_finite().then_some(y)
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
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    Var(Variable),
    Neg(Box<Ast>),
    Call(Func, Box<Ast>),
    Bin(BinOp, Box<Ast>, Box<Ast>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {offset}: expected {}", .expected.iter().cloned().collect::<Vec<_>>().join(", "))]
pub struct ParseError {
    /// 1-based byte offset.
    pub offset: usize,
    pub expected: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{what} is undefined at {variable} = {at}")]
pub struct EvalDomain {
    pub what: String,
    pub variable: &'static str,
    pub at: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    pub ast: Ast,
    pub variable: Variable,
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

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    /// Next token and its 0-based start.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() {
            let len = rest.find(|c: char| !c.is_ascii_alphanumeric()).unwrap_or(rest.len());
            self.pos += len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        self.pos += c.len_utf8();
        let tok = match c {
            '+' | '*' | '/' | '^' => Tok::Op(c),
            '-' | '−' => Tok::Op('-'),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ParseError {
                    offset: start + 1,
                    expected: ["expression".to_string()].into(),
                })
            }
        };
        Ok((tok, start))
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize), ParseError> {
        let bytes = self.src.as_bytes();
        let mut i = start;
        let digits = |i: &mut usize| {
            let from = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - from
        };
        let mut n = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            n += digits(&mut i);
        }
        if n == 0 {
            return Err(ParseError {
                offset: i + 1,
                expected: ["digit".to_string()].into(),
            });
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            i += 1;
            if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                i += 1;
            }
            if digits(&mut i) == 0 {
                return Err(ParseError {
                    offset: i + 1,
                    expected: ["digit".to_string()].into(),
                });
            }
        }
        let text = &self.src[start..i];
        let v: f64 = text.parse().map_err(|_| ParseError {
            offset: start + 1,
            expected: ["number".to_string()].into(),
        })?;
        if !v.is_finite() {
            return Err(ParseError {
                offset: start + 1,
                expected: ["finite number".to_string()].into(),
            });
        }
        self.pos = i;
        Ok((Tok::Num(v), start))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
    variable: Variable,
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lex.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn fail<T>(&self, expected: BTreeSet<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.at + 1,
            expected,
        })
    }

    fn primary_expected(&self) -> BTreeSet<String> {
        let mut e = set(&["number", "(", "function"]);
        e.insert(self.variable.name().to_string());
        e
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.tok {
            self.advance()?;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.factor()?;
        while let Tok::Op(c @ ('*' | '/')) = self.tok {
            self.advance()?;
            let rhs = self.factor()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Ast, ParseError> {
        let base = self.unary()?;
        if self.tok == Tok::Op('^') {
            self.advance()?;
            let exp = self.factor()?;
            return Ok(Ast::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if self.tok == Tok::Op('-') {
            self.advance()?;
            return Ok(Ast::Neg(Box::new(self.primary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Ast::Num(v))
            }
            Tok::LParen => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == self.variable.name() {
                    self.advance()?;
                    return Ok(Ast::Var(self.variable));
                }
                let Some(&(_, f)) = FUNCS.iter().find(|(n, _)| *n == name) else {
                    return self.fail(self.primary_expected());
                };
                self.advance()?;
                if self.tok != Tok::LParen {
                    return self.fail(set(&["("]));
                }
                self.advance()?;
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Ast::Call(f, Box::new(arg)))
            }
            _ => self.fail(self.primary_expected()),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return self.fail(set(&[")", "+", "-", "*", "/", "^"]));
        }
        self.advance()
    }
}

/// Parses `src` with free variable `variable`.
pub fn parse_expression(src: &str, variable: Variable) -> Result<Expression, ParseError> {
    let mut p = Parser {
        lex: Lexer { src, pos: 0 },
        tok: Tok::End,
        at: 0,
        variable,
    };
    p.advance()?;
    let ast = p.expr()?;
    if p.tok != Tok::End {
        return p.fail(set(&["end of input", "+", "-", "*", "/", "^"]));
    }
    Ok(Expression { ast, variable })
}

fn eval_ast(ast: &Ast, x: f64, var: Variable) -> Result<f64, EvalDomain> {
    let err = |what: String| EvalDomain {
        what,
        variable: var.name(),
        at: x,
    };
    let v = match ast {
        Ast::Num(v) => *v,
        Ast::Var(_) => x,
        Ast::Neg(a) => -eval_ast(a, x, var)?,
        Ast::Call(f, a) => {
            let arg = eval_ast(a, x, var)?;
            f.apply(arg).ok_or_else(|| err(format!("{}({arg})", f.name())))?
        }
        Ast::Bin(op, a, b) => {
            let (l, r) = (eval_ast(a, x, var)?, eval_ast(b, x, var)?);
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err(err(format!("{l} / 0")));
                    }
                    l / r
                }
                BinOp::Pow => l.powf(r),
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err(format!("`{ast}`", ast = Pretty(ast))))
    }
}

impl Expression {
    pub fn eval(&self, x: f64) -> Result<f64, EvalDomain> {
        eval_ast(&self.ast, x, self.variable)
    }
}

struct Pretty<'a>(&'a Ast);

/// Precedence of the printed form: sum 1, product 2, power 3, negation 4, atom 5.
fn precedence(ast: &Ast) -> u8 {
    match ast {
        Ast::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Ast::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Ast::Bin(BinOp::Pow, ..) => 3,
        Ast::Neg(_) => 4,
        _ => 5,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, ast: &Ast, min: u8) -> fmt::Result {
    if precedence(ast) < min {
        write!(f, "(")?;
        write_ast(f, ast)?;
        write!(f, ")")
    } else {
        write_ast(f, ast)
    }
}

fn write_ast(f: &mut fmt::Formatter<'_>, ast: &Ast) -> fmt::Result {
    match ast {
        Ast::Num(v) => write!(f, "{v}"),
        Ast::Var(v) => write!(f, "{}", v.name()),
        Ast::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, 5)
        }
        Ast::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_ast(f, a)?;
            write!(f, ")")
        }
        Ast::Bin(op, a, b) => {
            let (l, r) = match op {
                BinOp::Add | BinOp::Sub => (1, 2),
                BinOp::Mul | BinOp::Div => (2, 3),
                BinOp::Pow => (4, 3),
            };
            write_at(f, a, l)?;
            if *op == BinOp::Pow {
                write!(f, "^")?;
            } else {
                write!(f, " {} ", op.symbol())?;
            }
            write_at(f, b, r)
        }
    }
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ast(f, self.0)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ast(f, &self.ast)
    }
}
