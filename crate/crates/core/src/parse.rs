//! Lexer and recursive-descent parser for the expression language.
//!
//! ```text
//! expr    := [+|-] tensor ((+|-) tensor)*
//! tensor  := product ['ox' product]
//! product := power (['*'] power)*
//! power   := atom ['^' ['-'] INT]
//! atom    := INT ['/' INT] | symbol | '$' name | '(' expr ')'
//! ```
//!
//! Parsing yields a [`Raw`] tree. Index lists may contain variables (`x[j]`)
//! when parsing templates; [`eval`] resolves them against an [`Env`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::clifford::{blade_product_checked, AlgebraKind, Blade};
use crate::error::{Error, Result, SyntaxError};
use crate::scalars::Scalar;
use crate::terms::{Entry, Expression, FunTag, Generator};

/// An index slot: a literal or a template variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Idx {
    Lit(u32),
    Var(String),
}

impl Idx {
    pub fn resolve(&self, env: &Env) -> Result<u32> {
        match self {
            Idx::Lit(n) => Ok(*n),
            Idx::Var(v) => env.index(v),
        }
    }
}

impl std::fmt::Display for Idx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Idx::Lit(n) => write!(f, "{n}"),
            Idx::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    Coordinate,
    Momentum,
    Partial,
    F,
    FComp,
    Df,
    DiracLeft,
    DiracRight,
    Entry(Entry),
}

impl GenKind {
    pub fn indexed(self) -> bool {
        matches!(
            self,
            GenKind::Coordinate
                | GenKind::Momentum
                | GenKind::Partial
                | GenKind::FComp
                | GenKind::Df
        )
    }

    pub fn build(self, j: Option<u32>) -> Generator {
        let j = j.unwrap_or(0);
        match self {
            GenKind::Coordinate => Generator::Coordinate(j),
            GenKind::Momentum => Generator::Momentum(j),
            GenKind::Partial => Generator::Partial(j),
            GenKind::F => Generator::Fun(FunTag::F),
            GenKind::FComp => Generator::Fun(FunTag::Comp(j)),
            GenKind::Df => Generator::Fun(FunTag::Df(j)),
            GenKind::DiracLeft => Generator::Fun(FunTag::DiracLeft),
            GenKind::DiracRight => Generator::Fun(FunTag::DiracRight),
            GenKind::Entry(e) => Generator::Entry(e),
        }
    }

    pub fn of(g: &Generator) -> (GenKind, Option<u32>) {
        match *g {
            Generator::Coordinate(j) => (GenKind::Coordinate, Some(j)),
            Generator::Momentum(j) => (GenKind::Momentum, Some(j)),
            Generator::Partial(j) => (GenKind::Partial, Some(j)),
            Generator::Fun(FunTag::F) => (GenKind::F, None),
            Generator::Fun(FunTag::Comp(j)) => (GenKind::FComp, Some(j)),
            Generator::Fun(FunTag::Df(j)) => (GenKind::Df, Some(j)),
            Generator::Fun(FunTag::DiracLeft) => (GenKind::DiracLeft, None),
            Generator::Fun(FunTag::DiracRight) => (GenKind::DiracRight, None),
            Generator::Entry(e) => (GenKind::Entry(e), None),
        }
    }
}

/// A generator with a possibly symbolic index, as written in a template.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenTemplate {
    pub kind: GenKind,
    pub index: Option<Idx>,
}

/// Unevaluated parse tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Raw {
    Num(BigRational),
    I,
    Hbar,
    Q,
    Qjk(Idx, Idx),
    Delta(Idx, Idx),
    Gen(GenTemplate),
    /// `E[...]`, `E0`, `be[...]`: product of generators in the written order.
    Blade(AlgebraKind, Vec<Idx>),
    /// `x0`, `x1`, ... in polynomial mode.
    PolyVar(u32),
    Var(String),
    Neg(Box<Raw>),
    Sum(Vec<Raw>),
    Prod(Vec<Raw>),
    Tensor(Box<Raw>, Box<Raw>),
    Pow(Box<Raw>, i64),
}

/// What the parser accepts beyond concrete expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Literal indices only.
    Concrete,
    /// Index variables allowed (`x[j]`, `delta[j,k]`).
    Template,
    /// Coordinates written `x0`, `x1`, ...
    Poly,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String, Option<Vec<Idx>>),
    Var(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Ox,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, token: &str, message: impl Into<String>) -> Error {
    Error::Syntax(SyntaxError {
        line,
        column: col,
        token: token.to_string(),
        message: message.into(),
    })
}

fn lex(text: &str, line: usize, col0: usize, mode: Mode) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let col = |i: usize| col0 + i;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            i += 1;
            out.push(Token {
                tok,
                text: c.to_string(),
                line,
                col: col(start),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n: BigInt = s.parse().expect("digits");
            out.push(Token {
                tok: Tok::Int(n),
                text: s,
                line,
                col: col(start),
            });
            continue;
        }
        if c == '$' {
            i += 1;
            let name_start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if name_start == i {
                return Err(syntax(line, col(start), "$", "expected a name after `$`"));
            }
            let name: String = chars[name_start..i].iter().collect();
            out.push(Token {
                tok: Tok::Var(name.clone()),
                text: format!("${name}"),
                line,
                col: col(start),
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            if name == "ox" {
                out.push(Token {
                    tok: Tok::Ox,
                    text: name,
                    line,
                    col: col(start),
                });
                continue;
            }
            let mut indices = None;
            if i < chars.len() && chars[i] == '[' {
                let open = i;
                i += 1;
                let mut list = Vec::new();
                loop {
                    while i < chars.len() && chars[i].is_whitespace() {
                        i += 1;
                    }
                    if i >= chars.len() {
                        return Err(syntax(line, col(open), "[", "unterminated index list"));
                    }
                    let item_start = i;
                    if chars[i].is_ascii_digit() {
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                        let s: String = chars[item_start..i].iter().collect();
                        let n: u32 = s
                            .parse()
                            .map_err(|_| syntax(line, col(item_start), &s, "index too large"))?;
                        if n == 0 {
                            return Err(syntax(line, col(item_start), &s, "indices start at 1"));
                        }
                        list.push(Idx::Lit(n));
                    } else if chars[i].is_ascii_alphabetic() {
                        while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                            i += 1;
                        }
                        let s: String = chars[item_start..i].iter().collect();
                        if mode != Mode::Template {
                            return Err(syntax(
                                line,
                                col(item_start),
                                &s,
                                "index variables are only allowed in rule templates",
                            ));
                        }
                        list.push(Idx::Var(s));
                    } else {
                        return Err(syntax(
                            line,
                            col(i),
                            &chars[i].to_string(),
                            "expected an index",
                        ));
                    }
                    while i < chars.len() && chars[i].is_whitespace() {
                        i += 1;
                    }
                    match chars.get(i) {
                        Some(',') => i += 1,
                        Some(']') => {
                            i += 1;
                            break;
                        }
                        Some(other) => {
                            return Err(syntax(
                                line,
                                col(i),
                                &other.to_string(),
                                "expected `,` or `]` in index list",
                            ))
                        }
                        None => {
                            return Err(syntax(line, col(open), "[", "unterminated index list"))
                        }
                    }
                }
                indices = Some(list);
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Ident(name, indices),
                text,
                line,
                col: col(start),
            });
            continue;
        }
        return Err(syntax(
            line,
            col(start),
            &c.to_string(),
            "unexpected character",
        ));
    }
    out.push(Token {
        tok: Tok::Eof,
        text: "end of input".into(),
        line,
        col: col(chars.len()),
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    mode: Mode,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, t: &Token, msg: impl Into<String>) -> Error {
        syntax(t.line, t.col, &t.text, msg)
    }

    fn expr(&mut self) -> Result<Raw> {
        let mut terms = Vec::new();
        let first_neg = match self.peek().tok {
            Tok::Minus => {
                self.next();
                true
            }
            Tok::Plus => {
                self.next();
                false
            }
            _ => false,
        };
        let t = self.tensor()?;
        terms.push(if first_neg { Raw::Neg(Box::new(t)) } else { t });
        loop {
            let neg = match self.peek().tok {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.next();
            let t = self.tensor()?;
            terms.push(if neg { Raw::Neg(Box::new(t)) } else { t });
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Raw::Sum(terms)
        })
    }

    fn tensor(&mut self) -> Result<Raw> {
        let left = self.product()?;
        if self.peek().tok != Tok::Ox {
            return Ok(left);
        }
        self.next();
        let right = self.product()?;
        if self.peek().tok == Tok::Ox {
            let t = self.peek().clone();
            return Err(Error::TensorDegree(format!(
                "nested `ox` at line {}, column {}: tensor degree is at most 2",
                t.line, t.col
            )));
        }
        Ok(Raw::Tensor(Box::new(left), Box::new(right)))
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek().tok,
            Tok::Int(_) | Tok::Ident(..) | Tok::Var(_) | Tok::LParen
        )
    }

    fn product(&mut self) -> Result<Raw> {
        let mut factors = vec![self.power()?];
        loop {
            if self.peek().tok == Tok::Star {
                self.next();
                factors.push(self.power()?);
            } else if self.starts_atom() {
                factors.push(self.power()?);
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Raw::Prod(factors)
        })
    }

    fn power(&mut self) -> Result<Raw> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let neg = if self.peek().tok == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        let n = match &t.tok {
            Tok::Int(n) => n
                .to_i64()
                .ok_or_else(|| self.err(&t, "exponent too large"))?,
            _ => return Err(self.err(&t, "expected an integer exponent")),
        };
        Ok(Raw::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Raw> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => {
                if self.peek().tok == Tok::Slash {
                    self.next();
                    let d = self.next();
                    match &d.tok {
                        Tok::Int(m) if !m.is_zero() => {
                            Ok(Raw::Num(BigRational::new(n.clone(), m.clone())))
                        }
                        Tok::Int(_) => Err(self.err(&d, "division by zero")),
                        _ => Err(self.err(&d, "expected an integer denominator")),
                    }
                } else {
                    Ok(Raw::Num(BigRational::from_integer(n.clone())))
                }
            }
            Tok::Var(name) => Ok(Raw::Var(name.clone())),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.next();
                if close.tok != Tok::RParen {
                    return Err(self.err(&close, "expected `)`"));
                }
                Ok(inner)
            }
            Tok::Ident(name, idx) => self.symbol(&t, name, idx.as_deref()),
            _ => Err(self.err(&t, "expected a term")),
        }
    }

    fn symbol(&self, t: &Token, name: &str, idx: Option<&[Idx]>) -> Result<Raw> {
        let arity = |n: usize| -> Result<Vec<Idx>> {
            match idx {
                Some(list) if list.len() == n => Ok(list.to_vec()),
                _ => Err(self.err(t, format!("`{name}` takes {n} index(es)"))),
            }
        };
        let bare = |r: Raw| -> Result<Raw> {
            if idx.is_some() {
                Err(self.err(t, format!("`{name}` takes no index")))
            } else {
                Ok(r)
            }
        };
        let gen = |kind: GenKind, index: Option<Idx>| Raw::Gen(GenTemplate { kind, index });
        if self.mode == Mode::Poly && idx.is_none() {
            if let Some(rest) = name.strip_prefix('x') {
                if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                    let n = rest.parse().map_err(|_| self.err(t, "index too large"))?;
                    return Ok(Raw::PolyVar(n));
                }
            }
        }
        match (name, idx.is_some()) {
            ("i", _) => bare(Raw::I),
            ("hbar", _) => bare(Raw::Hbar),
            ("q", _) => bare(Raw::Q),
            ("Q", _) => {
                let v = arity(2)?;
                Ok(Raw::Qjk(v[0].clone(), v[1].clone()))
            }
            ("delta", _) => {
                let v = arity(2)?;
                Ok(Raw::Delta(v[0].clone(), v[1].clone()))
            }
            ("x", _) => Ok(gen(GenKind::Coordinate, Some(arity(1)?.remove(0)))),
            ("p", _) => Ok(gen(GenKind::Momentum, Some(arity(1)?.remove(0)))),
            ("d", true) => Ok(gen(GenKind::Partial, Some(arity(1)?.remove(0)))),
            ("d", false) => Ok(gen(GenKind::Entry(Entry::D), None)),
            ("a", _) => bare(gen(GenKind::Entry(Entry::A), None)),
            ("b", _) => bare(gen(GenKind::Entry(Entry::B), None)),
            ("c", _) => bare(gen(GenKind::Entry(Entry::C), None)),
            ("f", false) => Ok(gen(GenKind::F, None)),
            ("f", true) => Ok(gen(GenKind::FComp, Some(arity(1)?.remove(0)))),
            ("df", _) => Ok(gen(GenKind::Df, Some(arity(1)?.remove(0)))),
            ("Df", _) => bare(gen(GenKind::DiracLeft, None)),
            ("fD", _) => bare(gen(GenKind::DiracRight, None)),
            ("E0", _) => bare(Raw::Blade(AlgebraKind::Clifford, Vec::new())),
            ("E", true) => Ok(Raw::Blade(AlgebraKind::Clifford, idx.unwrap().to_vec())),
            ("be", true) => Ok(Raw::Blade(AlgebraKind::Deformed, idx.unwrap().to_vec())),
            _ => Err(self.err(t, format!("unknown symbol `{}`", t.text))),
        }
    }
}

/// Parse `text` (reported as line `line`, starting at column `col0`) into a
/// raw tree.
pub fn parse_raw_at(text: &str, mode: Mode, line: usize, col0: usize) -> Result<Raw> {
    let toks = lex(text, line, col0, mode)?;
    let mut p = Parser { toks, pos: 0, mode };
    let raw = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::Eof {
        return Err(p.err(&t, "unexpected token"));
    }
    Ok(raw)
}

pub fn parse_raw(text: &str, mode: Mode) -> Result<Raw> {
    parse_raw_at(text, mode, 1, 1)
}

/// Parse a concrete expression into canonical form.
pub fn parse_expression(text: &str) -> Result<Expression> {
    parse_expression_at(text, 1)
}

pub fn parse_expression_at(text: &str, line: usize) -> Result<Expression> {
    let raw = parse_raw_at(text, Mode::Concrete, line, 1)?;
    eval(&raw, &Env::default())
}

/// Bindings for index variables and `$name` placeholders.
#[derive(Debug, Clone, Default)]
pub struct Env {
    indices: BTreeMap<String, u32>,
    vars: BTreeMap<String, Expression>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_index(mut self, name: &str, value: u32) -> Self {
        self.indices.insert(name.to_string(), value);
        self
    }

    pub fn with_var(mut self, name: &str, value: Expression) -> Self {
        self.vars.insert(name.to_string(), value);
        self
    }

    pub fn set_index(&mut self, name: &str, value: u32) {
        self.indices.insert(name.to_string(), value);
    }

    pub fn index(&self, name: &str) -> Result<u32> {
        self.indices
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidRule(format!("unbound index variable `{name}`")))
    }

    pub fn indices(&self) -> &BTreeMap<String, u32> {
        &self.indices
    }
}

/// Evaluate a raw tree to a canonical expression.
pub fn eval(raw: &Raw, env: &Env) -> Result<Expression> {
    Ok(match raw {
        Raw::Num(r) => Expression::scalar(Scalar::from_rational(r.clone())),
        Raw::I => Expression::scalar(Scalar::i()),
        Raw::Hbar => Expression::scalar(Scalar::hbar()),
        Raw::Q => Expression::scalar(Scalar::q()),
        Raw::Qjk(a, b) => Expression::scalar(Scalar::qjk(a.resolve(env)?, b.resolve(env)?)),
        Raw::Delta(a, b) => {
            let d = i64::from(a.resolve(env)? == b.resolve(env)?);
            Expression::scalar(Scalar::from_integer(d))
        }
        Raw::Gen(g) => {
            let j = g.index.as_ref().map(|i| i.resolve(env)).transpose()?;
            Expression::generator(g.kind.build(j))?
        }
        Raw::Blade(kind, idx) => {
            let mut sign = Scalar::one();
            let mut acc = Blade::unit();
            for i in idx {
                let g = Blade::generator(*kind, i.resolve(env)?)?;
                let (s, b, _) = blade_product_checked(&acc, &g)?;
                sign = &sign * &s;
                acc = b;
            }
            Expression::blade(acc).scale(&sign)
        }
        Raw::PolyVar(n) => {
            return Err(Error::InvalidRule(format!(
                "`x{n}` is only meaningful in a polynomial"
            )))
        }
        Raw::Var(name) => env
            .vars
            .get(name)
            .cloned()
            .ok_or_else(|| Error::InvalidRule(format!("unbound placeholder `${name}`")))?,
        Raw::Neg(r) => eval(r, env)?.neg(),
        Raw::Sum(rs) => {
            let mut acc = Expression::zero();
            for r in rs {
                acc = acc.add(&eval(r, env)?);
            }
            acc
        }
        Raw::Prod(rs) => {
            let mut acc = Expression::one();
            for r in rs {
                acc = acc.mul(&eval(r, env)?)?;
            }
            acc
        }
        Raw::Tensor(a, b) => eval(a, env)?.tensor(&eval(b, env)?)?,
        Raw::Pow(base, n) => {
            let b = eval(base, env)?;
            if *n >= 0 {
                b.pow(*n as u32)?
            } else {
                let s = b.as_scalar().ok_or_else(|| {
                    Error::NotInvertible(format!("negative power of non-scalar `{b}`"))
                })?;
                Expression::scalar(s.pow(*n)?)
            }
        }
    })
}

/// Evaluate a template with the given index bindings.
pub fn instantiate(text: &str, env: &Env) -> Result<Expression> {
    eval(&parse_raw(text, Mode::Template)?, env)
}
