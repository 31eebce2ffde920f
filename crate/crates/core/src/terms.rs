//! Generators, words, degree-two tensor monomials and canonical expressions.
//!
//! Clifford factors never live inside words. During canonicalization they are
//! pulled out into a single blade prefix, multiplied in the order they are
//! encountered (first slot left to right, then second slot). Blades commute
//! with every other generator and slide freely across `ox`.
//!
//! The pure unit `1 ox 1` is identified with the scalar unit, so constant
//! terms of degree-two relations and plain scalars share one key.

use std::collections::BTreeMap;
use std::fmt;

use crate::clifford::{blade_product_checked, Blade};
use crate::error::{Error, Result};
use crate::scalars::{Param, Scalar};

/// Symbols standing for a function and its derivatives. They are inert: no
/// built-in commutation rules apply to them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunTag {
    /// `f`
    F,
    /// `f[j]`, the component `f_j`
    Comp(u32),
    /// `df[j]`, the partial derivative of `f` along `x_j`
    Df(u32),
    /// `Df`, the left Dirac image of `f`
    DiracLeft,
    /// `fD`, the right Dirac image of `f`
    DiracRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    A,
    B,
    C,
    D,
}

impl Entry {
    pub fn name(self) -> &'static str {
        match self {
            Entry::A => "a",
            Entry::B => "b",
            Entry::C => "c",
            Entry::D => "d",
        }
    }
}

/// A non-Clifford generator. The derived order is the term order:
/// coordinates, momenta, partials, function symbols, matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Coordinate(u32),
    Momentum(u32),
    Partial(u32),
    Fun(FunTag),
    Entry(Entry),
}

impl Generator {
    pub fn index(&self) -> Option<u32> {
        match self {
            Generator::Coordinate(j) | Generator::Momentum(j) | Generator::Partial(j) => Some(*j),
            Generator::Fun(FunTag::Comp(j)) | Generator::Fun(FunTag::Df(j)) => Some(*j),
            _ => None,
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        match self.index() {
            Some(0) => Err(Error::IndexOutOfRange(format!(
                "generator {self} needs an index >= 1"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Coordinate(j) => write!(f, "x[{j}]"),
            Generator::Momentum(j) => write!(f, "p[{j}]"),
            Generator::Partial(j) => write!(f, "d[{j}]"),
            Generator::Fun(FunTag::F) => f.write_str("f"),
            Generator::Fun(FunTag::Comp(j)) => write!(f, "f[{j}]"),
            Generator::Fun(FunTag::Df(j)) => write!(f, "df[{j}]"),
            Generator::Fun(FunTag::DiracLeft) => f.write_str("Df"),
            Generator::Fun(FunTag::DiracRight) => f.write_str("fD"),
            Generator::Entry(e) => f.write_str(e.name()),
        }
    }
}

/// An ordered product of generators; the empty word is the unit.
///
/// Matrix entries commute with coordinates, so inside every maximal run of
/// entries and coordinates the entries are moved to the front (keeping the
/// relative order of each kind).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Generator>);

impl Word {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn new(factors: Vec<Generator>) -> Self {
        let mut w = Word(factors);
        w.canonicalize();
        w
    }

    fn canonicalize(&mut self) {
        let movable = |g: &Generator| matches!(g, Generator::Coordinate(_) | Generator::Entry(_));
        let mut start = 0;
        while start < self.0.len() {
            if !movable(&self.0[start]) {
                start += 1;
                continue;
            }
            let mut end = start;
            while end < self.0.len() && movable(&self.0[end]) {
                end += 1;
            }
            // stable: entries first, coordinates after
            self.0[start..end].sort_by_key(|g| !matches!(g, Generator::Entry(_)));
            start = end;
        }
    }

    pub fn factors(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word::new(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// The coefficient-free part of a tensor monomial: blade prefix and slots.
/// `slot2 == None` means tensor degree one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub prefix: Blade,
    pub slot1: Word,
    pub slot2: Option<Word>,
}

impl TermKey {
    pub fn new(prefix: Blade, slot1: Word, slot2: Option<Word>) -> Self {
        let slot2 = match slot2 {
            Some(w) if w.is_empty() && slot1.is_empty() => None,
            other => other,
        };
        Self {
            prefix,
            slot1,
            slot2,
        }
    }

    pub fn unit() -> Self {
        Self::new(Blade::unit(), Word::unit(), None)
    }

    /// No generators at all (the prefix may still be a blade).
    pub fn is_scalar_like(&self) -> bool {
        self.slot1.is_empty() && self.slot2.is_none()
    }

    pub fn degree(&self) -> usize {
        if self.slot2.is_some() {
            2
        } else {
            1
        }
    }

    /// All generators, first slot then second slot.
    pub fn sequence(&self) -> Vec<Generator> {
        let mut v = self.slot1.0.clone();
        if let Some(w) = &self.slot2 {
            v.extend_from_slice(&w.0);
        }
        v
    }

    fn body(&self) -> String {
        let mut left: Vec<String> = Vec::new();
        if !self.prefix.is_unit() {
            left.push(self.prefix.to_string());
        }
        left.extend(self.slot1.0.iter().map(|g| g.to_string()));
        let left = if left.is_empty() {
            "1".to_string()
        } else {
            left.join(" ")
        };
        match &self.slot2 {
            None => left,
            Some(w) => format!("{left} ox {w}"),
        }
    }
}

/// Product of two term keys, or `None` when the blade product vanishes.
fn mul_keys(a: &TermKey, b: &TermKey) -> Result<Option<(Scalar, TermKey)>> {
    let (sign, prefix, _) = blade_product_checked(&a.prefix, &b.prefix)?;
    if sign.is_zero() {
        return Ok(None);
    }
    let (slot1, slot2) = if a.is_scalar_like() {
        (b.slot1.clone(), b.slot2.clone())
    } else if b.is_scalar_like() {
        (a.slot1.clone(), a.slot2.clone())
    } else if a.slot2.is_none() && b.slot2.is_none() {
        (a.slot1.concat(&b.slot1), None)
    } else {
        return Err(Error::TensorDegree(format!(
            "cannot multiply `{}` by `{}`: at most one `ox` per product",
            a.body(),
            b.body()
        )));
    };
    Ok(Some((sign, TermKey::new(prefix, slot1, slot2))))
}

fn tensor_keys(a: &TermKey, b: &TermKey) -> Result<Option<(Scalar, TermKey)>> {
    if a.slot2.is_some() || b.slot2.is_some() {
        return Err(Error::TensorDegree(format!(
            "`({}) ox ({})` would have tensor degree > 2",
            a.body(),
            b.body()
        )));
    }
    let (sign, prefix, _) = blade_product_checked(&a.prefix, &b.prefix)?;
    if sign.is_zero() {
        return Ok(None);
    }
    Ok(Some((
        sign,
        TermKey::new(prefix, a.slot1.clone(), Some(b.slot1.clone())),
    )))
}

/// One term of an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorMonomial {
    pub coeff: Scalar,
    pub prefix: Blade,
    pub slot1: Word,
    pub slot2: Option<Word>,
}

/// A canonical sum of tensor monomials with distinct keys and nonzero
/// coefficients, kept in term order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Expression {
    terms: BTreeMap<TermKey, Scalar>,
}

impl Expression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        Self::from_term(TermKey::unit(), s)
    }

    pub fn from_term(key: TermKey, s: Scalar) -> Self {
        let mut e = Self::zero();
        e.accumulate(key, s);
        e
    }

    pub fn generator(g: Generator) -> Result<Self> {
        g.check()?;
        Ok(Self::word(vec![g]))
    }

    pub fn word(factors: Vec<Generator>) -> Self {
        Self::from_term(
            TermKey::new(Blade::unit(), Word::new(factors), None),
            Scalar::one(),
        )
    }

    pub fn blade(b: Blade) -> Self {
        Self::from_term(TermKey::new(b, Word::unit(), None), Scalar::one())
    }

    pub(crate) fn accumulate(&mut self, key: TermKey, s: Scalar) {
        if s.is_zero() {
            return;
        }
        let sum = match self.terms.get(&key) {
            Some(existing) => existing + &s,
            None => s,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub(crate) fn pop_first(&mut self) -> Option<(TermKey, Scalar)> {
        self.terms.pop_first()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<TensorMonomial> {
        self.terms
            .iter()
            .map(|(k, c)| TensorMonomial {
                coeff: c.clone(),
                prefix: k.prefix,
                slot1: k.slot1.clone(),
                slot2: k.slot2.clone(),
            })
            .collect()
    }

    pub fn coefficient(&self, key: &TermKey) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    /// 2 if any term carries a second slot, otherwise 1.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(TermKey::degree).max().unwrap_or(1)
    }

    /// The value as a plain scalar, if it has no generators and no blades.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (k, c) = self.terms.iter().next()?;
                (k.is_scalar_like() && k.prefix.is_unit()).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add(&self, other: &Expression) -> Expression {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.accumulate(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Expression) -> Expression {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expression {
        self.scale(&Scalar::from_integer(-1))
    }

    pub fn scale(&self, s: &Scalar) -> Expression {
        let mut out = Expression::zero();
        for (k, c) in self.iter() {
            out.accumulate(k.clone(), c * s);
        }
        out
    }

    /// Product: word concatenation for degree-one terms; scalars and blades
    /// multiply anything.
    pub fn mul(&self, other: &Expression) -> Result<Expression> {
        let mut out = Expression::zero();
        for (ka, ca) in self.iter() {
            for (kb, cb) in other.iter() {
                if let Some((sign, key)) = mul_keys(ka, kb)? {
                    out.accumulate(key, &(&sign * ca) * cb);
                }
            }
        }
        Ok(out)
    }

    /// `self ox other`; both sides must have tensor degree one.
    pub fn tensor(&self, other: &Expression) -> Result<Expression> {
        let mut out = Expression::zero();
        for (ka, ca) in self.iter() {
            for (kb, cb) in other.iter() {
                if let Some((sign, key)) = tensor_keys(ka, kb)? {
                    out.accumulate(key, &(&sign * ca) * cb);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Expression> {
        let mut out = Expression::one();
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn try_map_scalars(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Expression> {
        let mut out = Expression::zero();
        for (k, c) in self.iter() {
            out.accumulate(k.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn substitute_params(&self, f: &dyn Fn(Param) -> Option<Scalar>) -> Result<Expression> {
        self.try_map_scalars(|c| c.substitute(f))
    }

    pub fn limit_q1(&self) -> Expression {
        self.try_map_scalars(|c| Ok(c.limit_q1()))
            .expect("limit_q1 is infallible")
    }

    /// Replace generators by expressions. Each slot is rebuilt as a product of
    /// the replacements, so a replacement may carry blades and scalars but
    /// must have tensor degree one.
    pub fn substitute_generators(
        &self,
        f: &dyn Fn(&Generator) -> Option<Expression>,
    ) -> Result<Expression> {
        let rebuild = |w: &Word| -> Result<Expression> {
            let mut acc = Expression::one();
            for g in w.factors() {
                let piece = match f(g) {
                    Some(e) => {
                        if e.degree() != 1 {
                            return Err(Error::TensorDegree(format!(
                                "replacement for {g} must have tensor degree one"
                            )));
                        }
                        e
                    }
                    None => Expression::word(vec![*g]),
                };
                acc = acc.mul(&piece)?;
            }
            Ok(acc)
        };
        let mut out = Expression::zero();
        for (k, c) in self.iter() {
            let head = Expression::blade(k.prefix).scale(c);
            let first = rebuild(&k.slot1)?;
            let term = match &k.slot2 {
                None => head.mul(&first)?,
                Some(w) => head.mul(&first.tensor(&rebuild(w)?)?)?,
            };
            out = out.add(&term);
        }
        Ok(out)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (k, c) in self.iter() {
            if k.is_scalar_like() && k.prefix.is_unit() {
                for (m, g) in c.terms() {
                    let single = Scalar::term(m.clone(), g.clone());
                    let (neg, body) = single.signed_factor().expect("single term");
                    parts.push((neg, body));
                }
                continue;
            }
            let body = k.body();
            match c.signed_factor() {
                Some((neg, s)) if s == "1" => parts.push((neg, body)),
                Some((neg, s)) => parts.push((neg, format!("{s} * ({body})"))),
                None => parts.push((false, format!("({c}) * ({body})"))),
            }
        }
        f.write_str(&crate::clifford::join_summands(parts))
    }
}
