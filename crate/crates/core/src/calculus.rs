//! Clifford-valued polynomials in `x0, ..., xm` and the operators acting on
//! them: partial derivatives, the Dirac operator (left and right), the
//! Cauchy-Riemann operator, and the `B_p` difference operator.

use std::collections::BTreeMap;
use std::fmt;

use crate::clifford::{join_summands, signed_summand, Algebra, AlgebraKind, Blade, Multivector};
use crate::error::{Error, Result};
use crate::parse::{parse_raw, GenKind, Idx, Mode, Raw};
use crate::scalars::Scalar;
use crate::terms::{Expression, Generator, TermKey, Word};

/// Which side the Clifford generator multiplies from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A polynomial with multivector coefficients, keyed by exponent vectors of
/// length `m + 1` (the exponent of `x0` first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFunction {
    algebra: Algebra,
    terms: BTreeMap<Vec<u32>, Multivector>,
}

impl PolyFunction {
    pub fn zero(algebra: Algebra) -> Self {
        Self {
            algebra,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Multivector) -> Self {
        let mut f = Self::zero(c.algebra());
        let zero = vec![0; f.width()];
        f.accumulate(zero, c);
        f
    }

    pub fn scalar(algebra: Algebra, s: Scalar) -> Self {
        Self::constant(Multivector::scalar(algebra, s))
    }

    /// `c * x0^e0 * ... * xm^em`.
    pub fn monomial(exponents: Vec<u32>, c: Multivector) -> Result<Self> {
        let mut f = Self::zero(c.algebra());
        if exponents.len() != f.width() {
            return Err(Error::IndexOutOfRange(format!(
                "exponent vector of length {} for dimension {}",
                exponents.len(),
                f.algebra.dim
            )));
        }
        f.accumulate(exponents, c);
        Ok(f)
    }

    /// The coordinate `xj` with unit coefficient.
    pub fn coordinate(algebra: Algebra, j: u32) -> Result<Self> {
        let mut e = vec![0; algebra.dim as usize + 1];
        *e.get_mut(j as usize)
            .ok_or_else(|| out_of_range(algebra, j))? = 1;
        Self::monomial(e, Multivector::one(algebra))
    }

    fn width(&self) -> usize {
        self.algebra.dim as usize + 1
    }

    fn accumulate(&mut self, e: Vec<u32>, c: Multivector) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&e) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn dim(&self) -> u32 {
        self.algebra.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Multivector)> {
        self.terms.iter()
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch(format!(
                "{}_{} vs {}_{}",
                self.algebra.kind, self.algebra.dim, other.algebra.kind, other.algebra.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.accumulate(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Scalar::from_integer(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero(self.algebra);
        for (e, c) in self.terms() {
            out.accumulate(e.clone(), c.scale(s));
        }
        out
    }

    /// Product with coefficients multiplied in the order `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let mut out = Self::zero(self.algebra);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.accumulate(e, ca.mul(cb)?);
            }
        }
        Ok(out)
    }

    fn map_coefficients(&self, f: impl Fn(&Multivector) -> Result<Multivector>) -> Result<Self> {
        let mut out = Self::zero(self.algebra);
        for (e, c) in self.terms() {
            out.accumulate(e.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Exact partial derivative along `xj`, `0 <= j <= m`.
    pub fn partial(&self, j: u32) -> Result<Self> {
        if j > self.algebra.dim {
            return Err(out_of_range(self.algebra, j));
        }
        let mut out = Self::zero(self.algebra);
        for (e, c) in self.terms() {
            let n = e[j as usize];
            if n == 0 {
                continue;
            }
            let mut d = e.clone();
            d[j as usize] -= 1;
            out.accumulate(d, c.scale(&Scalar::from_integer(n as i64)));
        }
        Ok(out)
    }

    fn require(&self, kind: AlgebraKind, what: &str) -> Result<()> {
        if self.algebra.kind != kind {
            return Err(Error::AlgebraMismatch(format!(
                "{what} is defined over {kind}_m, got a {}_{} function",
                self.algebra.kind, self.algebra.dim
            )));
        }
        Ok(())
    }

    /// `sum_{b=1..m} e_b d_b f`, with `e_b` on the given side.
    pub fn dirac(&self, side: Side) -> Result<Self> {
        self.require(AlgebraKind::Clifford, "the Dirac operator")?;
        let mut out = Self::zero(self.algebra);
        for beta in 1..=self.algebra.dim {
            let e = Multivector::generator(self.algebra, beta)?;
            let d = self.partial(beta)?;
            let term = d.map_coefficients(|c| match side {
                Side::Left => e.mul(c),
                Side::Right => c.mul(&e),
            })?;
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// `d_0 f + D f` with the left Dirac operator.
    pub fn cauchy_riemann(&self) -> Result<Self> {
        self.require(AlgebraKind::Clifford, "the Cauchy-Riemann operator")?;
        self.partial(0)?.add(&self.dirac(Side::Left)?)
    }

    /// `e_j d_k f + e_k d_j f` over `B_p`, for `j != k`.
    pub fn difference_op(&self, j: u32, k: u32) -> Result<Self> {
        self.require(AlgebraKind::Deformed, "the difference operator")?;
        if j == k {
            return Err(Error::IndexOutOfRange(format!(
                "the difference operator needs j != k, got j = k = {j}"
            )));
        }
        let ej = self
            .algebra
            .generator(j)
            .map(|b| Multivector::blade(self.algebra, b, Scalar::one()))??;
        let ek = self
            .algebra
            .generator(k)
            .map(|b| Multivector::blade(self.algebra, b, Scalar::one()))??;
        let first = self.partial(k)?.map_coefficients(|c| ej.mul(c))?;
        let second = self.partial(j)?.map_coefficients(|c| ek.mul(c))?;
        first.add(&second)
    }

    /// Whether the Dirac image vanishes, together with that image.
    pub fn is_monogenic(&self, side: Side) -> Result<(bool, Self)> {
        let w = self.dirac(side)?;
        Ok((w.is_zero(), w))
    }

    /// Embed as a degree-one expression: `x[i]` words (ascending `i`) with the
    /// coefficient blades as prefixes. Only functions free of `x0` embed.
    pub fn to_expression(&self) -> Result<Expression> {
        let mut out = Expression::zero();
        for (e, c) in self.terms() {
            if e[0] > 0 {
                return Err(Error::IndexOutOfRange(
                    "x0 has no counterpart among the tensor generators".into(),
                ));
            }
            let mut word = Vec::new();
            for (i, n) in e.iter().enumerate().skip(1) {
                for _ in 0..*n {
                    word.push(Generator::Coordinate(i as u32));
                }
            }
            for (b, s) in c.terms() {
                out = out.add(&Expression::from_term(
                    TermKey::new(*b, Word::new(word.clone()), None),
                    s.clone(),
                ));
            }
        }
        Ok(out)
    }

    /// Parse `x0^2*E[1] + x1*x2*E[2]`. The algebra kind follows the blades
    /// used (`E` for `A_m`, `be` for `B_p`, `A_m` when there are none); the
    /// dimension is `dim` if given, else the largest index that occurs.
    pub fn parse(text: &str, dim: Option<u32>) -> Result<Self> {
        Self::parse_with_kind(text, dim, None)
    }

    pub fn parse_with_kind(
        text: &str,
        dim: Option<u32>,
        kind: Option<AlgebraKind>,
    ) -> Result<Self> {
        let raw = parse_raw(text, Mode::Poly)?;
        let mut seen_kind = None;
        let mut max_index = 0;
        scan(&raw, &mut seen_kind, &mut max_index)?;
        let kind = match (kind, seen_kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::AlgebraMismatch(format!(
                    "{b} blades in a {a}_m function"
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => AlgebraKind::Clifford,
        };
        let dim = dim.unwrap_or(max_index.max(1));
        if max_index > dim {
            return Err(Error::IndexOutOfRange(format!(
                "index {max_index} exceeds dimension {dim}"
            )));
        }
        let algebra = match kind {
            AlgebraKind::Clifford => Algebra::clifford(dim),
            AlgebraKind::Deformed => Algebra::deformed(dim),
        };
        build(&raw, algebra)
    }
}

fn out_of_range(a: Algebra, j: u32) -> Error {
    Error::IndexOutOfRange(format!("coordinate x{j} outside x0..x{}", a.dim))
}

fn scan(raw: &Raw, kind: &mut Option<AlgebraKind>, max: &mut u32) -> Result<()> {
    match raw {
        Raw::Blade(k, idx) => {
            if let Some(prev) = kind {
                if prev != k {
                    return Err(Error::AlgebraMismatch(
                        "A_m and B_p blades in one function".into(),
                    ));
                }
            }
            *kind = Some(*k);
            for i in idx {
                if let Idx::Lit(n) = i {
                    *max = (*max).max(*n);
                }
            }
        }
        Raw::PolyVar(n) => *max = (*max).max(*n),
        Raw::Gen(g) => {
            if let Some(Idx::Lit(n)) = g.index {
                *max = (*max).max(n);
            }
        }
        Raw::Neg(r) | Raw::Pow(r, _) => scan(r, kind, max)?,
        Raw::Sum(rs) | Raw::Prod(rs) => {
            for r in rs {
                scan(r, kind, max)?;
            }
        }
        Raw::Tensor(a, b) => {
            scan(a, kind, max)?;
            scan(b, kind, max)?;
        }
        _ => {}
    }
    Ok(())
}

fn build(raw: &Raw, algebra: Algebra) -> Result<PolyFunction> {
    let constant = |s: Scalar| Ok(PolyFunction::scalar(algebra, s));
    match raw {
        Raw::Num(r) => constant(Scalar::from_rational(r.clone())),
        Raw::I => constant(Scalar::i()),
        Raw::Hbar => constant(Scalar::hbar()),
        Raw::Q => constant(Scalar::q()),
        Raw::Qjk(Idx::Lit(a), Idx::Lit(b)) => constant(Scalar::qjk(*a, *b)),
        Raw::Blade(_, idx) => {
            let mut acc = Multivector::one(algebra);
            for i in idx {
                let Idx::Lit(n) = i else {
                    unreachable!("poly mode has literal indices")
                };
                acc = acc.mul(&Multivector::generator(algebra, *n)?)?;
            }
            Ok(PolyFunction::constant(acc))
        }
        Raw::PolyVar(n) => PolyFunction::coordinate(algebra, *n),
        Raw::Gen(g) if g.kind == GenKind::Coordinate => match g.index {
            Some(Idx::Lit(n)) => PolyFunction::coordinate(algebra, n),
            _ => unreachable!("coordinates carry an index"),
        },
        Raw::Neg(r) => Ok(build(r, algebra)?.scale(&Scalar::from_integer(-1))),
        Raw::Sum(rs) => {
            let mut acc = PolyFunction::zero(algebra);
            for r in rs {
                acc = acc.add(&build(r, algebra)?)?;
            }
            Ok(acc)
        }
        Raw::Prod(rs) => {
            let mut acc = PolyFunction::scalar(algebra, Scalar::one());
            for r in rs {
                acc = acc.mul(&build(r, algebra)?)?;
            }
            Ok(acc)
        }
        Raw::Pow(base, n) => {
            let b = build(base, algebra)?;
            if *n >= 0 {
                let mut acc = PolyFunction::scalar(algebra, Scalar::one());
                for _ in 0..*n {
                    acc = acc.mul(&b)?;
                }
                Ok(acc)
            } else {
                let s = b.as_scalar().ok_or_else(|| {
                    Error::NotInvertible(format!("negative power of non-scalar `{b}`"))
                })?;
                constant(s.pow(*n)?)
            }
        }
        other => Err(Error::InvalidRule(format!(
            "not allowed in a polynomial: {other:?}"
        ))),
    }
}

impl PolyFunction {
    fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                if e.iter().any(|&n| n > 0) {
                    return None;
                }
                let mut it = c.terms();
                let (b, s) = it.next()?;
                (it.next().is_none() && b.is_unit()).then(|| s.clone())
            }
            _ => None,
        }
    }
}

fn monomial_body(e: &[u32], b: &Blade) -> String {
    let mut parts = Vec::new();
    for (i, n) in e.iter().enumerate() {
        match n {
            0 => {}
            1 => parts.push(format!("x{i}")),
            _ => parts.push(format!("x{i}^{n}")),
        }
    }
    if !b.is_unit() {
        parts.push(b.to_string());
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for PolyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (e, c) in self.terms() {
            for (b, s) in c.terms() {
                let body = monomial_body(e, b);
                if body == "1" {
                    for (m, g) in s.terms() {
                        let single = Scalar::term(m.clone(), g.clone());
                        parts.push(single.signed_factor().expect("single term"));
                    }
                } else {
                    parts.push(signed_summand(s, &body));
                }
            }
        }
        f.write_str(&join_summands(parts))
    }
}
