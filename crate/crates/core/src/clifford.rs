//! Finite-dimensional arithmetic for the Clifford algebra `A_m`
//! (`e_a e_b + e_b e_a = -2 delta_ab`) and the deformed algebra `B_p`.
//!
//! `B_p` is given by the pair of relations
//! `e_j e_k + q_jk e_k e_j = delta_jk` and `e_j e_k + e_k e_j = 2(1 + q_jk)`
//! with `q_jk = -1` off the diagonal and `0` on it. Together they force
//! `e_j^2 = 1` and `e_j e_k = 0` for `j != k`, so every product of two distinct
//! generators vanishes. The kernel implements that solution directly and
//! reports each collapse as a [`Degeneracy`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalars::Scalar;

/// Largest supported generator index.
pub const MAX_DIM: u32 = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraKind {
    /// The Clifford algebra `A_m`.
    Clifford,
    /// The deformed algebra `B_p`.
    Deformed,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraKind::Clifford => f.write_str("A"),
            AlgebraKind::Deformed => f.write_str("B"),
        }
    }
}

/// An algebra together with its number of generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Algebra {
    pub kind: AlgebraKind,
    pub dim: u32,
}

impl Algebra {
    pub fn clifford(m: u32) -> Self {
        Self {
            kind: AlgebraKind::Clifford,
            dim: m,
        }
    }

    pub fn deformed(p: u32) -> Self {
        Self {
            kind: AlgebraKind::Deformed,
            dim: p,
        }
    }

    /// Check that `b` lives in this algebra.
    pub fn contains(&self, b: &Blade) -> Result<()> {
        if !b.is_unit() && b.kind != self.kind {
            return Err(Error::AlgebraMismatch(format!(
                "blade {b} does not belong to {}_{}",
                self.kind, self.dim
            )));
        }
        if let Some(top) = b.indices().last() {
            if top > self.dim {
                return Err(Error::AlgebraMismatch(format!(
                    "blade {b} exceeds dimension {} of {}_{}",
                    self.dim, self.kind, self.dim
                )));
            }
        }
        Ok(())
    }

    pub fn generator(&self, j: u32) -> Result<Blade> {
        let b = Blade::generator(self.kind, j)?;
        self.contains(&b)?;
        Ok(b)
    }

    /// All basis blades of the algebra, in term order.
    pub fn basis(&self) -> Vec<Blade> {
        let mut out: Vec<Blade> = match self.kind {
            AlgebraKind::Clifford => (0u32..(1u32 << self.dim))
                .map(|mask| Blade::from_mask(AlgebraKind::Clifford, mask))
                .collect(),
            AlgebraKind::Deformed => std::iter::once(Blade::unit())
                .chain(
                    (1..=self.dim).map(|j| Blade::from_mask(AlgebraKind::Deformed, 1 << (j - 1))),
                )
                .collect(),
        };
        out.sort();
        out
    }

    pub fn blade_product(&self, a: &Blade, b: &Blade) -> Result<(Scalar, Blade)> {
        self.contains(a)?;
        self.contains(b)?;
        let (c, blade, _) = blade_product_checked(a, b)?;
        Ok((c, blade))
    }
}

/// A basis blade: a product of distinct generators in increasing index order.
/// The unit blade has no generators and no algebra of its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade {
    kind: AlgebraKind,
    mask: u32,
}

impl Blade {
    pub fn unit() -> Self {
        Self {
            kind: AlgebraKind::Clifford,
            mask: 0,
        }
    }

    fn from_mask(kind: AlgebraKind, mask: u32) -> Self {
        if mask == 0 {
            Self::unit()
        } else {
            Self { kind, mask }
        }
    }

    pub fn generator(kind: AlgebraKind, j: u32) -> Result<Self> {
        if j == 0 || j > MAX_DIM {
            return Err(Error::IndexOutOfRange(format!(
                "generator index {j} must lie in 1..={MAX_DIM}"
            )));
        }
        Ok(Self::from_mask(kind, 1 << (j - 1)))
    }

    /// Build a blade from strictly increasing indices.
    pub fn new(kind: AlgebraKind, indices: &[u32]) -> Result<Self> {
        let mut mask = 0u32;
        let mut prev = 0;
        for &j in indices {
            if j <= prev {
                return Err(Error::IndexOutOfRange(format!(
                    "blade indices must be strictly increasing and positive: {indices:?}"
                )));
            }
            mask |= Self::generator(kind, j)?.mask;
            prev = j;
        }
        if kind == AlgebraKind::Deformed && indices.len() > 1 {
            return Err(Error::AlgebraMismatch(format!(
                "B_p blade {indices:?} of grade > 1 is zero"
            )));
        }
        Ok(Self::from_mask(kind, mask))
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn is_unit(&self) -> bool {
        self.mask == 0
    }

    pub fn grade(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn indices(&self) -> impl DoubleEndedIterator<Item = u32> + '_ {
        (0..32u32)
            .filter(move |b| self.mask & (1 << b) != 0)
            .map(|b| b + 1)
    }

    pub fn index_vec(&self) -> Vec<u32> {
        self.indices().collect()
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices()
            .cmp(other.indices())
            .then(self.kind.cmp(&other.kind))
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("E0");
        }
        let idx: Vec<String> = self.indices().map(|j| j.to_string()).collect();
        match self.kind {
            AlgebraKind::Clifford => write!(f, "E[{}]", idx.join(",")),
            AlgebraKind::Deformed => write!(f, "be[{}]", idx.join(",")),
        }
    }
}

/// A `B_p` product that collapsed to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degeneracy {
    pub left: Blade,
    pub right: Blade,
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "note: B_p product {} * {} vanishes (e_j e_k = 0 for j != k)",
            self.left, self.right
        )
    }
}

/// Parity of the number of transpositions needed to sort `a` followed by `b`.
fn reorder_sign(a: u32, b: u32) -> i64 {
    let mut a = a >> 1;
    let mut swaps = 0;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Product of two blades as `(coefficient, blade)`, plus the degeneracy
/// diagnostic when a `B_p` product vanishes. Units multiply with either kind.
pub fn blade_product_checked(a: &Blade, b: &Blade) -> Result<(Scalar, Blade, Option<Degeneracy>)> {
    if a.is_unit() {
        return Ok((Scalar::one(), *b, None));
    }
    if b.is_unit() {
        return Ok((Scalar::one(), *a, None));
    }
    if a.kind != b.kind {
        return Err(Error::AlgebraMismatch(format!(
            "cannot multiply {a} and {b}: A_m and B_p blades do not mix"
        )));
    }
    match a.kind {
        AlgebraKind::Clifford => {
            let mut sign = reorder_sign(a.mask, b.mask);
            if (a.mask & b.mask).count_ones() % 2 == 1 {
                sign = -sign;
            }
            Ok((
                Scalar::from_integer(sign),
                Blade::from_mask(AlgebraKind::Clifford, a.mask ^ b.mask),
                None,
            ))
        }
        AlgebraKind::Deformed => {
            if a.mask == b.mask && a.grade() == 1 {
                Ok((Scalar::one(), Blade::unit(), None))
            } else {
                let d = Degeneracy {
                    left: *a,
                    right: *b,
                };
                log::warn!("{d}");
                Ok((Scalar::zero(), Blade::unit(), Some(d)))
            }
        }
    }
}

/// Product of two blades; see [`blade_product_checked`].
pub fn blade_product(a: &Blade, b: &Blade) -> Result<(Scalar, Blade)> {
    blade_product_checked(a, b).map(|(c, bl, _)| (c, bl))
}

/// A linear combination of blades of one algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multivector {
    algebra: Algebra,
    terms: BTreeMap<Blade, Scalar>,
}

impl Multivector {
    pub fn zero(algebra: Algebra) -> Self {
        Self {
            algebra,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(algebra: Algebra, s: Scalar) -> Self {
        let mut mv = Self::zero(algebra);
        mv.accumulate(Blade::unit(), s);
        mv
    }

    pub fn one(algebra: Algebra) -> Self {
        Self::scalar(algebra, Scalar::one())
    }

    pub fn blade(algebra: Algebra, b: Blade, s: Scalar) -> Result<Self> {
        algebra.contains(&b)?;
        let mut mv = Self::zero(algebra);
        mv.accumulate(b, s);
        Ok(mv)
    }

    pub fn generator(algebra: Algebra, j: u32) -> Result<Self> {
        let b = algebra.generator(j)?;
        Self::blade(algebra, b, Scalar::one())
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, b: &Blade) -> Scalar {
        self.terms.get(b).cloned().unwrap_or_default()
    }

    pub(crate) fn accumulate(&mut self, b: Blade, s: Scalar) {
        if s.is_zero() {
            return;
        }
        let sum = match self.terms.get(&b) {
            Some(existing) => existing + &s,
            None => s,
        };
        if sum.is_zero() {
            self.terms.remove(&b);
        } else {
            self.terms.insert(b, sum);
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch(format!(
                "{}_{} vs {}_{}",
                self.algebra.kind, self.algebra.dim, other.algebra.kind, other.algebra.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (b, s) in other.terms() {
            out.accumulate(*b, s.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&-other)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero(self.algebra);
        for (b, c) in self.terms() {
            out.accumulate(*b, c * s);
        }
        out
    }

    /// Clifford product, also returning every vanishing `B_p` blade product.
    pub fn mul_checked(&self, other: &Self) -> Result<(Self, Vec<Degeneracy>)> {
        self.check_same(other)?;
        let mut out = Self::zero(self.algebra);
        let mut notes = Vec::new();
        for (ba, sa) in self.terms() {
            for (bb, sb) in other.terms() {
                let (c, b, d) = blade_product_checked(ba, bb)?;
                notes.extend(d);
                out.accumulate(b, &(&c * sa) * sb);
            }
        }
        Ok((out, notes))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_checked(other).map(|(mv, _)| mv)
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut out = Self::zero(self.algebra);
        for (b, s) in self.terms() {
            out.accumulate(*b, f(s));
        }
        out
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(&Scalar::from_integer(-1))
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    /// Panics when the algebras differ; use [`Multivector::add`] to get an error instead.
    fn add(self, rhs: &Multivector) -> Multivector {
        Multivector::add(self, rhs).expect("multivectors of the same algebra")
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        Multivector::sub(self, rhs).expect("multivectors of the same algebra")
    }
}

/// Render `coefficient * body` as one signed summand.
pub(crate) fn signed_summand(c: &Scalar, body: &str) -> (bool, String) {
    match c.signed_factor() {
        Some((neg, f)) if f == "1" => (neg, body.to_string()),
        Some((neg, f)) => (neg, format!("{f}*{body}")),
        None => (false, format!("({c})*{body}")),
    }
}

pub(crate) fn join_summands(parts: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (n, (neg, s)) in parts.into_iter().enumerate() {
        match (n, neg) {
            (0, false) => out.push_str(&s),
            (0, true) => {
                out.push('-');
                out.push_str(&s);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&s);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&s);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (b, c) in self.terms() {
            if b.is_unit() {
                let text = c.to_string();
                if c.len() == 1 {
                    let neg = text.starts_with('-');
                    parts.push((neg, text.trim_start_matches('-').to_string()));
                } else {
                    parts.push((false, format!("({text})")));
                }
            } else {
                parts.push(signed_summand(c, &b.to_string()));
            }
        }
        f.write_str(&join_summands(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(j: u32) -> Blade {
        Blade::generator(AlgebraKind::Clifford, j).unwrap()
    }

    fn be(j: u32) -> Blade {
        Blade::generator(AlgebraKind::Deformed, j).unwrap()
    }

    fn blade(ix: &[u32]) -> Blade {
        Blade::new(AlgebraKind::Clifford, ix).unwrap()
    }

    #[test]
    fn clifford_generator_products() {
        assert_eq!(
            blade_product(&e(1), &e(2)).unwrap(),
            (Scalar::one(), blade(&[1, 2]))
        );
        assert_eq!(
            blade_product(&e(2), &e(1)).unwrap(),
            (Scalar::from_integer(-1), blade(&[1, 2]))
        );
        assert_eq!(
            blade_product(&e(1), &e(1)).unwrap(),
            (Scalar::from_integer(-1), Blade::unit())
        );
        assert_eq!(
            blade_product(&blade(&[1, 2]), &e(2)).unwrap(),
            (Scalar::from_integer(-1), e(1))
        );
    }

    #[test]
    fn deformed_generator_products() {
        assert_eq!(
            blade_product(&be(1), &be(1)).unwrap(),
            (Scalar::one(), Blade::unit())
        );
        let (c, b, d) = blade_product_checked(&be(1), &be(2)).unwrap();
        assert!(c.is_zero());
        assert_eq!(b, Blade::unit());
        assert_eq!(
            d,
            Some(Degeneracy {
                left: be(1),
                right: be(2)
            })
        );
    }

    #[test]
    fn mixing_algebras_is_an_error() {
        assert!(blade_product(&e(1), &be(1)).is_err());
        assert!(Algebra::clifford(2).blade_product(&e(3), &e(1)).is_err());
        let a = Multivector::one(Algebra::clifford(2));
        let b = Multivector::one(Algebra::clifford(3));
        assert!(a.mul(&b).is_err());
        assert!(Blade::new(AlgebraKind::Deformed, &[1, 2]).is_err());
    }

    #[test]
    fn basis_sizes() {
        for m in 0..=5 {
            assert_eq!(Algebra::clifford(m).basis().len(), 1 << m);
        }
        assert_eq!(Algebra::deformed(3).basis().len(), 4);
    }

    #[test]
    fn multivector_examples() {
        let alg = Algebra::clifford(2);
        let e1 = Multivector::generator(alg, 1).unwrap();
        let e2 = Multivector::generator(alg, 2).unwrap();
        let lhs = (&e1 + &e2).mul(&(&e1 - &e2)).unwrap();
        let expected = Multivector::blade(alg, blade(&[1, 2]), Scalar::from_integer(-2)).unwrap();
        assert_eq!(lhs, expected);
        assert_eq!(e1.mul(&Multivector::one(alg)).unwrap(), e1);

        let balg = Algebra::deformed(2);
        let b1 = Multivector::generator(balg, 1).unwrap();
        let b2 = Multivector::generator(balg, 2).unwrap();
        let s = &b1 + &b2;
        let (sq, notes) = s.mul_checked(&s).unwrap();
        assert_eq!(sq, Multivector::scalar(balg, Scalar::from_integer(2)));
        assert_eq!(notes.len(), 2);
    }

    #[test]
    fn display() {
        let alg = Algebra::clifford(2);
        let mv = Multivector::blade(alg, blade(&[1, 2]), Scalar::from_integer(-2))
            .unwrap()
            .add(&Multivector::scalar(alg, Scalar::q()))
            .unwrap();
        assert_eq!(mv.to_string(), "q - 2*E[1,2]");
    }
}
