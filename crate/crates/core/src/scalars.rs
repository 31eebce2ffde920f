//! Exact coefficients: Gaussian rationals times Laurent monomials in `q`,
//! `hbar` and the pair parameters `Q[j,k]`.
//!
//! Every value is kept in canonical form: rationals reduced, no zero
//! coefficients, no zero exponents. Two scalars are equal iff their term maps
//! are identical, so `==` is exact algebraic equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A Gaussian rational `re + im*i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        let c = self.conj();
        Some(Self::new(c.re / &norm, c.im / norm))
    }

    /// True when the value is `-x` for an `x` that renders without a leading
    /// sign (negative real, or zero real part and negative imaginary part).
    fn is_negative(&self) -> bool {
        if self.im.is_zero() {
            self.re.is_negative()
        } else if self.re.is_zero() {
            self.im.is_negative()
        } else {
            false
        }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

/// A symbolic parameter of the coefficient ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Hbar,
    Q,
    /// Pair parameter `Q[j,k]`, stored with `j <= k`.
    Qjk(u32, u32),
}

impl Param {
    /// The pair parameter for an unordered index pair.
    pub fn qjk(j: u32, k: u32) -> Self {
        Param::Qjk(j.min(k), j.max(k))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Hbar => f.write_str("hbar"),
            Param::Q => f.write_str("q"),
            Param::Qjk(j, k) => write!(f, "Q[{j},{k}]"),
        }
    }
}

/// Product of parameters with integer exponents. Zero exponents are never
/// stored and `hbar` never appears with a negative exponent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<Param, i64>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(p: Param, exp: i64) -> Result<Self> {
        let mut m = Self::one();
        m.set(p, exp)?;
        Ok(m)
    }

    fn set(&mut self, p: Param, exp: i64) -> Result<()> {
        if p == Param::Hbar && exp < 0 {
            return Err(Error::NegativeHbar);
        }
        if exp == 0 {
            self.0.remove(&p);
        } else {
            self.0.insert(p, exp);
        }
        Ok(())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, p: Param) -> i64 {
        self.0.get(&p).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Param, i64)> + '_ {
        self.0.iter().map(|(p, e)| (*p, *e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (p, e) in other.iter() {
            let total = out.exponent(p) + e;
            // Both factors are valid, so a negative hbar total cannot arise.
            out.set(p, total).expect("hbar exponents only grow");
        }
        out
    }

    pub fn pow(&self, n: i64) -> Result<Monomial> {
        let mut out = Monomial::one();
        for (p, e) in self.iter() {
            out.set(p, e * n)?;
        }
        Ok(out)
    }

    pub fn without(&self, p: Param) -> Monomial {
        let mut out = self.clone();
        out.0.remove(&p);
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (p, e) in self.iter() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Element of the coefficient ring `Q(i)[q^±1, hbar, Q[j,k]^±1]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::term(Monomial::one(), GaussianRational::from_integer(n))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::term(Monomial::one(), GaussianRational::real(r))
    }

    pub fn from_gaussian(g: GaussianRational) -> Self {
        Self::term(Monomial::one(), g)
    }

    pub fn term(m: Monomial, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn i() -> Self {
        Self::from_gaussian(GaussianRational::i())
    }

    pub fn param(p: Param, exp: i64) -> Result<Self> {
        Ok(Self::term(Monomial::var(p, exp)?, GaussianRational::one()))
    }

    pub fn q() -> Self {
        Self::param(Param::Q, 1).expect("q is valid")
    }

    pub fn q_inv() -> Self {
        Self::param(Param::Q, -1).expect("q^-1 is valid")
    }

    pub fn hbar() -> Self {
        Self::param(Param::Hbar, 1).expect("hbar is valid")
    }

    /// `i*hbar`, the constant of the canonical commutator.
    pub fn i_hbar() -> Self {
        &Self::i() * &Self::hbar()
    }

    pub fn qjk(j: u32, k: u32) -> Self {
        Self::param(Param::qjk(j, k), 1).expect("Q[j,k] is valid")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// The single term of a one-term scalar.
    pub fn as_single_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn accumulate(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Multiplicative inverse; defined only for single-term scalars.
    pub fn inverse(&self) -> Result<Scalar> {
        let (m, c) = self
            .as_single_term()
            .ok_or_else(|| Error::NotInvertible(self.to_string()))?;
        let c_inv = c
            .inverse()
            .ok_or_else(|| Error::NotInvertible(self.to_string()))?;
        Ok(Scalar::term(m.pow(-1)?, c_inv))
    }

    pub fn pow(&self, n: i64) -> Result<Scalar> {
        if n < 0 {
            return self.inverse()?.pow(-n);
        }
        let mut out = Scalar::one();
        for _ in 0..n {
            out = &out * self;
        }
        Ok(out)
    }

    /// Substitute `q := 1`; every other parameter is left alone.
    pub fn limit_q1(&self) -> Scalar {
        let mut out = Scalar::zero();
        for (m, c) in self.terms() {
            out.accumulate(m.without(Param::Q), c.clone());
        }
        out
    }

    /// Replace parameters for which `f` returns a value. Negative exponents
    /// require the replacement to be invertible.
    pub fn substitute(&self, f: &dyn Fn(Param) -> Option<Scalar>) -> Result<Scalar> {
        let mut out = Scalar::zero();
        for (m, c) in self.terms() {
            let mut kept = Monomial::one();
            let mut factor = Scalar::from_gaussian(c.clone());
            for (p, e) in m.iter() {
                match f(p) {
                    Some(value) => factor = &factor * &value.pow(e)?,
                    None => kept = kept.mul(&Monomial::var(p, e)?),
                }
            }
            out = &out + &(&factor * &Scalar::term(kept, GaussianRational::one()));
        }
        Ok(out)
    }

    /// Split a single-term scalar into a sign and the unsigned rendering used
    /// when it multiplies something else. `None` for multi-term scalars.
    pub(crate) fn signed_factor(&self) -> Option<(bool, String)> {
        let (m, c) = self.as_single_term()?;
        let neg = c.is_negative();
        let mag = if neg { -c } else { c.clone() };
        Some((neg, render_term_body(&mag, m)))
    }
}

fn render_rational(r: &BigRational, standalone: bool) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if standalone {
        format!("{}/{}", r.numer(), r.denom())
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

/// Render `c*m` where `c` carries no leading sign.
fn render_term_body(c: &GaussianRational, m: &Monomial) -> String {
    let standalone = m.is_one();
    let coeff = if c.im.is_zero() {
        if c.re.is_one() {
            None
        } else {
            Some(render_rational(&c.re, standalone))
        }
    } else if c.re.is_zero() {
        if c.im.is_one() {
            Some("i".to_string())
        } else {
            Some(format!("{}*i", render_rational(&c.im, false)))
        }
    } else {
        let (sign, im) = if c.im.is_negative() {
            ("-", -c.im.clone())
        } else {
            ("+", c.im.clone())
        };
        let im_part = if im.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", render_rational(&im, false))
        };
        Some(format!(
            "({} {} {})",
            render_rational(&c.re, true),
            sign,
            im_part
        ))
    };
    match (coeff, standalone) {
        (None, true) => "1".to_string(),
        (None, false) => m.to_string(),
        (Some(c), true) => c,
        (Some(c), false) => format!("{c}*{m}"),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            let body = render_term_body(&mag, m);
            match (n, neg) {
                (0, false) => f.write_str(&body)?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scalar> {
        let e = crate::parse::parse_expression(s)?;
        e.as_scalar().ok_or_else(|| {
            Error::Syntax(crate::error::SyntaxError {
                line: 1,
                column: 1,
                token: s.to_string(),
                message: "expected a scalar".to_string(),
            })
        })
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in rhs.terms() {
                out.accumulate(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar::from_rational(BigRational::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    fn assert_canonical(x: &Scalar) {
        for (m, c) in x.terms() {
            assert!(!c.is_zero(), "zero coefficient in {x:?}");
            for (_, e) in m.iter() {
                assert_ne!(e, 0);
            }
        }
    }

    #[test]
    fn add_examples() {
        assert_eq!(&s("2 + q") + &s("-q"), Scalar::from_integer(2));
        assert_eq!(&Scalar::zero() + &Scalar::hbar(), Scalar::hbar());
        assert_eq!(&Scalar::q_inv() + &Scalar::q_inv(), s("2*q^-1"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&Scalar::q() * &Scalar::q_inv(), Scalar::one());
        let ih = Scalar::i_hbar();
        assert_eq!(&ih * &ih, s("-hbar^2"));
        let prod = &Scalar::qjk(1, 2) * &Scalar::q();
        let (m, c) = prod.as_single_term().unwrap();
        assert!(c.is_one());
        assert_eq!(m.exponent(Param::Q), 1);
        assert_eq!(m.exponent(Param::Qjk(1, 2)), 1);
    }

    #[test]
    fn limit_q1_examples() {
        assert!((&Scalar::one() - &Scalar::q_inv()).limit_q1().is_zero());
        assert_eq!(s("i*hbar*q").limit_q1(), Scalar::i_hbar());
        assert_eq!(Scalar::qjk(1, 2).limit_q1(), Scalar::qjk(1, 2));
    }

    #[test]
    fn qjk_is_unordered() {
        assert_eq!(Scalar::qjk(2, 1), Scalar::qjk(1, 2));
    }

    #[test]
    fn negative_hbar_is_rejected() {
        assert!(matches!(
            Scalar::param(Param::Hbar, -1),
            Err(Error::NegativeHbar)
        ));
        assert!(Scalar::hbar().inverse().is_err());
        assert!("hbar^-1".parse::<Scalar>().is_err());
    }

    #[test]
    fn inverse_of_gaussian() {
        let z = s("(1 + i)*q");
        let inv = z.inverse().unwrap();
        assert_eq!(&z * &inv, Scalar::one());
        assert!(s("1 + q").inverse().is_err());
        assert!(Scalar::zero().inverse().is_err());
    }

    #[test]
    fn rendering() {
        assert_eq!(s("-(1/2)*i*hbar*q^-1").to_string(), "-(1/2)*i*hbar*q^-1");
        assert_eq!(s("3/2").to_string(), "3/2");
        assert_eq!(s("Q[1,2]").to_string(), "Q[1,2]");
        assert_eq!(Scalar::zero().to_string(), "0");
        assert_eq!(s("(1 - 2*i)*q").to_string(), "(1 - 2*i)*q");
        assert_eq!(s("2 + q - hbar").to_string(), "2 - hbar + q");
    }

    #[test]
    fn substitute_table_values() {
        let x = &Scalar::qjk(1, 2) + &Scalar::qjk(1, 1);
        let table = |p: Param| match p {
            Param::Qjk(j, k) => Some(if j == k {
                Scalar::zero()
            } else {
                Scalar::from_integer(-1)
            }),
            _ => None,
        };
        assert_eq!(x.substitute(&table).unwrap(), Scalar::from_integer(-1));
        let inv = Scalar::param(Param::qjk(1, 1), -1).unwrap();
        assert!(inv.substitute(&table).is_err());
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        let term = (
            -3i64..=3,
            -2i64..=2,
            1i64..=3,
            -2i64..=2,
            0i64..=2,
            prop::option::of((1u32..=2, 1u32..=2, -1i64..=1)),
        )
            .prop_map(|(re, im, den, qe, he, pair)| {
                let c = GaussianRational::new(
                    BigRational::new(re.into(), den.into()),
                    BigRational::from_integer(im.into()),
                );
                let mut m = Monomial::var(Param::Q, qe).unwrap();
                m = m.mul(&Monomial::var(Param::Hbar, he).unwrap());
                if let Some((j, k, e)) = pair {
                    m = m.mul(&Monomial::var(Param::qjk(j, k), e).unwrap());
                }
                Scalar::term(m, c)
            });
        prop::collection::vec(term, 0..4)
            .prop_map(|ts| ts.iter().fold(Scalar::zero(), |acc, t| &acc + t))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            for x in [&a + &b, &a * &b, &a - &c] {
                assert_canonical(&x);
            }
        }

        #[test]
        fn inverse_monomial_cancels(x in arb_scalar(), qe in -3i64..=3, pe in -2i64..=2) {
            let y = &Scalar::param(Param::Q, qe).unwrap() * &Scalar::param(Param::qjk(1, 2), pe).unwrap();
            prop_assert_eq!(&x * &(&y * &y.inverse().unwrap()), x);
        }

        #[test]
        fn render_parse_round_trip(x in arb_scalar()) {
            prop_assert_eq!(x.to_string().parse::<Scalar>().unwrap(), x);
        }
    }
}
