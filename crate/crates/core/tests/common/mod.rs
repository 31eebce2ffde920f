#![allow(dead_code)]

use num_rational::BigRational;
use proptest::prelude::*;
use qheis_core::{
    AlgebraKind, Blade, Expression, GaussianRational, Generator, Monomial, Param, Scalar, TermKey,
    Word,
};

pub fn gaussian(re: i64, im: i64, den: i64) -> GaussianRational {
    GaussianRational::new(
        BigRational::new(re.into(), den.into()),
        BigRational::new(im.into(), den.into()),
    )
}

/// Small Laurent polynomials in `q`, `hbar` and `Q[1,2]`.
pub fn arb_scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec(
        (
            -3i64..=3,
            -2i64..=2,
            1i64..=3,
            -2i64..=2,
            0i64..=2,
            -1i64..=1,
        ),
        0..=3,
    )
    .prop_map(|ts| {
        ts.into_iter()
            .fold(Scalar::zero(), |acc, (re, im, den, qe, he, pe)| {
                let m = Monomial::var(Param::Q, qe)
                    .unwrap()
                    .mul(&Monomial::var(Param::Hbar, he).unwrap())
                    .mul(&Monomial::var(Param::qjk(1, 2), pe).unwrap());
                acc + Scalar::term(m, gaussian(re, im, den))
            })
    })
}

pub fn arb_nonzero_scalar() -> impl Strategy<Value = Scalar> {
    arb_scalar().prop_filter("nonzero", |s| !s.is_zero())
}

/// Generators of the given kinds (`x`, `p`, `d`, `e` for matrix entries)
/// with indices `1..=n`.
pub fn arb_generator(kinds: &'static str, n: u32) -> impl Strategy<Value = Generator> {
    let kinds: Vec<char> = kinds.chars().collect();
    (prop::sample::select(kinds), 1..=n, 0usize..4).prop_map(|(k, j, e)| match k {
        'x' => Generator::Coordinate(j),
        'p' => Generator::Momentum(j),
        'd' => Generator::Partial(j),
        'e' => Generator::Entry(
            [
                qheis_core::Entry::A,
                qheis_core::Entry::B,
                qheis_core::Entry::C,
                qheis_core::Entry::D,
            ][e],
        ),
        other => panic!("unknown generator kind {other}"),
    })
}

pub fn arb_word(kinds: &'static str, n: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(arb_generator(kinds, n), 0..=max_len).prop_map(Word::new)
}

pub fn arb_blade(dim: u32) -> impl Strategy<Value = Blade> {
    prop::collection::btree_set(1..=dim, 0..=dim as usize).prop_map(|s| {
        Blade::new(AlgebraKind::Clifford, &s.into_iter().collect::<Vec<_>>()).unwrap()
    })
}

/// Sums of up to `max_terms` terms; `degree` 1 gives words, 2 gives tensors.
pub fn arb_expression(
    kinds: &'static str,
    n: u32,
    max_terms: usize,
    degree: usize,
) -> impl Strategy<Value = Expression> {
    let term = (
        arb_scalar(),
        arb_blade(3),
        arb_word(kinds, n, 2),
        arb_word(kinds, n, 2),
    );
    prop::collection::vec(term, 0..=max_terms).prop_map(move |ts| {
        ts.into_iter()
            .fold(Expression::zero(), |acc, (c, b, w1, w2)| {
                let slot2 = if degree == 2 { Some(w2) } else { None };
                acc.add(&Expression::from_term(TermKey::new(b, w1, slot2), c))
            })
    })
}
