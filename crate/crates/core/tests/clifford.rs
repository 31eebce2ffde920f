mod common;

use proptest::prelude::*;
use qheis_core::clifford::blade_product_checked;
use qheis_core::{Algebra, AlgebraKind, Blade, Multivector, Scalar};

fn e(j: u32) -> Blade {
    Blade::generator(AlgebraKind::Clifford, j).unwrap()
}

fn be(j: u32) -> Blade {
    Blade::generator(AlgebraKind::Deformed, j).unwrap()
}

fn mv(alg: Algebra, terms: &[(&[u32], i64)]) -> Multivector {
    terms.iter().fold(Multivector::zero(alg), |acc, (idx, c)| {
        let b = Multivector::blade(
            alg,
            Blade::new(alg.kind, idx).unwrap(),
            Scalar::from_integer(*c),
        )
        .unwrap();
        acc.add(&b).unwrap()
    })
}

#[test]
fn clifford_blade_examples() {
    let a = Algebra::clifford(3);
    assert_eq!(
        a.blade_product(&e(1), &e(2)).unwrap(),
        (
            Scalar::one(),
            Blade::new(AlgebraKind::Clifford, &[1, 2]).unwrap()
        )
    );
    assert_eq!(
        a.blade_product(&e(1), &e(1)).unwrap(),
        (Scalar::from_integer(-1), Blade::unit())
    );
    let e12 = Blade::new(AlgebraKind::Clifford, &[1, 2]).unwrap();
    assert_eq!(
        a.blade_product(&e12, &e(2)).unwrap(),
        (Scalar::from_integer(-1), e(1))
    );
}

#[test]
fn deformed_blade_examples() {
    let (s, b, deg) = blade_product_checked(&be(1), &be(1)).unwrap();
    assert_eq!((s, b), (Scalar::one(), Blade::unit()));
    assert!(deg.is_none());
    let (s, _, deg) = blade_product_checked(&be(1), &be(2)).unwrap();
    assert!(s.is_zero());
    assert!(deg.is_some());
}

#[test]
fn multivector_examples() {
    let a = Algebra::clifford(2);
    // (e1 + e2)(e1 - e2) = -1 - e12 + e21 + 1 = -2 e12
    let x = mv(a, &[(&[1], 1), (&[2], 1)]);
    let y = mv(a, &[(&[1], 1), (&[2], -1)]);
    assert_eq!(x.mul(&y).unwrap(), mv(a, &[(&[1, 2], -2)]));
    assert_eq!(x.mul(&Multivector::one(a)).unwrap(), x);
    let b = Algebra::deformed(2);
    let z = mv(b, &[(&[1], 1), (&[2], 1)]);
    assert_eq!(z.mul(&z).unwrap(), mv(b, &[(&[], 2)]));
}

#[test]
fn grade_two_deformed_blades_are_rejected() {
    assert!(Blade::new(AlgebraKind::Deformed, &[1, 2]).is_err());
    assert!(Blade::new(AlgebraKind::Clifford, &[2, 1]).is_err());
    assert!(Blade::generator(AlgebraKind::Clifford, 0).is_err());
}

#[test]
fn mixing_algebras_fails() {
    let x = Multivector::generator(Algebra::clifford(2), 1).unwrap();
    let y = Multivector::generator(Algebra::deformed(2), 1).unwrap();
    assert!(x.mul(&y).is_err());
    assert!(x.add(&y).is_err());
}

fn arb_mv(dim: u32) -> impl Strategy<Value = Multivector> {
    let alg = Algebra::clifford(dim);
    prop::collection::vec((common::arb_blade(dim), common::arb_scalar()), 0..=4).prop_map(
        move |ts| {
            ts.into_iter().fold(Multivector::zero(alg), |acc, (b, s)| {
                acc.add(&Multivector::blade(alg, b, s).unwrap()).unwrap()
            })
        },
    )
}

proptest! {
    #[test]
    fn product_is_associative(a in arb_mv(3), b in arb_mv(3), c in arb_mv(3)) {
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn product_distributes(a in arb_mv(3), b in arb_mv(3), c in arb_mv(3)) {
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn generators_anticommute(j in 1u32..=4, k in 1u32..=4) {
        let a = Algebra::clifford(4);
        let ej = Multivector::generator(a, j).unwrap();
        let ek = Multivector::generator(a, k).unwrap();
        let anti = ej.mul(&ek).unwrap().add(&ek.mul(&ej).unwrap()).unwrap();
        let expected = if j == k { Multivector::scalar(a, Scalar::from_integer(-2)) } else { Multivector::zero(a) };
        prop_assert_eq!(anti, expected);
    }

    #[test]
    fn scaling_commutes_with_product(a in arb_mv(3), b in arb_mv(3), s in common::arb_scalar()) {
        prop_assert_eq!(a.scale(&s).mul(&b).unwrap(), a.mul(&b).unwrap().scale(&s));
    }
}
