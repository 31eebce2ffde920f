//! Lossless JSON encoding.
//!
//! An expression is an array of terms
//! `{coeff, blade: {algebra, indices}, slot1: [gen], slot2: [gen] | null}`.
//! A coefficient is an array of `{num: [re_num, re_den, im_num, im_den],
//! pow: {param: exp}}`; a generator is `{kind, index}`. Integers that fit in
//! an `i64` are JSON numbers, larger ones are decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::calculus::PolyFunction;
use crate::clifford::{Algebra, AlgebraKind, Blade, Multivector};
use crate::error::{Error, Result};
use crate::scalars::{GaussianRational, Monomial, Param, Scalar};
use crate::terms::{Entry, Expression, FunTag, Generator, TermKey, Word};
use crate::verify::{PlaneRelation, VerificationReport};

fn bad(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

fn int(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| bad(format!("not an integer: {n}"))),
        Value::String(s) => s.parse().map_err(|_| bad(format!("not an integer: {s:?}"))),
        other => Err(bad(format!("expected an integer, found {other}"))),
    }
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    let terms = s
        .terms()
        .map(|(m, c)| {
            let pow: Map<String, Value> =
                m.iter().map(|(p, e)| (p.to_string(), json!(e))).collect();
            json!({
                "num": [int(c.re.numer()), int(c.re.denom()), int(c.im.numer()), int(c.im.denom())],
                "pow": pow,
            })
        })
        .collect();
    Value::Array(terms)
}

fn parse_param(s: &str) -> Result<Param> {
    match s {
        "hbar" => return Ok(Param::Hbar),
        "q" => return Ok(Param::Q),
        _ => {}
    }
    let inner = s
        .strip_prefix("Q[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| bad(format!("unknown parameter {s:?}")))?;
    let (j, k) = inner
        .split_once(',')
        .ok_or_else(|| bad(format!("unknown parameter {s:?}")))?;
    let idx = |t: &str| t.trim().parse::<u32>().ok().filter(|&n| n > 0);
    match (idx(j), idx(k)) {
        (Some(j), Some(k)) => Ok(Param::qjk(j, k)),
        _ => Err(bad(format!("unknown parameter {s:?}"))),
    }
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    let terms = v
        .as_array()
        .ok_or_else(|| bad("coefficient must be an array"))?;
    let mut out = Scalar::zero();
    for t in terms {
        let num = t
            .get("num")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 4)
            .ok_or_else(|| bad("coefficient term needs `num` with four integers"))?;
        let n: Vec<BigInt> = num.iter().map(parse_int).collect::<Result<_>>()?;
        if n[1] == BigInt::from(0) || n[3] == BigInt::from(0) {
            return Err(bad("zero denominator"));
        }
        let c = GaussianRational::new(
            BigRational::new(n[0].clone(), n[1].clone()),
            BigRational::new(n[2].clone(), n[3].clone()),
        );
        let mut m = Monomial::one();
        if let Some(pow) = t.get("pow") {
            let pow = pow
                .as_object()
                .ok_or_else(|| bad("`pow` must be an object"))?;
            for (name, e) in pow {
                let e = e
                    .as_i64()
                    .ok_or_else(|| bad("exponent must be an integer"))?;
                m = m.mul(&Monomial::var(parse_param(name)?, e)?);
            }
        }
        out = out + Scalar::term(m, c);
    }
    Ok(out)
}

pub fn blade_to_json(b: &Blade) -> Value {
    json!({ "algebra": b.kind().to_string(), "indices": b.index_vec() })
}

pub fn blade_from_json(v: &Value) -> Result<Blade> {
    let kind = match v.get("algebra").and_then(Value::as_str) {
        Some("A") | None => AlgebraKind::Clifford,
        Some("B") => AlgebraKind::Deformed,
        Some(other) => return Err(bad(format!("unknown algebra {other:?}"))),
    };
    let indices = v
        .get("indices")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("blade needs `indices`"))?
        .iter()
        .map(|i| {
            i.as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| bad("blade index must be a positive integer"))
        })
        .collect::<Result<Vec<u32>>>()?;
    Blade::new(kind, &indices)
}

pub fn generator_to_json(g: &Generator) -> Value {
    let (kind, index): (&str, Option<u32>) = match g {
        Generator::Coordinate(j) => ("x", Some(*j)),
        Generator::Momentum(j) => ("p", Some(*j)),
        Generator::Partial(j) => ("d", Some(*j)),
        Generator::Fun(FunTag::F) => ("f", None),
        Generator::Fun(FunTag::Comp(j)) => ("f", Some(*j)),
        Generator::Fun(FunTag::Df(j)) => ("df", Some(*j)),
        Generator::Fun(FunTag::DiracLeft) => ("Df", None),
        Generator::Fun(FunTag::DiracRight) => ("fD", None),
        Generator::Entry(e) => (e.name(), None),
    };
    json!({ "kind": kind, "index": index })
}

pub fn generator_from_json(v: &Value) -> Result<Generator> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("generator needs `kind`"))?;
    let index = match v.get("index") {
        None | Some(Value::Null) => None,
        Some(i) => Some(
            i.as_u64()
                .and_then(|n| u32::try_from(n).ok())
                .ok_or_else(|| bad("generator index must be a positive integer"))?,
        ),
    };
    let g = match (kind, index) {
        ("x", Some(j)) => Generator::Coordinate(j),
        ("p", Some(j)) => Generator::Momentum(j),
        ("d", Some(j)) => Generator::Partial(j),
        ("f", None) => Generator::Fun(FunTag::F),
        ("f", Some(j)) => Generator::Fun(FunTag::Comp(j)),
        ("df", Some(j)) => Generator::Fun(FunTag::Df(j)),
        ("Df", None) => Generator::Fun(FunTag::DiracLeft),
        ("fD", None) => Generator::Fun(FunTag::DiracRight),
        ("a", None) => Generator::Entry(Entry::A),
        ("b", None) => Generator::Entry(Entry::B),
        ("c", None) => Generator::Entry(Entry::C),
        ("d", None) => Generator::Entry(Entry::D),
        _ => {
            return Err(bad(format!(
                "unknown generator kind {kind:?} with index {index:?}"
            )))
        }
    };
    g.check()?;
    Ok(g)
}

fn word_to_json(w: &Word) -> Value {
    Value::Array(w.factors().iter().map(generator_to_json).collect())
}

fn word_from_json(v: &Value) -> Result<Word> {
    let items = v.as_array().ok_or_else(|| bad("word must be an array"))?;
    Ok(Word::new(
        items
            .iter()
            .map(generator_from_json)
            .collect::<Result<_>>()?,
    ))
}

pub fn expression_to_json(e: &Expression) -> Value {
    let terms = e
        .iter()
        .map(|(key, c)| {
            json!({
                "coeff": scalar_to_json(c),
                "blade": blade_to_json(&key.prefix),
                "slot1": word_to_json(&key.slot1),
                "slot2": key.slot2.as_ref().map(word_to_json),
            })
        })
        .collect();
    Value::Array(terms)
}

pub fn expression_from_json(v: &Value) -> Result<Expression> {
    let terms = v
        .as_array()
        .ok_or_else(|| bad("expression must be an array"))?;
    let mut out = Expression::zero();
    for t in terms {
        let coeff = scalar_from_json(t.get("coeff").ok_or_else(|| bad("term needs `coeff`"))?)?;
        let prefix = match t.get("blade") {
            None | Some(Value::Null) => Blade::unit(),
            Some(b) => blade_from_json(b)?,
        };
        let slot1 = word_from_json(t.get("slot1").ok_or_else(|| bad("term needs `slot1`"))?)?;
        let slot2 = match t.get("slot2") {
            None | Some(Value::Null) => None,
            Some(w) => Some(word_from_json(w)?),
        };
        out = out.add(&Expression::from_term(
            TermKey::new(prefix, slot1, slot2),
            coeff,
        ));
    }
    Ok(out)
}

pub fn multivector_to_json(m: &Multivector) -> Value {
    let a = m.algebra();
    let terms: Vec<Value> = m
        .terms()
        .map(|(b, s)| json!({ "blade": b.index_vec(), "coeff": scalar_to_json(s) }))
        .collect();
    json!({ "algebra": a.kind.to_string(), "dim": a.dim, "terms": terms })
}

/// `{algebra, dim, terms: [{exponents: [e0, .., em], value: multivector}]}`.
pub fn poly_to_json(f: &PolyFunction) -> Value {
    let a: Algebra = f.algebra();
    let terms: Vec<Value> = f
        .terms()
        .map(|(exps, mv)| json!({ "exponents": exps, "value": multivector_to_json(mv) }))
        .collect();
    json!({ "algebra": a.kind.to_string(), "dim": a.dim, "terms": terms })
}

pub fn report_to_json(r: &VerificationReport) -> Value {
    let relations: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            json!({
                "label": e.label,
                "substitutions": e.substitutions,
                "residual": expression_to_json(&e.residual),
                "residual_text": e.residual.to_string(),
                "verdict": e.verdict.to_string(),
            })
        })
        .collect();
    json!({
        "check": r.check,
        "config": { "qjk": r.config.qjk.name(), "sign": r.config.sign.name() },
        "relations": relations,
    })
}

pub fn plane_relations_to_json(rels: &[PlaneRelation]) -> Value {
    Value::Array(
        rels.iter()
            .map(|r| {
                json!({
                    "basis": expression_to_json(&r.basis),
                    "relation": expression_to_json(&r.relation),
                    "relation_text": r.relation.to_string(),
                })
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;

    #[test]
    fn round_trip() {
        for s in [
            "0",
            "1",
            "x[1] ox p[2] - q * (p[2] ox x[1])",
            "-(1/2)*i*hbar*q^-1*Q[1,2] * (E[1,2] x[1] f df[2] ox Df fD)",
            "be[2] a b c d d[1]",
            "f[3] ox 1",
        ] {
            let e = parse_expression(s).unwrap();
            let v = expression_to_json(&e);
            assert_eq!(expression_from_json(&v).unwrap(), e, "{s}");
        }
    }

    #[test]
    fn schema_shape() {
        let e = parse_expression("q^-1 * (x[2] ox x[1])").unwrap();
        let v = expression_to_json(&e);
        assert_eq!(
            v,
            json!([{
                "coeff": [{"num": [1, 1, 0, 1], "pow": {"q": -1}}],
                "blade": {"algebra": "A", "indices": []},
                "slot1": [{"kind": "x", "index": 2}],
                "slot2": [{"kind": "x", "index": 1}],
            }])
        );
    }

    #[test]
    fn big_integers_are_strings() {
        let e = parse_expression("123456789012345678901234567890 * x[1]").unwrap();
        let v = expression_to_json(&e);
        assert_eq!(
            v[0]["coeff"][0]["num"][0],
            json!("123456789012345678901234567890")
        );
        assert_eq!(expression_from_json(&v).unwrap(), e);
    }

    #[test]
    fn rejects_malformed() {
        assert!(expression_from_json(&json!({})).is_err());
        assert!(
            expression_from_json(&json!([{"coeff": [{"num": [1, 0, 0, 1]}], "slot1": []}]))
                .is_err()
        );
        assert!(generator_from_json(&json!({"kind": "x"})).is_err());
        assert!(generator_from_json(&json!({"kind": "x", "index": 0})).is_err());
    }
}
