//! Acceptance gate: one PASS/FAIL line per criterion.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qheis_core::calculus::{PolyFunction, Side};
use qheis_core::clifford::blade_product_checked;
use qheis_core::rewrite::{apply_once, critical_pairs, normalize, Presentation};
use qheis_core::verify::{
    default_theorem_functions, derive_plane_relations, run_check, verify_classical_limit,
    verify_prop_bold, verify_prop_nonmonogenic, verify_theorem_monogenic, Config, QjkBinding,
    SignConvention,
};
use qheis_core::{
    parse_expression, Algebra, AlgebraKind, Blade, Expression, GaussianRational, Generator,
    Monomial, Multivector, Param, Scalar, TermKey, Word,
};

const SEED: u64 = 0x5eed_2026;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(s: &str) -> Expression {
    parse_expression(s).unwrap()
}

/// Reference product of Clifford blades: concatenate, bubble-sort counting
/// transpositions, and contract equal neighbours with `e_i e_i = -1`.
fn reference_blade_product(a: &[u32], b: &[u32]) -> (i64, Vec<u32>) {
    let mut v: Vec<u32> = a.iter().chain(b).copied().collect();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    let mut out = Vec::new();
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
            sign = -sign;
        } else {
            out.push(x);
        }
    }
    (sign, out)
}

fn subsets(m: u32) -> Vec<Vec<u32>> {
    (0u32..1 << m)
        .map(|mask| (1..=m).filter(|i| mask >> (i - 1) & 1 == 1).collect())
        .collect()
}

fn random_scalar(rng: &mut StdRng) -> Scalar {
    let mut s = Scalar::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let c = GaussianRational::new(
            BigRational::new(
                rng.gen_range(-4i64..=4).into(),
                rng.gen_range(1i64..=3).into(),
            ),
            BigRational::new(rng.gen_range(-2i64..=2).into(), 1.into()),
        );
        let m = Monomial::var(Param::Q, rng.gen_range(-2..=2))
            .unwrap()
            .mul(&Monomial::var(Param::Hbar, rng.gen_range(0..=2)).unwrap());
        s = s + Scalar::term(m, c);
    }
    s
}

fn random_mv(rng: &mut StdRng, alg: Algebra) -> Multivector {
    let basis = alg.basis();
    let mut m = Multivector::zero(alg);
    for _ in 0..rng.gen_range(1..=4) {
        let b = basis[rng.gen_range(0..basis.len())];
        m = m
            .add(&Multivector::blade(alg, b, random_scalar(rng)).unwrap())
            .unwrap();
    }
    m
}

fn random_word(rng: &mut StdRng, kinds: &[char], n: u32, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::new(
        (0..len)
            .map(|_| {
                let j = rng.gen_range(1..=n);
                match kinds[rng.gen_range(0..kinds.len())] {
                    'x' => Generator::Coordinate(j),
                    'p' => Generator::Momentum(j),
                    _ => Generator::Partial(j),
                }
            })
            .collect(),
    )
}

fn random_expression(rng: &mut StdRng, kinds: &[char], n: u32) -> Expression {
    let mut out = Expression::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let prefix = if rng.gen_bool(0.3) {
            Blade::new(AlgebraKind::Clifford, &[rng.gen_range(1..=3)]).unwrap()
        } else {
            Blade::unit()
        };
        let key = TermKey::new(
            prefix,
            random_word(rng, kinds, n, 2),
            Some(random_word(rng, kinds, n, 2)),
        );
        out = out.add(&Expression::from_term(key, random_scalar(rng)));
    }
    out
}

fn clifford_suite() -> Outcome {
    let mut products = 0;
    for m in 1..=4 {
        let alg = Algebra::clifford(m);
        for a in subsets(m) {
            for b in subsets(m) {
                let (s, blade) = alg
                    .blade_product(
                        &Blade::new(AlgebraKind::Clifford, &a).unwrap(),
                        &Blade::new(AlgebraKind::Clifford, &b).unwrap(),
                    )
                    .unwrap();
                let (rs, rb) = reference_blade_product(&a, &b);
                ensure(
                    s == Scalar::from_integer(rs) && blade.index_vec() == rb,
                    || format!("E{a:?} E{b:?} gave {s} {blade}, expected {rs} {rb:?}"),
                )?;
                products += 1;
            }
        }
        for j in 1..=m {
            for k in 1..=m {
                let ej = Multivector::generator(alg, j).unwrap();
                let ek = Multivector::generator(alg, k).unwrap();
                let anti = ej.mul(&ek).unwrap().add(&ek.mul(&ej).unwrap()).unwrap();
                let expected =
                    Multivector::scalar(alg, Scalar::from_integer(if j == k { -2 } else { 0 }));
                ensure(anti == expected, || {
                    format!("e{j}e{k} + e{k}e{j} = {anti} in A_{m}")
                })?;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(SEED);
    let alg = Algebra::clifford(4);
    for _ in 0..200 {
        let (a, b, c) = (
            random_mv(&mut rng, alg),
            random_mv(&mut rng, alg),
            random_mv(&mut rng, alg),
        );
        let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
        let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
        ensure(lhs == rhs, || {
            format!("associativity failed for {a}, {b}, {c}")
        })?;
    }
    Ok(format!(
        "{products} blade products against a reference, 200 associativity triples"
    ))
}

fn deformed_suite() -> Outcome {
    let mut checked = 0;
    for p in 1..=4 {
        let alg = Algebra::deformed(p);
        let basis = alg.basis();
        for a in &basis {
            for b in &basis {
                let (s, blade, deg) = blade_product_checked(a, b).unwrap();
                let ga = a.index_vec();
                let gb = b.index_vec();
                let expected = match (ga.as_slice(), gb.as_slice()) {
                    ([], _) | (_, []) => Scalar::one(),
                    ([j], [k]) if j == k => Scalar::one(),
                    _ => Scalar::zero(),
                };
                ensure(s == expected, || {
                    format!("{a} {b} gave {s}, expected {expected}")
                })?;
                ensure(s.is_zero() == deg.is_some(), || {
                    format!("degeneracy flag wrong for {a} {b}")
                })?;
                if !s.is_zero() && !ga.is_empty() && !gb.is_empty() {
                    ensure(blade.is_unit(), || {
                        format!("{a} {b} should square to the unit")
                    })?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} generator products, degeneracy reported on every vanishing one"
    ))
}

fn dirac_squared() -> Outcome {
    let mut checked = 0;
    for m in 1..=3u32 {
        let alg = Algebra::clifford(m);
        let vars = (m + 1) as usize;
        let mut exps = vec![vec![]];
        for _ in 0..vars {
            exps = exps
                .into_iter()
                .flat_map(|v: Vec<u32>| (0..=3).map(move |n| [v.clone(), vec![n]].concat()))
                .collect();
        }
        for ex in exps.into_iter().filter(|v| v.iter().sum::<u32>() <= 3) {
            let f = PolyFunction::monomial(ex.clone(), Multivector::one(alg)).unwrap();
            let dd = f.dirac(Side::Left).unwrap().dirac(Side::Left).unwrap();
            let mut lap = PolyFunction::zero(alg);
            for j in 1..=m {
                lap = lap.add(&f.partial(j).unwrap().partial(j).unwrap()).unwrap();
            }
            let neg = lap.scale(&Scalar::from_integer(-1));
            ensure(dd == neg, || {
                format!("D^2 != -Laplacian on exponents {ex:?}, m = {m}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} monomials"))
}

fn monogenicity() -> Outcome {
    let alg = Algebra::clifford(2);
    let (ok, w) = PolyFunction::parse("x1*E[1] - x2*E[2]", Some(2))
        .unwrap()
        .is_monogenic(Side::Left)
        .unwrap();
    // e1 e1 - e2 e2 = (-1) - (-1) = 0
    ensure(ok && w.is_zero(), || {
        format!("x1 e1 - x2 e2 gave witness {w}")
    })?;
    let (ok, w) = PolyFunction::parse("x1*E[1] + x2*E[2]", Some(2))
        .unwrap()
        .is_monogenic(Side::Left)
        .unwrap();
    // e1 e1 + e2 e2 = -2
    let expected = PolyFunction::constant(Multivector::scalar(alg, Scalar::from_integer(-2)));
    ensure(!ok && w == expected, || {
        format!("x1 e1 + x2 e2 gave witness {w}")
    })?;
    Ok("x1 e1 - x2 e2 monogenic; x1 e1 + x2 e2 has witness -2".into())
}

fn normalization_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 5);
    let presets: [(&str, &[char]); 4] = [
        ("qplane", &['x']),
        ("dual-plane", &['d']),
        ("qheis2", &['x', 'p']),
        ("qheis-f", &['x', 'p']),
    ];
    let mut pairs = 0;
    for (name, _) in presets {
        let p = Presentation::preset(name).unwrap();
        for c in critical_pairs(&p, 3).map_err(|e| e.to_string())? {
            ensure(c.residual.is_zero(), || {
                format!("{name}: critical pair {} leaves {}", c.overlap, c.residual)
            })?;
            pairs += 1;
        }
    }
    let manin = critical_pairs(&Presentation::preset("manin-word").unwrap(), 3)
        .map_err(|e| e.to_string())?;
    ensure(manin.iter().all(|c| c.residual.is_zero()), || {
        "manin-word critical pair nonzero".into()
    })?;
    for i in 0..500 {
        let (name, kinds) = presets[i % presets.len()];
        let p = Presentation::preset(name).unwrap();
        let x = random_expression(&mut rng, kinds, 3);
        let n = normalize(&x, &p).map_err(|err| format!("{name}: {x}: {err}"))?;
        ensure(normalize(&n, &p).unwrap() == n, || {
            format!("{name}: not idempotent on {x}")
        })?;
        ensure(apply_once(&n, &p).unwrap().is_none(), || {
            format!("{name}: {n} still reducible")
        })?;
    }
    Ok(format!(
        "500 random expressions within budget and idempotent; {pairs} critical pairs on the four presets, {} on manin-word, all zero",
        manin.len()
    ))
}

struct Golden {
    check: String,
    config: Config,
    label: String,
    residual: String,
}

fn goldens() -> Vec<Golden> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut paths: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|x| x.unwrap().path())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).unwrap();
            let field = |k: &str| {
                text.lines()
                    .find_map(|l| l.strip_prefix(&format!("{k}: ")))
                    .unwrap()
                    .to_string()
            };
            Golden {
                check: field("check"),
                config: field("config").parse().unwrap(),
                label: field("label"),
                residual: field("residual"),
            }
        })
        .collect()
}

fn proposition_replay() -> Outcome {
    let r = verify_prop_nonmonogenic(Config::default()).map_err(|e| e.to_string())?;
    for label in [
        "ro1 first (j=1,k=2)",
        "ro1 second (j=1,k=2)",
        "ro2 first (j=1,k=2)",
        "ro2 second (j=1,k=2)",
        "ro3, Df as in the proof (j=1,k=2)",
        "ro4, Df as in the proof (j=1,k=2)",
    ] {
        let entry = r.entry(label).ok_or_else(|| format!("missing {label}"))?;
        ensure(entry.residual.is_zero(), || {
            format!("{label}: {}", entry.residual)
        })?;
    }
    let b = verify_prop_bold(Config::default()).map_err(|e| e.to_string())?;
    for label in ["t3 (j=1,k=2)", "t4 (j=1,k=2)"] {
        let entry = b.entry(label).ok_or_else(|| format!("missing {label}"))?;
        ensure(entry.residual.is_zero(), || {
            format!("{label}: {}", entry.residual)
        })?;
    }
    let gs = goldens();
    for g in &gs {
        let reports = run_check(&g.check, g.config, None).map_err(|e| e.to_string())?;
        let entry = reports[0]
            .entry(&g.label)
            .ok_or_else(|| format!("missing {}", g.label))?;
        ensure(entry.residual == e(&g.residual), || {
            format!(
                "{} ({}): got {}, golden {}",
                g.label, g.config, entry.residual, g.residual
            )
        })?;
    }
    Ok(format!(
        "8 zero residuals; {} nonzero residuals equal their goldens",
        gs.len()
    ))
}

fn theorem_replay() -> Outcome {
    let r = verify_theorem_monogenic(&default_theorem_functions().unwrap())
        .map_err(|e| e.to_string())?;
    for label in ["ro3, f = 0", "ro4, f = 0"] {
        let x = &r
            .entry(label)
            .ok_or_else(|| format!("missing {label}"))?
            .residual;
        ensure(x.is_zero(), || format!("{label}: {x}"))?;
    }
    // Df = -1, df[1] = E[1], df[2] = 0, p = -i*hbar*d
    let oracles = [
        ("ro3, f = x1*E[1]", "-hbar^2 * (1 ox d[2])"),
        (
            "ro4, f = x1*E[1]",
            "hbar^2 * (E[1,2] ox d[2]) + hbar^2*q^-1 * (1 ox d[1])",
        ),
    ];
    for (label, oracle) in oracles {
        let x = &r
            .entry(label)
            .ok_or_else(|| format!("missing {label}"))?
            .residual;
        ensure(*x == e(oracle), || {
            format!("{label}: got {x}, expected {oracle}")
        })?;
    }
    Ok("zero at f = 0; the Df terms survive at f = x1 e1".into())
}

fn plane_relations() -> Outcome {
    let rels = derive_plane_relations().map_err(|e| e.to_string())?;
    ensure(rels.len() == 3, || format!("{} relations", rels.len()))?;
    let oracle = [
        "c a - q * (a c)",
        "d b - q * (b d)",
        "c b + q * (d a) - q * (a d) - q^2 * (b c)",
    ];
    for o in oracle {
        let o = e(o);
        ensure(
            rels.iter()
                .any(|r| r.relation == o || r.relation == o.neg()),
            || format!("no relation matches {o}"),
        )?;
    }
    let commuting = Presentation::preset("entries-commute")
        .unwrap()
        .with_param("q = 1")
        .unwrap();
    for r in &rels {
        let n = normalize(&r.relation, &commuting).map_err(|e| e.to_string())?;
        ensure(n.is_zero(), || format!("{} at q = 1 gives {n}", r.relation))?;
    }
    Ok("three relations match the hand expansion and vanish at q = 1".into())
}

fn classical_limit() -> Outcome {
    let cfg = Config {
        qjk: QjkBinding::Symbolic,
        sign: SignConvention::Unified,
    };
    let r = verify_classical_limit(cfg).map_err(|e| e.to_string())?;
    let heis: Vec<_> = r
        .entries
        .iter()
        .filter(|x| x.label.starts_with("qheis2"))
        .collect();
    ensure(!heis.is_empty(), || "no qheis2 entries".into())?;
    for x in &heis {
        ensure(x.residual.is_zero(), || {
            format!("{}: {}", x.label, x.residual)
        })?;
    }
    ensure(r.all_zero(), || "some unified-sign entry is nonzero".into())?;
    Ok(format!(
        "{} qheis2 commutator relations and all {} entries zero",
        heis.len(),
        r.entries.len()
    ))
}

fn cli_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 10);
    let presets: [(&str, &[char]); 4] = [
        ("qplane", &['x']),
        ("dual-plane", &['d']),
        ("qheis2", &['x', 'p']),
        ("qheis-f", &['x', 'p']),
    ];
    for i in 0..1000 {
        let (name, kinds) = presets[i % presets.len()];
        let x = random_expression(&mut rng, kinds, 3);
        let n = normalize(&x, &Presentation::preset(name).unwrap()).unwrap();
        for c in [x, n] {
            let text = c.to_string();
            let back = parse_expression(&text).map_err(|err| format!("{text}: {err}"))?;
            ensure(back == c, || format!("round trip changed {text}"))?;
        }
    }
    let bin = env!("CARGO_BIN_EXE_qheis");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    for args in [
        &["verify", "all", "--json"][..],
        &["critical-pairs", "--preset", "manin-word"][..],
    ] {
        let (a, b) = (run(args), run(args));
        ensure(
            a.stdout == b.stdout && a.status.code() == b.status.code(),
            || format!("{args:?} not deterministic"),
        )?;
    }
    let statuses: [(&[&str], i32); 5] = [
        (&["normalize", "--preset", "qplane", "x[2] ox x[1]"], 0),
        (&["verify", "lemma-f1", "--qjk=q", "--sign=as-printed"], 1),
        (&["normalize", "--preset", "no-such-preset", "x[1]"], 2),
        (&["normalize", "--preset", "qplane", "x["], 3),
        (
            &[
                "normalize",
                "--preset",
                "qplane",
                "--budget",
                "0",
                "x[2] ox x[1]",
            ],
            4,
        ),
    ];
    for (args, code) in statuses {
        let got = run(args).status.code();
        ensure(got == Some(code), || {
            format!("{args:?} exited with {got:?}, expected {code}")
        })?;
    }
    Ok("2000 parse/render round trips, byte-identical reruns, exit statuses 0-4 observed".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Clifford exhaustive suite", clifford_suite),
        ("B_p suite", deformed_suite),
        ("Dirac-squared identity", dirac_squared),
        ("monogenicity", monogenicity),
        ("normalization suite", normalization_suite),
        ("proposition replay", proposition_replay),
        ("theorem replay", theorem_replay),
        ("quantum plane derivation", plane_relations),
        ("classical limit", classical_limit),
        ("CLI round trip", cli_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail} [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {why} [{ms} ms]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
