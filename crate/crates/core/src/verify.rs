//! Replays of the relation-level claims as rewriting identities.
//!
//! Every entry states a claim as `lhs - rhs`, applies the listed
//! substitutions, and normalizes under the listed presentation. The residual
//! is reported as found; no check adjusts signs or coefficients on its own.
//! Sign and `Q[j,k]` choices are explicit [`Config`] values.
//!
//! Off-diagonal claims are instantiated at `j = 1, k = 2`, diagonal ones at
//! `j = k = 1`.

use std::fmt;
use std::str::FromStr;

use crate::calculus::{PolyFunction, Side};
use crate::clifford::Algebra;
use crate::error::{Error, Result};
use crate::parse::{instantiate, Env};
use crate::rewrite::{normalize, Presentation};
use crate::scalars::Scalar;
use crate::terms::{Expression, FunTag, Generator, TermKey, Word};

/// Names accepted by [`run_check`].
pub const CHECKS: &[&str] = &[
    "lemma-f1",
    "prop-nonmonogenic",
    "theorem-monogenic",
    "prop-bold",
    "classical-limit",
];

/// How `Q[j,k]` is specialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QjkBinding {
    /// `Q[j,k] = q`
    Q,
    /// `Q[j,k] = -1` for `j != k`, `0` for `j = k`
    Table,
    /// left as a free parameter
    #[default]
    Symbolic,
}

impl QjkBinding {
    pub fn param(self) -> Option<&'static str> {
        match self {
            QjkBinding::Q => Some("Q[j,k] = q"),
            QjkBinding::Table => Some("Q[j,k] = delta[j,k] - 1"),
            QjkBinding::Symbolic => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QjkBinding::Q => "q",
            QjkBinding::Table => "table",
            QjkBinding::Symbolic => "symbolic",
        }
    }
}

impl FromStr for QjkBinding {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "q" => Ok(QjkBinding::Q),
            "table" => Ok(QjkBinding::Table),
            "symbolic" => Ok(QjkBinding::Symbolic),
            other => Err(format!(
                "unknown Q[j,k] binding `{other}` (expected q, table or symbolic)"
            )),
        }
    }
}

/// Sign of the `i*hbar*delta[j,k]*f` term in the mixed relation with `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// `x[j] ox p[k] - Q[j,k] p[k] ox x[j] = -i*hbar*delta[j,k]*f`
    #[default]
    AsPrinted,
    /// `... = +i*hbar*delta[j,k]*f`, matching the relations without `f`
    Unified,
}

impl SignConvention {
    /// The sign factor in front of `i*hbar*delta[j,k]*f` on the right side.
    fn factor(self) -> &'static str {
        match self {
            SignConvention::AsPrinted => "-1",
            SignConvention::Unified => "1",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignConvention::AsPrinted => "as-printed",
            SignConvention::Unified => "unified",
        }
    }
}

impl FromStr for SignConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "as-printed" => Ok(SignConvention::AsPrinted),
            "unified" => Ok(SignConvention::Unified),
            other => Err(format!(
                "unknown sign convention `{other}` (expected as-printed or unified)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Config {
    pub qjk: QjkBinding,
    pub sign: SignConvention,
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qjk={}, sign={}", self.qjk.name(), self.sign.name())
    }
}

/// Parses the `Display` form, `qjk=<binding>, sign=<convention>`; either
/// part may be omitted.
impl FromStr for Config {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut cfg = Config::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('=').map(|(k, v)| (k.trim(), v.trim())) {
                Some(("qjk", v)) => cfg.qjk = v.parse()?,
                Some(("sign", v)) => cfg.sign = v.parse()?,
                _ => return Err(format!("bad config item `{part}`")),
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Zero,
    Nonzero,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Zero => "zero",
            Verdict::Nonzero => "nonzero",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationEntry {
    pub label: String,
    pub substitutions: Vec<String>,
    pub residual: Expression,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub config: Config,
    pub entries: Vec<RelationEntry>,
}

impl VerificationReport {
    fn new(check: &str, config: Config) -> Self {
        Self {
            check: check.to_string(),
            config,
            entries: Vec::new(),
        }
    }

    pub fn all_zero(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == Verdict::Zero)
    }

    pub fn entry(&self, label: &str) -> Option<&RelationEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    /// Normalize `diff` under `p` and record it.
    fn push(
        &mut self,
        label: &str,
        mut subs: Vec<String>,
        diff: &Expression,
        p: &Presentation,
    ) -> Result<()> {
        let residual = normalize(diff, p)?;
        subs.push(format!("normalized under {}", p.name));
        let verdict = if residual.is_zero() {
            Verdict::Zero
        } else {
            Verdict::Nonzero
        };
        self.entries.push(RelationEntry {
            label: label.to_string(),
            substitutions: subs,
            residual,
            verdict,
        });
        Ok(())
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "check: {} ({})", self.check, self.config)?;
        for e in &self.entries {
            writeln!(f, "  [{}] {}", e.verdict, e.label)?;
            for s in &e.substitutions {
                writeln!(f, "      {s}")?;
            }
            writeln!(f, "      residual: {}", e.residual)?;
        }
        Ok(())
    }
}

fn env(j: u32, k: u32) -> Env {
    Env::new().with_index("j", j).with_index("k", k)
}

fn at(j: u32, k: u32) -> String {
    if j == k {
        format!("j = k = {j}")
    } else {
        format!("j = {j}, k = {k}")
    }
}

fn tag(j: u32, k: u32) -> String {
    if j == k {
        format!("(j=k={j})")
    } else {
        format!("(j={j},k={k})")
    }
}

fn ex(template: &str, e: &Env) -> Result<Expression> {
    instantiate(template, e)
}

fn with_qjk(p: Presentation, cfg: Config) -> Result<Presentation> {
    match cfg.qjk.param() {
        Some(b) => p.with_param(b),
        None => Ok(p),
    }
}

fn qjk_note(cfg: Config) -> Vec<String> {
    cfg.qjk
        .param()
        .map(|b| vec![b.to_string()])
        .unwrap_or_default()
}

/// The relations with `f`, with the mixed relation's function symbol and the
/// momentum-momentum coefficient made explicit.
fn qheis_f_variant(
    cfg: Config,
    f_symbol: &str,
    pp_coeff: &str,
    name: &str,
) -> Result<Presentation> {
    let s = cfg.sign.factor();
    let text = format!(
        "x[k] ox x[j] | j<k -> q * (x[j] ox x[k])\n\
         x[j] ox p[k] -> Q[j,k] * (p[k] ox x[j]) + ({s})*i*hbar*delta[j,k]*({f_symbol} ox 1)\n\
         p[k] ox p[j] | j<k -> {pp_coeff} * (p[j] ox p[k]) + {pp_coeff}*i*hbar * (df[j] ox p[k]) - i*hbar * (df[k] ox p[j])\n"
    );
    with_qjk(Presentation::parse(name, &text)?, cfg)
}

/// Replace `f` by 1 and its derivatives by 0.
fn set_f_one(e: &Expression) -> Result<Expression> {
    e.substitute_generators(&|g| match g {
        Generator::Fun(FunTag::F) => Some(Expression::one()),
        Generator::Fun(FunTag::Df(_)) => Some(Expression::zero()),
        _ => None,
    })
}

fn set_p_to_partial(e: &Expression) -> Result<Expression> {
    e.substitute_generators(&|g| match g {
        Generator::Momentum(j) => {
            Some(Expression::word(vec![Generator::Partial(*j)]).scale(&(-Scalar::i_hbar())))
        }
        _ => None,
    })
}

/// Setting `f = 1` in the relations with `f` against the relations without.
pub fn verify_lemma_f1(cfg: Config) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("lemma-f1", cfg);
    let heis = with_qjk(Presentation::preset("qheis2")?, cfg)?;
    let s = cfg.sign.factor();
    let mixed_f =
        format!("x[j] ox p[k] - Q[j,k] * (p[k] ox x[j]) - ({s})*i*hbar*delta[j,k]*(f ox 1)");
    let r2_f =
        "p[j] ox p[k] - q^-1 * (p[k] ox p[j]) + i*hbar * (df[j] ox p[k] - q^-1 * (df[k] ox p[j]))";
    let cases: [(&str, &str, &str, u32, u32); 4] = [
        (
            "R1",
            "x[j] ox x[k] - q^-1 * (x[k] ox x[j])",
            "x[j] ox x[k] - q^-1 * (x[k] ox x[j])",
            1,
            2,
        ),
        ("R2", r2_f, "p[j] ox p[k] - q^-1 * (p[k] ox p[j])", 1, 2),
        (
            "mixed",
            &mixed_f,
            "x[j] ox p[k] - q * (p[k] ox x[j]) - i*hbar*delta[j,k]",
            1,
            2,
        ),
        (
            "mixed",
            &mixed_f,
            "x[j] ox p[k] - q * (p[k] ox x[j]) - i*hbar*delta[j,k]",
            1,
            1,
        ),
    ];
    for (name, with_f, without_f, j, k) in cases {
        let e = env(j, k);
        let diff = set_f_one(&ex(with_f, &e)?)?.sub(&ex(without_f, &e)?);
        let mut subs = vec![
            "f := 1".to_string(),
            "df[j] := 0, df[k] := 0".to_string(),
            at(j, k),
        ];
        subs.extend(qjk_note(cfg));
        subs.push(format!("minus `{without_f}`"));
        report.push(&format!("{name}, f=1 {}", tag(j, k)), subs, &diff, &heis)?;
    }
    let e = env(1, 2);
    let r1 = ex("x[j] ox x[k] - q^-1 * (x[k] ox x[j])", &e)?;
    report.push(
        "proof: R1 gives the quantum plane (j=1,k=2)",
        vec![at(1, 2)],
        &r1,
        &Presentation::preset("qplane")?,
    )?;
    let r2 = set_p_to_partial(&set_f_one(&ex(r2_f, &e)?)?)?;
    report.push(
        "proof: R2 with p := -i*hbar*d gives the dual plane (j=1,k=2)",
        vec![
            "f := 1".into(),
            "df[j] := 0, df[k] := 0".into(),
            "p[i] := -i*hbar*d[i]".into(),
            at(1, 2),
        ],
        &r2,
        &Presentation::preset("dual-plane")?,
    )?;
    Ok(report)
}

/// The relations for a Clifford-valued `f = f[j] E[j] + f[k] E[k]`, with the
/// substitutions the derivation uses.
pub fn verify_prop_nonmonogenic(cfg: Config) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("prop-nonmonogenic", cfg);
    let p = qheis_f_variant(cfg, "f[j]", "q", "qheis-f (mixed relation with f := f[j])")?;
    let s = cfg.sign.factor();
    struct Case {
        label: &'static str,
        claim: String,
        vars: Vec<(&'static str, &'static str)>,
        at: Vec<(u32, u32)>,
    }
    let ro3 = "$P ox p[k] - q^-1 * (p[k] ox $P) + i*hbar * ($Df ox p[k] - q^-1 * (df[k] ox $P))";
    let ro4 = "p[j] ox $P - q^-1 * ($P ox p[j]) + i*hbar * (df[j] ox $P - q^-1 * ($Df ox p[j]))";
    let full_df = "E[j] df[j] + E[k] df[k]";
    let cases = vec![
        Case {
            label: "ro1 first",
            claim: "$X ox x[k] - q^-1 * (x[k] ox $X)".into(),
            vars: vec![("X", "E[j] x[j]")],
            at: vec![(1, 2)],
        },
        Case {
            label: "ro1 second",
            claim: "x[j] ox $X - q^-1 * ($X ox x[j])".into(),
            vars: vec![("X", "x[k] E[k]")],
            at: vec![(1, 2)],
        },
        Case {
            label: "ro2 first",
            claim: format!("$X ox p[k] - Q[j,k] * (p[k] ox $X) - ({s})*i*hbar*delta[j,k]*(f ox 1)"),
            vars: vec![("X", "E[j] x[j]")],
            at: vec![(1, 2), (1, 1)],
        },
        Case {
            label: "ro2 second",
            claim: format!("x[j] ox $P - Q[j,k] * ($P ox x[j]) - ({s})*i*hbar*delta[j,k]"),
            vars: vec![("P", "p[k] E[k]")],
            at: vec![(1, 2), (1, 1)],
        },
        Case {
            label: "ro3, Df as in the proof",
            claim: ro3.into(),
            vars: vec![("P", "E[j] p[j]"), ("Df", "E[j] df[j]")],
            at: vec![(1, 2)],
        },
        Case {
            label: "ro3, Df as the full sum",
            claim: ro3.into(),
            vars: vec![("P", "E[j] p[j]"), ("Df", full_df)],
            at: vec![(1, 2)],
        },
        Case {
            label: "ro4, Df as in the proof",
            claim: ro4.into(),
            vars: vec![("P", "p[k] E[k]"), ("Df", "E[k] df[k]")],
            at: vec![(1, 2)],
        },
        Case {
            label: "ro4, Df as the full sum",
            claim: ro4.into(),
            vars: vec![("P", "p[k] E[k]"), ("Df", full_df)],
            at: vec![(1, 2)],
        },
    ];
    for case in cases {
        for &(j, k) in &case.at {
            let mut e = env(j, k);
            let mut subs = Vec::new();
            for (name, value) in &case.vars {
                let shown = match *name {
                    "X" => "x",
                    "P" => "p",
                    other => other,
                };
                subs.push(format!("{shown} := {value}"));
                e = e.with_var(name, ex(value, &env(j, k))?);
            }
            subs.push(at(j, k));
            subs.extend(qjk_note(cfg));
            let diff = ex(&case.claim, &e)?;
            report.push(&format!("{} {}", case.label, tag(j, k)), subs, &diff, &p)?;
        }
    }
    Ok(report)
}

/// The test functions used when none is given: `0` and `x1*E[1]`.
pub fn default_theorem_functions() -> Result<Vec<PolyFunction>> {
    Ok(vec![
        PolyFunction::zero(Algebra::clifford(2)),
        PolyFunction::parse("x1*E[1]", Some(2))?,
    ])
}

/// The momentum relations for `f` with `p := -i*hbar*d`, modulo the dual
/// plane. Exactly zero when `f = 0`.
pub fn verify_theorem_monogenic(functions: &[PolyFunction]) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("theorem-monogenic", Config::default());
    let p = Presentation::preset("dual-plane")?;
    let ro3 = "$P ox $pk - q^-1 * ($pk ox $P) + i*hbar * ($Df ox $pk - q^-1 * ($dfk ox $P))";
    let ro4 = "$pj ox $P - q^-1 * ($P ox $pj) + i*hbar * ($dfj ox $P - q^-1 * ($Df ox $pj))";
    let e0 = env(1, 2);
    for f in functions {
        if f.dim() < 2 {
            return Err(Error::IndexOutOfRange(format!(
                "the test function needs dimension >= 2, got {}",
                f.dim()
            )));
        }
        let df = f.dirac(Side::Left)?;
        let dfj = f.partial(1)?;
        let dfk = f.partial(2)?;
        let base = e0
            .clone()
            .with_var("Df", df.to_expression()?)
            .with_var("dfj", dfj.to_expression()?)
            .with_var("dfk", dfk.to_expression()?)
            .with_var("pj", ex("-i*hbar*d[j]", &e0)?)
            .with_var("pk", ex("-i*hbar*d[k]", &e0)?);
        let shown = if f.is_zero() {
            "0".to_string()
        } else {
            f.to_string()
        };
        let common = vec![
            format!("f := {shown}"),
            format!("Df := {}", show_poly(&df)),
            format!("df[j] := {}, df[k] := {}", show_poly(&dfj), show_poly(&dfk)),
            "p[i] := -i*hbar*d[i]".to_string(),
        ];
        for (label, claim, p_hat) in [("ro3", ro3, "E[j] d[j]"), ("ro4", ro4, "E[k] d[k]")] {
            let e = base
                .clone()
                .with_var("P", ex(&format!("-i*hbar*{p_hat}"), &e0)?);
            let mut subs = common.clone();
            subs.push(format!("p := -i*hbar*{p_hat}"));
            subs.push(at(1, 2));
            report.push(&format!("{label}, f = {shown}"), subs, &ex(claim, &e)?, &p)?;
        }
    }
    Ok(report)
}

fn show_poly(f: &PolyFunction) -> String {
    if f.is_zero() {
        "0".to_string()
    } else {
        f.to_string()
    }
}

/// The relations for `x := x[j] be[k] + x[k] be[j]`, `p := p[j] be[k] + p[k] be[j]`,
/// `f := f[j] be[k] + f[k] be[j]` over `B_p`.
pub fn verify_prop_bold(cfg: Config) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("prop-bold", cfg);
    let p = qheis_f_variant(
        cfg,
        "f[j]",
        "Q[j,k]",
        "qheis-f (mixed relation with f := f[j], Q[j,k] in place of q in the pp relation)",
    )?;
    let s = cfg.sign.factor();
    let vars = |e: &Env| -> Result<Env> {
        Ok(e.clone()
            .with_var("X", ex("x[j] be[k] + x[k] be[j]", e)?)
            .with_var("Pb", ex("p[j] be[k] + p[k] be[j]", e)?)
            .with_var("F", ex("f[j] be[k] + f[k] be[j]", e)?))
    };
    let t1a = format!("$X ox p[k] - Q[j,k] * (p[k] ox $X) - ({s})*i*hbar*delta[j,k]*($F ox 1)");
    let t2a = format!("x[j] ox $Pb - Q[j,k] * ($Pb ox x[j]) - ({s})*i*hbar*delta[j,k]*($F ox 1)");
    let aux1 = format!("-(be[j] x[k] ox p[k]) + Q[j,k] * (p[k] ox be[j] x[k]) + ({s})*i*hbar*DELTA(be[j] f[k] ox 1)");
    let aux2 = format!("-(x[j] ox p[j] be[k]) + Q[j,k] * (p[j] be[k] ox x[j]) + ({s})*i*hbar*DELTA(be[k] f[j] ox 1)");
    let xsub = "x := x[j] be[k] + x[k] be[j]";
    let psub = "p := p[j] be[k] + p[k] be[j]";
    let fsub = "f := f[j] be[k] + f[k] be[j]";
    for (name, claim, aux, sub) in [("t1a", &t1a, &aux1, xsub), ("t2a", &t2a, &aux2, psub)] {
        let stated = aux.replace("DELTA", "");
        let applied = aux.replace("DELTA", "delta[j,k]*");
        let e = vars(&env(1, 2))?;
        let base = ex(claim, &e)?;
        let mut subs = vec![sub.to_string(), fsub.to_string(), at(1, 2)];
        subs.extend(qjk_note(cfg));
        report.push(
            &format!("{name} without auxiliary identity (j=1,k=2)"),
            subs.clone(),
            &base,
            &p,
        )?;
        for (how, aux_text) in [("as stated", &stated), ("as applied", &applied)] {
            let mut s2 = subs.clone();
            s2.push(format!("plus `{aux_text} = 0`"));
            let diff = base.add(&ex(aux_text, &e)?);
            report.push(
                &format!("{name} with auxiliary identity {how} (j=1,k=2)"),
                s2,
                &diff,
                &p,
            )?;
        }
        let e = vars(&env(1, 1))?;
        let mut subs = vec![sub.to_string(), fsub.to_string(), at(1, 1)];
        subs.extend(qjk_note(cfg));
        report.push(&format!("{name} (j=k=1)"), subs, &ex(claim, &e)?, &p)?;
    }
    let t3 = "be[k] p[j] ox p[k] - Q[j,k]^-1 * (p[k] ox be[k] p[j]) + i*hbar * (be[k] df[j] ox p[k] - Q[j,k]^-1 * (be[k] df[k] ox p[j]))";
    let t4 = "p[j] ox be[j] p[k] - Q[j,k]^-1 * (be[j] p[k] ox p[j]) + i*hbar * (be[j] df[j] ox p[k] - Q[j,k]^-1 * (be[j] df[k] ox p[j]))";
    for (name, claim) in [("t3", t3), ("t4", t4)] {
        let mut subs = vec![at(1, 2)];
        subs.extend(qjk_note(cfg));
        report.push(
            &format!("{name} (j=1,k=2)"),
            subs,
            &ex(claim, &env(1, 2))?,
            &p,
        )?;
    }
    Ok(report)
}

/// Commutator forms checked against the relations at `q = 1`.
pub fn verify_classical_limit(cfg: Config) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("classical-limit", cfg);
    let xx = "x[j] ox x[k] - x[k] ox x[j]";
    let xp = "x[j] ox p[k] - p[k] ox x[j] - i*hbar*delta[j,k]*(f ox 1)";
    let pp = "p[j] ox p[k] - p[k] ox p[j] + i*hbar * (df[j] ox p[k] - df[k] ox p[j])";
    let pairs = [(1, 2), (2, 1)];
    let all = [(1, 2), (2, 1), (1, 1)];
    let heis = Presentation::preset("qheis2")?.with_param("q = 1")?;
    for (name, claim, at_list) in [
        ("[x,x]", xx, &pairs[..]),
        ("[x,p]", xp, &all[..]),
        ("[p,p]", pp, &pairs[..]),
    ] {
        for &(j, k) in at_list {
            let diff = set_f_one(&ex(claim, &env(j, k))?)?;
            let subs = vec!["f := 1, df := 0".into(), at(j, k), "q := 1".into()];
            report.push(&format!("qheis2 {name} {}", tag(j, k)), subs, &diff, &heis)?;
        }
    }
    let with_f = qheis_f_variant(
        Config {
            qjk: QjkBinding::Symbolic,
            ..cfg
        },
        "f",
        "q",
        "qheis-f",
    )?
    .with_param("q = 1")?
    .with_param("Q[j,k] = 1")?;
    for (name, claim, at_list) in [
        ("[x,x]", xx, &pairs[..]),
        ("[x,p]", xp, &all[..]),
        ("[p,p]", pp, &pairs[..]),
    ] {
        for &(j, k) in at_list {
            let diff = ex(claim, &env(j, k))?;
            let subs = vec![at(j, k), "q := 1, Q[j,k] := 1".into()];
            report.push(
                &format!("qheis-f {name} {}", tag(j, k)),
                subs,
                &diff,
                &with_f,
            )?;
        }
    }
    let classical = Presentation::preset("classical")?;
    let words = [
        ("[x,x]", "x[j] x[k] - x[k] x[j]", &pairs[..]),
        (
            "[x,p]",
            "x[j] p[k] - p[k] x[j] - i*hbar*delta[j,k]*f",
            &all[..],
        ),
        (
            "[p,p]",
            "p[j] p[k] - p[k] p[j] + i*hbar * (df[j] p[k] - df[k] p[j])",
            &pairs[..],
        ),
    ];
    for (name, claim, at_list) in words {
        for &(j, k) in at_list {
            let diff = ex(claim, &env(j, k))?;
            report.push(
                &format!("classical {name} {}", tag(j, k)),
                vec![at(j, k)],
                &diff,
                &classical,
            )?;
        }
    }
    Ok(report)
}

/// Run a named check (`all` runs every check).
pub fn run_check(
    name: &str,
    cfg: Config,
    functions: Option<&[PolyFunction]>,
) -> Result<Vec<VerificationReport>> {
    let theorem = |fs: Option<&[PolyFunction]>| -> Result<VerificationReport> {
        match fs {
            Some(fs) => verify_theorem_monogenic(fs),
            None => verify_theorem_monogenic(&default_theorem_functions()?),
        }
    };
    Ok(match name {
        "lemma-f1" => vec![verify_lemma_f1(cfg)?],
        "prop-nonmonogenic" => vec![verify_prop_nonmonogenic(cfg)?],
        "theorem-monogenic" => vec![theorem(functions)?],
        "prop-bold" => vec![verify_prop_bold(cfg)?],
        "classical-limit" => vec![verify_classical_limit(cfg)?],
        "all" => vec![
            verify_lemma_f1(cfg)?,
            verify_prop_nonmonogenic(cfg)?,
            theorem(functions)?,
            verify_prop_bold(cfg)?,
            verify_classical_limit(cfg)?,
        ],
        other => return Err(Error::UnknownPreset(format!("check `{other}`"))),
    })
}

/// `a d - q c b` in the word algebra.
pub fn quantum_det(
    a: &Expression,
    b: &Expression,
    c: &Expression,
    d: &Expression,
) -> Result<Expression> {
    for (name, e) in [("a", a), ("b", b), ("c", c), ("d", d)] {
        if e.degree() != 1 {
            return Err(Error::TensorDegree(format!(
                "matrix entry {name} must have tensor degree one"
            )));
        }
    }
    Ok(a.mul(d)?.sub(&c.mul(b)?.scale(&Scalar::q())))
}

/// `a d - q c b` for the generic entry symbols.
pub fn quantum_det_generic() -> Result<Expression> {
    let g = |e| Expression::word(vec![Generator::Entry(e)]);
    use crate::terms::Entry::*;
    quantum_det(&g(A), &g(B), &g(C), &g(D))
}

/// A relation among matrix entries, labelled by the basis tensor it
/// multiplies.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneRelation {
    pub basis: Expression,
    pub relation: Expression,
}

/// Relations on `a, b, c, d` forced by preserving the quantum plane under
/// `x[1] -> a x[1] + b x[2]`, `x[2] -> c x[1] + d x[2]`.
pub fn derive_plane_relations() -> Result<Vec<PlaneRelation>> {
    let xj = instantiate("a x[1] + b x[2]", &Env::new())?;
    let xk = instantiate("c x[1] + d x[2]", &Env::new())?;
    let constraint = xk.tensor(&xj)?.sub(&xj.tensor(&xk)?.scale(&Scalar::q()));
    let qplane = Presentation::preset("qplane")?;
    let split = |w: &Word| -> (Vec<Generator>, Vec<Generator>) {
        w.factors()
            .iter()
            .partition(|g| matches!(g, Generator::Entry(_)))
    };
    let mut by_basis: Vec<(TermKey, Expression)> = Vec::new();
    for (key, c) in constraint.iter() {
        let (e1, x1) = split(&key.slot1);
        let (e2, x2) = split(key.slot2.as_ref().expect("constraint has degree two"));
        let mut entries = e1;
        entries.extend(e2);
        let coeff = Expression::word(entries).scale(c);
        let coords = Expression::from_term(
            TermKey::new(key.prefix, Word::new(x1), Some(Word::new(x2))),
            Scalar::one(),
        );
        for (basis, s) in normalize(&coords, &qplane)?.iter() {
            let add = coeff.scale(s);
            match by_basis.iter_mut().find(|(b, _)| b == basis) {
                Some((_, rel)) => *rel = rel.add(&add),
                None => by_basis.push((basis.clone(), add)),
            }
        }
    }
    by_basis.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(by_basis
        .into_iter()
        .map(|(b, relation)| PlaneRelation {
            basis: Expression::from_term(b, Scalar::one()),
            relation,
        })
        .collect())
}
