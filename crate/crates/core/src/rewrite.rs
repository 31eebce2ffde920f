//! Directed rewriting of expressions under relation presets.
//!
//! A rule rewrites an adjacent generator pair, either inside one word
//! (`x[k] x[j]`) or across the tensor sign (`x[k] ox x[j]`, the last factor
//! of the first slot next to the first factor of the second). Rules are
//! written as templates over index variables and instantiated on match.
//!
//! Rule file format, one item per line (`#` starts a comment):
//!
//! ```text
//! x[k] ox x[j] | j<k -> q * (x[j] ox x[k])
//! param Q[j,k] = q
//! ```
//!
//! Termination is certified by a reduction order: the number of active
//! generators (coordinates, momenta, partials, matrix entries), then the
//! number of inversions against a fixed precedence (`x[j]` before `x[k]` and
//! `p[j]` before `p[k]` for `j<k`, `d[k]` before `d[j]` for `j<k`, momenta
//! before coordinates, `a b c d` in that order). Every instantiated rule
//! must strictly decrease it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::parse::{eval, parse_raw_at, Env, GenKind, GenTemplate, Idx, Mode, Raw};
use crate::scalars::{Param, Scalar};
use crate::terms::{Expression, Generator, TermKey, Word};

/// Default cap on rule applications per normalization.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Largest index used when checking rules and enumerating overlaps.
pub const MAX_PROBE_INDEX: u32 = 4;

/// Preset catalog: name and rule-file source.
pub const PRESETS: &[(&str, &str)] = &[
    ("manin-word", include_str!("../presets/manin-word.rules")),
    ("qplane", include_str!("../presets/qplane.rules")),
    ("dual-plane", include_str!("../presets/dual-plane.rules")),
    ("qheis2", include_str!("../presets/qheis2.rules")),
    ("qheis-f", include_str!("../presets/qheis-f.rules")),
    ("classical", include_str!("../presets/classical.rules")),
    (
        "entries-commute",
        include_str!("../presets/entries-commute.rules"),
    ),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Adjacent factors of one word.
    Within,
    /// Last factor of the first slot and first factor of the second.
    Cross,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Any,
    Lt(String, String),
    Gt(String, String),
    Eq(String, String),
    Ne(String, String),
}

impl Condition {
    fn parse(text: &str, line: usize, col: usize) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() || t == "any" {
            return Ok(Condition::Any);
        }
        for (op, build) in [
            ("!=", Condition::Ne as fn(String, String) -> Condition),
            ("<", Condition::Lt),
            (">", Condition::Gt),
            ("=", Condition::Eq),
        ] {
            if let Some((a, b)) = t.split_once(op) {
                let ok = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphabetic());
                if ok(a) && ok(b) {
                    return Ok(build(a.to_string(), b.to_string()));
                }
            }
        }
        Err(Error::Syntax(crate::error::SyntaxError {
            line,
            column: col,
            token: text.trim().to_string(),
            message: "expected a condition such as `j<k`, `j!=k` or `any`".into(),
        }))
    }

    fn holds(&self, env: &Env) -> Result<bool> {
        let get = |a: &str, b: &str| -> Result<(u32, u32)> { Ok((env.index(a)?, env.index(b)?)) };
        Ok(match self {
            Condition::Any => true,
            Condition::Lt(a, b) => {
                let (x, y) = get(a, b)?;
                x < y
            }
            Condition::Gt(a, b) => {
                let (x, y) = get(a, b)?;
                x > y
            }
            Condition::Eq(a, b) => {
                let (x, y) = get(a, b)?;
                x == y
            }
            Condition::Ne(a, b) => {
                let (x, y) = get(a, b)?;
                x != y
            }
        })
    }

    fn variables(&self) -> Vec<&str> {
        match self {
            Condition::Any => vec![],
            Condition::Lt(a, b)
            | Condition::Gt(a, b)
            | Condition::Eq(a, b)
            | Condition::Ne(a, b) => {
                vec![a, b]
            }
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Any => f.write_str("any"),
            Condition::Lt(a, b) => write!(f, "{a}<{b}"),
            Condition::Gt(a, b) => write!(f, "{a}>{b}"),
            Condition::Eq(a, b) => write!(f, "{a}={b}"),
            Condition::Ne(a, b) => write!(f, "{a}!={b}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RewriteRule {
    text: String,
    pub left: GenTemplate,
    pub right: GenTemplate,
    pub placement: Placement,
    pub condition: Condition,
    rhs: Raw,
}

fn bind_template(t: &GenTemplate, g: &Generator, env: &mut Env) -> bool {
    let (kind, index) = GenKind::of(g);
    if kind != t.kind {
        return false;
    }
    match (&t.index, index) {
        (None, None) => true,
        (Some(Idx::Lit(n)), Some(j)) => *n == j,
        (Some(Idx::Var(v)), Some(j)) => match env.indices().get(v) {
            Some(&bound) => bound == j,
            None => {
                env.set_index(v, j);
                true
            }
        },
        _ => false,
    }
}

impl RewriteRule {
    /// Parse one rule line (`line` is used for error positions).
    pub fn parse(text: &str, line: usize) -> Result<Self> {
        let arrow = text.find("->").ok_or_else(|| {
            Error::Syntax(crate::error::SyntaxError {
                line,
                column: text.chars().count().max(1),
                token: text.trim().to_string(),
                message: "expected `->` in rule".into(),
            })
        })?;
        let col_of = |byte: usize| text[..byte].chars().count() + 1;
        let (head, rhs_text) = (&text[..arrow], &text[arrow + 2..]);
        let (lhs_text, cond_text, cond_col) = match head.find('|') {
            Some(bar) => (&head[..bar], &head[bar + 1..], col_of(bar + 1)),
            None => (head, "", 1),
        };
        let lhs = parse_raw_at(lhs_text, Mode::Template, line, 1)?;
        let condition = Condition::parse(cond_text, line, cond_col)?;
        let rhs = parse_raw_at(rhs_text, Mode::Template, line, col_of(arrow + 2))?;
        let as_gen = |r: &Raw| match r {
            Raw::Gen(g) => Some(g.clone()),
            _ => None,
        };
        let (left, right, placement) = match &lhs {
            Raw::Prod(fs) if fs.len() == 2 => match (as_gen(&fs[0]), as_gen(&fs[1])) {
                (Some(a), Some(b)) => (a, b, Placement::Within),
                _ => {
                    return Err(Error::InvalidRule(format!(
                        "left side must be two generators: `{}`",
                        lhs_text.trim()
                    )))
                }
            },
            Raw::Tensor(a, b) => match (as_gen(a), as_gen(b)) {
                (Some(a), Some(b)) => (a, b, Placement::Cross),
                _ => {
                    return Err(Error::InvalidRule(format!(
                        "left side must be two generators: `{}`",
                        lhs_text.trim()
                    )))
                }
            },
            _ => {
                return Err(Error::InvalidRule(format!(
                    "left side must be `g h` or `g ox h`: `{}`",
                    lhs_text.trim()
                )))
            }
        };
        let rule = RewriteRule {
            text: text.trim().to_string(),
            left,
            right,
            placement,
            condition,
            rhs,
        };
        let vars = rule.variables();
        for v in rule.condition.variables() {
            if !vars.iter().any(|x| x == v) {
                return Err(Error::InvalidRule(format!(
                    "condition variable `{v}` does not occur on the left side of `{}`",
                    rule.text
                )));
            }
        }
        Ok(rule)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Index variables of the left side, in order of appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for t in [&self.left, &self.right] {
            if let Some(Idx::Var(v)) = &t.index {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    /// Index bindings if the rule's left side matches `a` then `b`.
    pub fn match_pair(&self, a: &Generator, b: &Generator) -> Option<Env> {
        let mut env = Env::new();
        if !bind_template(&self.left, a, &mut env) || !bind_template(&self.right, b, &mut env) {
            return None;
        }
        match self.condition.holds(&env) {
            Ok(true) => Some(env),
            _ => None,
        }
    }

    /// Instantiate the right side without parameter bindings.
    pub fn instantiate(&self, env: &Env) -> Result<Expression> {
        eval(&self.rhs, env)
    }

    /// All index assignments over `1..=n` that satisfy the condition.
    fn assignments(&self, n: u32) -> Vec<Env> {
        let vars = self.variables();
        let mut out = Vec::new();
        let total = (n as usize).pow(vars.len() as u32);
        for code in 0..total {
            let mut env = Env::new();
            let mut c = code;
            for v in &vars {
                env.set_index(v, (c % n as usize) as u32 + 1);
                c /= n as usize;
            }
            if self.condition.holds(&env).unwrap_or(false) {
                out.push(env);
            }
        }
        out
    }

    fn lhs_generators(&self, env: &Env) -> Result<(Generator, Generator)> {
        let build = |t: &GenTemplate| -> Result<Generator> {
            let j = t.index.as_ref().map(|i| i.resolve(env)).transpose()?;
            Ok(t.kind.build(j))
        };
        Ok((build(&self.left)?, build(&self.right)?))
    }

    fn lhs_key(&self, env: &Env) -> Result<TermKey> {
        let (a, b) = self.lhs_generators(env)?;
        Ok(match self.placement {
            Placement::Within => {
                TermKey::new(crate::clifford::Blade::unit(), Word::new(vec![a, b]), None)
            }
            Placement::Cross => TermKey::new(
                crate::clifford::Blade::unit(),
                Word::new(vec![a]),
                Some(Word::new(vec![b])),
            ),
        })
    }

    /// Check right-side shape and the reduction order for every instance.
    fn validate(&self) -> Result<()> {
        for env in self.assignments(MAX_PROBE_INDEX) {
            let lhs = self.lhs_key(&env)?;
            let rhs = self.instantiate(&env)?;
            for (k, _) in rhs.iter() {
                let shape_ok = match self.placement {
                    Placement::Within => k.slot2.is_none(),
                    Placement::Cross => k.slot2.is_some() || k.is_scalar_like(),
                };
                if !shape_ok {
                    return Err(Error::InvalidRule(format!(
                        "right side term `{}` of `{}` does not fit a {} rule",
                        Expression::from_term(k.clone(), Scalar::one()),
                        self.text,
                        match self.placement {
                            Placement::Within => "within-word",
                            Placement::Cross => "cross-slot",
                        }
                    )));
                }
                if !decreases(&lhs.sequence(), &k.sequence()) {
                    return Err(Error::InvalidRule(format!(
                        "`{}` does not decrease the reduction order at {}: `{}` -> `{}`",
                        self.text,
                        describe_env(&env),
                        Expression::from_term(lhs.clone(), Scalar::one()),
                        Expression::from_term(k.clone(), Scalar::one()),
                    )));
                }
            }
        }
        Ok(())
    }
}

fn describe_env(env: &Env) -> String {
    let parts: Vec<String> = env
        .indices()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    if parts.is_empty() {
        "the only instance".to_string()
    } else {
        parts.join(", ")
    }
}

fn is_active(g: &Generator) -> bool {
    !matches!(g, Generator::Fun(_))
}

/// `a` comes strictly before `b` in normal forms.
fn precedes(a: &Generator, b: &Generator) -> bool {
    use Generator::*;
    match (a, b) {
        (Coordinate(i), Coordinate(j)) | (Momentum(i), Momentum(j)) => i < j,
        (Partial(i), Partial(j)) => i > j,
        (Momentum(_), Coordinate(_)) => true,
        (Entry(x), Entry(y)) => x < y,
        _ => false,
    }
}

fn inversions(seq: &[Generator]) -> usize {
    let mut n = 0;
    for (i, a) in seq.iter().enumerate() {
        for b in &seq[i + 1..] {
            if precedes(b, a) {
                n += 1;
            }
        }
    }
    n
}

fn decreases(lhs: &[Generator], rhs: &[Generator]) -> bool {
    let active = |s: &[Generator]| {
        let mut v: Vec<Generator> = s.iter().copied().filter(is_active).collect();
        v.sort();
        v
    };
    let (l, r) = (active(lhs), active(rhs));
    if r.len() != l.len() {
        return r.len() < l.len();
    }
    l == r && inversions(rhs) < inversions(lhs)
}

#[derive(Debug, Clone)]
enum BindTarget {
    Q,
    Hbar,
    Qjk(Idx, Idx),
}

/// A parameter specialization such as `Q[j,k] = q` or `q = 1`.
#[derive(Debug, Clone)]
pub struct ParamBinding {
    text: String,
    target: BindTarget,
    value: Raw,
}

impl ParamBinding {
    pub fn parse(text: &str, line: usize) -> Result<Self> {
        let (lhs, rhs) = text.split_once('=').ok_or_else(|| {
            Error::Syntax(crate::error::SyntaxError {
                line,
                column: 1,
                token: text.trim().to_string(),
                message: "expected `param NAME = VALUE`".into(),
            })
        })?;
        let target = match parse_raw_at(lhs, Mode::Template, line, 1)? {
            Raw::Q => BindTarget::Q,
            Raw::Hbar => BindTarget::Hbar,
            Raw::Qjk(a, b) => BindTarget::Qjk(a, b),
            _ => {
                return Err(Error::InvalidRule(format!(
                    "only `q`, `hbar` and `Q[j,k]` can be bound: `{}`",
                    lhs.trim()
                )))
            }
        };
        let col = lhs.chars().count() + 2;
        let value = parse_raw_at(rhs, Mode::Template, line, col)?;
        let b = ParamBinding {
            text: text.trim().to_string(),
            target,
            value,
        };
        for (j, k) in [(1, 1), (1, 2), (2, 1)] {
            if let Some(env) = b.matches(Param::qjk(j, k)).or_else(|| b.matches(Param::Q)) {
                let v = eval(&b.value, &env)?;
                if v.as_scalar().is_none() {
                    return Err(Error::InvalidRule(format!(
                        "binding `{}` is not a scalar",
                        b.text
                    )));
                }
            }
        }
        Ok(b)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    fn matches(&self, p: Param) -> Option<Env> {
        match (&self.target, p) {
            (BindTarget::Q, Param::Q) | (BindTarget::Hbar, Param::Hbar) => Some(Env::new()),
            (BindTarget::Qjk(a, b), Param::Qjk(j, k)) => {
                let mut env = Env::new();
                for (slot, val) in [(a, j), (b, k)] {
                    match slot {
                        Idx::Lit(n) if *n != val => return None,
                        Idx::Lit(_) => {}
                        Idx::Var(v) => match env.indices().get(v) {
                            Some(&bound) if bound != val => return None,
                            Some(_) => {}
                            None => env.set_index(v, val),
                        },
                    }
                }
                Some(env)
            }
            _ => None,
        }
    }

    fn value(&self, p: Param) -> Option<Scalar> {
        let env = self.matches(p)?;
        eval(&self.value, &env).ok()?.as_scalar()
    }
}

/// An ordered rule list with parameter bindings.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub name: String,
    rules: Vec<RewriteRule>,
    bindings: Vec<ParamBinding>,
    budget: usize,
}

impl Presentation {
    /// Build and check the termination witness of every rule.
    pub fn new(name: &str, rules: Vec<RewriteRule>, bindings: Vec<ParamBinding>) -> Result<Self> {
        for r in &rules {
            r.validate()?;
        }
        Ok(Self::new_unchecked(name, rules, bindings))
    }

    /// Build without checking termination; normalization still stops at the
    /// budget.
    pub fn new_unchecked(name: &str, rules: Vec<RewriteRule>, bindings: Vec<ParamBinding>) -> Self {
        Self {
            name: name.to_string(),
            rules,
            bindings,
            budget: DEFAULT_BUDGET,
        }
    }

    fn parse_items(text: &str) -> Result<(Vec<RewriteRule>, Vec<ParamBinding>)> {
        let mut rules = Vec::new();
        let mut bindings = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            match line.trim_start().strip_prefix("param ") {
                Some(rest) => bindings.push(ParamBinding::parse(rest, n + 1)?),
                None => rules.push(RewriteRule::parse(line, n + 1)?),
            }
        }
        Ok((rules, bindings))
    }

    /// Parse rule-file text.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let (rules, bindings) = Self::parse_items(text)?;
        Self::new(name, rules, bindings)
    }

    pub fn parse_unchecked(name: &str, text: &str) -> Result<Self> {
        let (rules, bindings) = Self::parse_items(text)?;
        Ok(Self::new_unchecked(name, rules, bindings))
    }

    pub fn preset(name: &str) -> Result<Self> {
        let (_, src) = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
        Self::parse(name, src)
    }

    pub fn preset_names() -> Vec<&'static str> {
        PRESETS.iter().map(|(n, _)| *n).collect()
    }

    /// Resolve a catalog name first, then a file path.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if PRESETS.iter().any(|(n, _)| *n == name_or_path) {
            return Self::preset(name_or_path);
        }
        let path = std::path::Path::new(name_or_path);
        if !path.exists() {
            return Err(Error::UnknownPreset(name_or_path.to_string()));
        }
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: name_or_path.to_string(),
            source,
        })?;
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(name_or_path);
        Self::parse(name, &text)
    }

    /// Append a binding line such as `Q[j,k] = q`.
    pub fn with_param(mut self, text: &str) -> Result<Self> {
        self.bindings.push(ParamBinding::parse(text, 1)?);
        Ok(self)
    }

    /// Append a checked rule.
    pub fn with_rule(mut self, text: &str) -> Result<Self> {
        let r = RewriteRule::parse(text, 1)?;
        r.validate()?;
        self.rules.push(r);
        Ok(self)
    }

    /// Append every rule and binding of `other`.
    pub fn extended(mut self, other: &Presentation) -> Self {
        self.rules.extend(other.rules.iter().cloned());
        self.bindings.extend(other.bindings.iter().cloned());
        self
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn bindings(&self) -> &[ParamBinding] {
        &self.bindings
    }

    fn binding_value(&self, p: Param) -> Option<Scalar> {
        self.bindings.iter().find_map(|b| b.value(p))
    }

    /// Apply the parameter bindings to every coefficient.
    pub fn bind(&self, e: &Expression) -> Result<Expression> {
        if self.bindings.is_empty() {
            return Ok(e.clone());
        }
        let mut cur = e.clone();
        for _ in 0..=self.bindings.len() {
            let next = cur.substitute_params(&|p| self.binding_value(p))?;
            if next == cur {
                break;
            }
            cur = next;
        }
        Ok(cur)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.name)?;
        for r in &self.rules {
            writeln!(f, "{}", r.text)?;
        }
        for b in &self.bindings {
            writeln!(f, "param {}", b.text)?;
        }
        Ok(())
    }
}

/// A rule match inside a term.
#[derive(Debug, Clone)]
struct Redex {
    pos: usize,
    rule: usize,
    env: Env,
}

/// How a pair position sits in a term.
enum Site {
    Slot1(usize),
    Slot2(usize),
    Cross,
}

fn site(key: &TermKey, pos: usize) -> Option<Site> {
    let n1 = key.slot1.len();
    let n2 = key.slot2.as_ref().map_or(0, Word::len);
    if pos + 1 < n1 {
        Some(Site::Slot1(pos))
    } else if pos + 1 == n1 {
        (n2 > 0).then_some(Site::Cross)
    } else if pos >= n1 && pos + 1 < n1 + n2 {
        Some(Site::Slot2(pos - n1))
    } else {
        None
    }
}

struct Engine<'a> {
    p: &'a Presentation,
    cache: HashMap<(usize, Vec<(String, u32)>), Expression>,
}

impl<'a> Engine<'a> {
    fn new(p: &'a Presentation) -> Self {
        Self {
            p,
            cache: HashMap::new(),
        }
    }

    fn redexes_at(&self, key: &TermKey, pos: usize, all: bool) -> Vec<Redex> {
        let mut out = Vec::new();
        let Some(s) = site(key, pos) else { return out };
        let seq = key.sequence();
        let (a, b) = (&seq[pos], &seq[pos + 1]);
        let want = match s {
            Site::Cross => Placement::Cross,
            _ => Placement::Within,
        };
        for (i, r) in self.p.rules.iter().enumerate() {
            if r.placement != want {
                continue;
            }
            if let Some(env) = r.match_pair(a, b) {
                out.push(Redex { pos, rule: i, env });
                if !all {
                    break;
                }
            }
        }
        out
    }

    fn first_redex(&self, key: &TermKey) -> Option<Redex> {
        let len = key.sequence().len();
        (0..len.saturating_sub(1)).find_map(|pos| self.redexes_at(key, pos, false).pop())
    }

    fn all_redexes(&self, key: &TermKey) -> Vec<Redex> {
        let len = key.sequence().len();
        (0..len.saturating_sub(1))
            .flat_map(|pos| self.redexes_at(key, pos, true))
            .collect()
    }

    fn rhs(&mut self, rule: usize, env: &Env) -> Result<Expression> {
        let ck = (
            rule,
            env.indices().iter().map(|(k, v)| (k.clone(), *v)).collect(),
        );
        if let Some(e) = self.cache.get(&ck) {
            return Ok(e.clone());
        }
        let e = self.p.bind(&self.p.rules[rule].instantiate(env)?)?;
        self.cache.insert(ck, e.clone());
        Ok(e)
    }

    /// The term `key` (coefficient 1) with the redex replaced.
    fn apply(&mut self, key: &TermKey, redex: &Redex) -> Result<Expression> {
        let rhs = self.rhs(redex.rule, &redex.env)?;
        let rule_text = || self.p.rules[redex.rule].text.clone();
        let mut out = Expression::zero();
        let site = site(key, redex.pos).expect("redex positions are valid");
        for (rk, rc) in rhs.iter() {
            let (sign, prefix) = crate::clifford::blade_product(&key.prefix, &rk.prefix)?;
            if sign.is_zero() {
                continue;
            }
            let new_key = match site {
                Site::Slot1(i) | Site::Slot2(i) => {
                    if rk.slot2.is_some() {
                        return Err(Error::InvalidRule(format!(
                            "within-word rule `{}` produced a tensor",
                            rule_text()
                        )));
                    }
                    let in_first = matches!(site, Site::Slot1(_));
                    let w = if in_first {
                        &key.slot1
                    } else {
                        key.slot2.as_ref().unwrap()
                    };
                    let f = w.factors();
                    let mut v = f[..i].to_vec();
                    v.extend_from_slice(rk.slot1.factors());
                    v.extend_from_slice(&f[i + 2..]);
                    if in_first {
                        TermKey::new(prefix, Word::new(v), key.slot2.clone())
                    } else {
                        TermKey::new(prefix, key.slot1.clone(), Some(Word::new(v)))
                    }
                }
                Site::Cross => {
                    if rk.slot2.is_none() && !rk.slot1.is_empty() {
                        return Err(Error::InvalidRule(format!(
                            "cross-slot rule `{}` produced a degree-one term",
                            rule_text()
                        )));
                    }
                    let f1 = key.slot1.factors();
                    let f2 = key.slot2.as_ref().unwrap().factors();
                    let mut left = f1[..f1.len() - 1].to_vec();
                    left.extend_from_slice(rk.slot1.factors());
                    let mut right = rk
                        .slot2
                        .as_ref()
                        .map(|w| w.factors().to_vec())
                        .unwrap_or_default();
                    right.extend_from_slice(&f2[1..]);
                    TermKey::new(prefix, Word::new(left), Some(Word::new(right)))
                }
            };
            out.accumulate(new_key, &sign * rc);
        }
        Ok(out)
    }

    fn normalize(&mut self, e: &Expression) -> Result<Expression> {
        let mut work = self.p.bind(e)?;
        let mut done = Expression::zero();
        let mut applied = 0usize;
        while let Some((key, c)) = work.pop_first() {
            match self.first_redex(&key) {
                None => done.accumulate(key, c),
                Some(redex) => {
                    applied += 1;
                    if applied > self.p.budget {
                        return Err(Error::BudgetExceeded {
                            limit: self.p.budget,
                        });
                    }
                    for (k, rc) in self.apply(&key, &redex)?.iter() {
                        work.accumulate(k.clone(), rc * &c);
                    }
                }
            }
        }
        Ok(done)
    }
}

/// Rewrite to the normal form under `p`.
pub fn normalize(e: &Expression, p: &Presentation) -> Result<Expression> {
    Engine::new(p).normalize(e)
}

/// `normalize(lhs - rhs)`; zero iff the identity holds modulo `p`.
pub fn check_identity(lhs: &Expression, rhs: &Expression, p: &Presentation) -> Result<Expression> {
    normalize(&lhs.sub(rhs), p)
}

/// One rewrite step on the first term (in term order) that has a redex, at
/// its leftmost redex. `None` if `e` is already normal.
pub fn apply_once(e: &Expression, p: &Presentation) -> Result<Option<Expression>> {
    let mut engine = Engine::new(p);
    for (key, c) in e.iter() {
        if let Some(redex) = engine.first_redex(key) {
            let mut rest = e.clone();
            rest.accumulate(key.clone(), -c);
            let step = engine.apply(key, &redex)?.scale(c);
            return Ok(Some(rest.add(&step)));
        }
    }
    Ok(None)
}

/// A one-step overlap of two rule applications and the difference of the
/// normal forms of its two reducts.
#[derive(Debug, Clone)]
pub struct CriticalPair {
    pub overlap: Expression,
    pub first: String,
    pub second: String,
    pub residual: Expression,
}

/// Enumerate overlaps of left sides over indices `1..=n` (`n <= 4`): two
/// rules at the same position, and adjacent positions sharing a generator
/// (within a word, or a within-word match next to a cross-slot match).
pub fn critical_pairs(p: &Presentation, n: u32) -> Result<Vec<CriticalPair>> {
    if n == 0 || n > MAX_PROBE_INDEX {
        return Err(Error::IndexOutOfRange(format!(
            "critical pair index bound must lie in 1..={MAX_PROBE_INDEX}, got {n}"
        )));
    }
    let mut gens: BTreeSet<Generator> = BTreeSet::new();
    for r in &p.rules {
        for env in r.assignments(n) {
            let (a, b) = r.lhs_generators(&env)?;
            gens.insert(a);
            gens.insert(b);
        }
    }
    let gens: Vec<Generator> = gens.into_iter().collect();
    let mut keys: BTreeSet<TermKey> = BTreeSet::new();
    let w = |v: &[Generator]| Word::new(v.to_vec());
    let unit = crate::clifford::Blade::unit();
    for a in &gens {
        for b in &gens {
            keys.insert(TermKey::new(unit, w(&[*a, *b]), None));
            keys.insert(TermKey::new(unit, w(&[*a]), Some(w(&[*b]))));
            for c in &gens {
                keys.insert(TermKey::new(unit, w(&[*a, *b, *c]), None));
                keys.insert(TermKey::new(unit, w(&[*a, *b]), Some(w(&[*c]))));
                keys.insert(TermKey::new(unit, w(&[*a]), Some(w(&[*b, *c]))));
            }
        }
    }
    let mut engine = Engine::new(p);
    let mut out = Vec::new();
    for key in keys {
        let len = key.sequence().len();
        let redexes = engine.all_redexes(&key);
        for (x, r1) in redexes.iter().enumerate() {
            for r2 in &redexes[x + 1..] {
                let same = r1.pos == r2.pos;
                let adjacent = r1.pos + 1 == r2.pos;
                let overlapping = if len == 2 { same } else { adjacent };
                if !overlapping {
                    continue;
                }
                let red1 = engine.apply(&key, r1)?;
                let red2 = engine.apply(&key, r2)?;
                let residual = engine.normalize(&red1)?.sub(&engine.normalize(&red2)?);
                out.push(CriticalPair {
                    overlap: Expression::from_term(key.clone(), Scalar::one()),
                    first: p.rules[r1.rule].text.clone(),
                    second: p.rules[r2.rule].text.clone(),
                    residual,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;

    fn ex(s: &str) -> Expression {
        parse_expression(s).unwrap()
    }

    fn nf(s: &str, preset: &str) -> Expression {
        normalize(&ex(s), &Presentation::preset(preset).unwrap()).unwrap()
    }

    #[test]
    fn all_presets_load() {
        for name in Presentation::preset_names() {
            Presentation::preset(name).unwrap();
        }
        assert!(matches!(
            Presentation::load("nope"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn preset_examples() {
        assert_eq!(nf("x[2] ox x[1]", "qplane"), ex("q * (x[1] ox x[2])"));
        assert_eq!(
            nf("d[1] ox d[2]", "dual-plane"),
            ex("q^-1 * (d[2] ox d[1])")
        );
        assert_eq!(
            nf("x[1] ox p[1]", "qheis2"),
            ex("q * (p[1] ox x[1]) + i*hbar")
        );
        for name in Presentation::preset_names() {
            assert!(nf("0", name).is_zero());
        }
    }

    #[test]
    fn identities() {
        let p = Presentation::preset("qheis-f").unwrap();
        let r = check_identity(&ex("x[1] ox x[2] - q^-1 * (x[2] ox x[1])"), &ex("0"), &p).unwrap();
        assert!(r.is_zero());
        let p = Presentation::preset("manin-word").unwrap();
        assert!(check_identity(&ex("x[1] x[2]"), &ex("q * x[2] x[1]"), &p)
            .unwrap()
            .is_zero());
        let p = Presentation::preset("qheis2").unwrap();
        let r = check_identity(&ex("x[1] ox p[2] - q * (p[2] ox x[1])"), &ex("0"), &p).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn context_is_kept_across_slots() {
        assert_eq!(
            nf("x[1] x[3] ox x[2] p[1]", "qplane"),
            ex("q * (x[1] x[2] ox x[3] p[1])")
        );
        assert_eq!(
            nf("E[1] x[2] ox x[1]", "qplane"),
            ex("q * (E[1] x[1] ox x[2])")
        );
    }

    #[test]
    fn qjk_bindings() {
        let p = Presentation::preset("qheis-f").unwrap();
        let sym = normalize(&ex("x[1] ox p[2]"), &p).unwrap();
        assert_eq!(sym, ex("Q[1,2] * (p[2] ox x[1])"));
        let pq = p.clone().with_param("Q[j,k] = q").unwrap();
        assert_eq!(
            normalize(&ex("x[1] ox p[2]"), &pq).unwrap(),
            ex("q * (p[2] ox x[1])")
        );
        let pt = p.with_param("Q[j,k] = delta[j,k] - 1").unwrap();
        assert_eq!(
            normalize(&ex("x[1] ox p[2]"), &pt).unwrap(),
            ex("-(p[2] ox x[1])")
        );
        assert_eq!(
            normalize(&ex("x[1] ox p[1]"), &pt).unwrap(),
            ex("-i*hbar*(f ox 1)")
        );
    }

    #[test]
    fn rejects_non_decreasing_rules() {
        let err = Presentation::parse("loop", "x[j] ox x[k] | j<k -> q^-1 * (x[k] ox x[j])");
        assert!(matches!(err, Err(Error::InvalidRule(_))));
        let err = Presentation::parse("both", "x[j] ox x[k] | j!=k -> q * (x[k] ox x[j])");
        assert!(matches!(err, Err(Error::InvalidRule(_))));
        assert!(Presentation::parse("bad", "x[j] ox x[k] -> x[j] x[k]").is_err());
        assert!(Presentation::parse("bad", "x[j] x[k] | j<m -> x[k] x[j]").is_err());
    }

    #[test]
    fn budget_stops_non_terminating_sets() {
        let p = Presentation::parse_unchecked("swap", "x[j] ox x[k] | j!=k -> x[k] ox x[j]")
            .unwrap()
            .with_budget(1000);
        assert!(matches!(
            normalize(&ex("x[1] ox x[2]"), &p),
            Err(Error::BudgetExceeded { limit: 1000 })
        ));
    }

    #[test]
    fn within_word_context() {
        assert_eq!(
            nf("x[3] x[2] x[1]", "manin-word"),
            ex("q^-3 * (x[1] x[2] x[3])")
        );
        assert_eq!(nf("x[1] p[1]", "classical"), ex("p[1] x[1] + i*hbar*f"));
        assert_eq!(nf("d c b a", "entries-commute"), ex("a b c d"));
    }

    #[test]
    fn critical_pairs_examples() {
        assert!(critical_pairs(&Presentation::preset("qplane").unwrap(), 3)
            .unwrap()
            .is_empty());
        let pairs = critical_pairs(&Presentation::preset("qheis2").unwrap(), 2).unwrap();
        assert!(pairs.iter().all(|c| c.residual.is_zero()));
        let pairs = critical_pairs(&Presentation::preset("manin-word").unwrap(), 3).unwrap();
        assert!(!pairs.is_empty());
        assert!(pairs.iter().all(|c| c.residual.is_zero()));
        let bad = Presentation::parse(
            "bad",
            "x[j] ox p[k] -> p[k] ox x[j]\nx[j] ox p[k] -> 2 * (p[k] ox x[j])",
        )
        .unwrap();
        let pairs = critical_pairs(&bad, 2).unwrap();
        assert!(!pairs.is_empty());
        assert!(pairs.iter().all(|c| !c.residual.is_zero()));
        assert!(critical_pairs(&bad, 5).is_err());
    }

    #[test]
    fn apply_once_then_inverse_restores() {
        let cases = [
            (
                "qplane",
                "x[2] ox x[1]",
                "x[j] ox x[k] | j<k -> q^-1 * (x[k] ox x[j])",
            ),
            (
                "dual-plane",
                "d[1] ox d[2]",
                "d[k] ox d[j] | j<k -> q * (d[j] ox d[k])",
            ),
            (
                "manin-word",
                "x[2] x[1]",
                "x[j] x[k] | j<k -> q * (x[k] x[j])",
            ),
        ];
        for (preset, start, inverse) in cases {
            let forward = Presentation::preset(preset).unwrap();
            let backward = Presentation::parse_unchecked("inverse", inverse).unwrap();
            let e = ex(start);
            let once = apply_once(&e, &forward).unwrap().unwrap();
            assert_ne!(once, e);
            let back = apply_once(&once, &backward).unwrap().unwrap();
            assert_eq!(back, e, "{preset}");
        }
    }
}
