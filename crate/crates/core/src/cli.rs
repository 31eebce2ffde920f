//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 a nonzero verdict, 2 usage errors (bad flags,
//! unknown preset, missing file), 3 unparsable input, 4 computation errors.

use std::io::{BufRead, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::calculus::{PolyFunction, Side};
use crate::clifford::AlgebraKind;
use crate::error::Error;
use crate::json::{expression_to_json, plane_relations_to_json, poly_to_json, report_to_json};
use crate::parse::parse_expression_at;
use crate::rewrite::{check_identity, critical_pairs, normalize, Presentation};
use crate::terms::Expression;
use crate::verify::{self, Config, QjkBinding, SignConvention};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONZERO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_COMPUTE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "qheis",
    version,
    about = "Exact normal forms and relation replay for q-deformed Heisenberg tensors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,

    /// Emit JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,

    /// Rewrite system: a built-in preset name or a rule file path
    #[arg(long, global = true, value_name = "NAME|PATH")]
    pub preset: Option<String>,

    /// Specialization of Q[j,k]
    #[arg(
        long,
        global = true,
        default_value = "symbolic",
        value_name = "q|table|symbolic"
    )]
    pub qjk: QjkBinding,

    /// Sign of the i*hbar*delta*f term in the mixed relation
    #[arg(
        long,
        global = true,
        default_value = "as-printed",
        value_name = "as-printed|unified"
    )]
    pub sign: SignConvention,

    /// Maximum number of rule applications per normalization
    #[arg(long, global = true)]
    pub budget: Option<usize>,

    /// Dimension of the coefficient algebra for polynomial inputs
    #[arg(long, global = true)]
    pub dim: Option<u32>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Normal form of each expression under --preset
    Normalize { exprs: Vec<String> },
    /// Whether LHS and RHS have the same normal form under --preset
    Check { lhs: String, rhs: String },
    /// Dirac operator applied to a polynomial over A_m
    Dirac {
        polys: Vec<String>,
        #[arg(long, value_enum, default_value = "left")]
        side: SideArg,
    },
    /// Cauchy-Riemann operator d0 + D applied to a polynomial over A_m
    Cr { polys: Vec<String> },
    /// Difference operator e_j d_k + e_k d_j applied to a polynomial over B_p
    Diffop { j: u32, k: u32, polys: Vec<String> },
    /// Whether a polynomial is monogenic, with the Dirac image as witness
    Monogenic {
        polys: Vec<String>,
        #[arg(long, value_enum, default_value = "left")]
        side: SideArg,
    },
    /// Quantum determinant a d - q c b, of the generic entries or of four expressions
    Detq { entries: Vec<String> },
    /// Relations on a, b, c, d forced by preserving the quantum plane
    PlaneRelations {
        /// Also normalize each relation at q = 1 with commuting entries
        #[arg(long)]
        classical: bool,
    },
    /// Replay a relation-level claim
    Verify {
        #[arg(value_parser = check_names())]
        check: String,
        /// Test function for theorem-monogenic (repeatable)
        #[arg(long = "f", value_name = "POLY")]
        functions: Vec<String>,
    },
    /// Critical pairs of --preset over indices 1..=N
    CriticalPairs {
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
}

fn check_names() -> clap::builder::PossibleValuesParser {
    let mut names = verify::CHECKS.to_vec();
    names.push("all");
    clap::builder::PossibleValuesParser::new(names)
}

enum Failure {
    Usage(String),
    Parse(Error),
    Compute(Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Compute(_) => EXIT_COMPUTE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Parse(e) => format!("parse error: {e}"),
            Failure::Compute(e) => format!("error: {e}"),
        }
    }
}

fn parse_err(e: Error) -> Failure {
    match e {
        Error::UnknownPreset(_) | Error::Io { .. } => Failure::Usage(e.to_string()),
        other => Failure::Parse(other),
    }
}

fn compute_err(e: Error) -> Failure {
    match e {
        Error::UnknownPreset(_) | Error::Io { .. } => Failure::Usage(e.to_string()),
        other => Failure::Compute(other),
    }
}

/// Rendered output and the verdict of a successful run.
struct Output {
    text: String,
    json: Value,
    nonzero: bool,
}

/// Run one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{rendered}");
            return EXIT_OK;
        }
    };
    let json_mode = cli.json;
    match execute(cli, stdin) {
        Ok(o) => {
            let written = if json_mode {
                serde_json::to_string_pretty(&o.json)
                    .map(|s| s + "\n")
                    .unwrap_or_default()
            } else {
                o.text
            };
            let _ = out.write_all(written.as_bytes());
            if o.nonzero {
                EXIT_NONZERO
            } else {
                EXIT_OK
            }
        }
        Err(f) => {
            let _ = writeln!(err, "{}", f.message());
            f.code()
        }
    }
}

/// Positional inputs, or non-blank, non-comment lines of standard input,
/// each with its line number.
fn inputs(args: &[String], stdin: &mut dyn BufRead) -> Result<Vec<(usize, String)>, Failure> {
    if !args.is_empty() {
        return Ok(args
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (i + 1, a))
            .collect());
    }
    let mut lines = Vec::new();
    for (i, line) in stdin.lines().enumerate() {
        let line = line.map_err(|e| Failure::Usage(format!("reading standard input: {e}")))?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            lines.push((i + 1, t.to_string()));
        }
    }
    if lines.is_empty() {
        return Err(Failure::Usage("no input given".into()));
    }
    Ok(lines)
}

fn presentation(cli: &Cli) -> Result<Presentation, Failure> {
    let name = cli
        .preset
        .as_deref()
        .ok_or_else(|| Failure::Usage("this verb needs --preset NAME|PATH".into()))?;
    let mut p = Presentation::load(name).map_err(parse_err)?;
    if let Some(b) = cli.qjk.param() {
        p = p.with_param(b).map_err(parse_err)?;
    }
    if let Some(n) = cli.budget {
        p = p.with_budget(n);
    }
    Ok(p)
}

fn parse_exprs(items: &[(usize, String)]) -> Result<Vec<Expression>, Failure> {
    items
        .iter()
        .map(|(line, s)| parse_expression_at(s, *line).map_err(Failure::Parse))
        .collect()
}

fn parse_polys(
    items: &[(usize, String)],
    dim: Option<u32>,
    kind: AlgebraKind,
) -> Result<Vec<PolyFunction>, Failure> {
    items
        .iter()
        .map(|(_, s)| PolyFunction::parse_with_kind(s, dim, Some(kind)).map_err(Failure::Parse))
        .collect()
}

fn show_poly(f: &PolyFunction) -> String {
    if f.is_zero() {
        "0".to_string()
    } else {
        f.to_string()
    }
}

fn lines_of(items: impl IntoIterator<Item = String>) -> String {
    items.into_iter().map(|s| s + "\n").collect()
}

fn one_or_many(mut values: Vec<Value>) -> Value {
    if values.len() == 1 {
        values.pop().unwrap()
    } else {
        Value::Array(values)
    }
}

fn poly_verb(
    cli: &Cli,
    polys: &[String],
    stdin: &mut dyn BufRead,
    kind: AlgebraKind,
    op: impl Fn(&PolyFunction) -> crate::error::Result<PolyFunction>,
) -> Result<Output, Failure> {
    let items = inputs(polys, stdin)?;
    let fs = parse_polys(&items, cli.dim, kind)?;
    let results = fs
        .iter()
        .map(|f| op(f).map_err(compute_err))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Output {
        text: lines_of(results.iter().map(show_poly)),
        json: one_or_many(results.iter().map(poly_to_json).collect()),
        nonzero: false,
    })
}

fn execute(cli: Cli, stdin: &mut dyn BufRead) -> Result<Output, Failure> {
    match &cli.verb {
        Verb::Normalize { exprs } => {
            let p = presentation(&cli)?;
            let items = inputs(exprs, stdin)?;
            let es = parse_exprs(&items)?;
            let nfs = es
                .iter()
                .map(|e| normalize(e, &p).map_err(compute_err))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Output {
                text: lines_of(nfs.iter().map(Expression::to_string)),
                json: one_or_many(nfs.iter().map(expression_to_json).collect()),
                nonzero: false,
            })
        }
        Verb::Check { lhs, rhs } => {
            let p = presentation(&cli)?;
            let l = parse_expression_at(lhs, 1).map_err(Failure::Parse)?;
            let r = parse_expression_at(rhs, 2).map_err(Failure::Parse)?;
            let residual = check_identity(&l, &r, &p).map_err(compute_err)?;
            let verdict = if residual.is_zero() {
                "zero"
            } else {
                "nonzero"
            };
            Ok(Output {
                text: format!("residual: {residual}\nverdict: {verdict}\n"),
                json: json!({
                    "residual": expression_to_json(&residual),
                    "residual_text": residual.to_string(),
                    "verdict": verdict,
                }),
                nonzero: !residual.is_zero(),
            })
        }
        Verb::Dirac { polys, side } => {
            let side: Side = (*side).into();
            poly_verb(&cli, polys, stdin, AlgebraKind::Clifford, |f| f.dirac(side))
        }
        Verb::Cr { polys } => poly_verb(
            &cli,
            polys,
            stdin,
            AlgebraKind::Clifford,
            PolyFunction::cauchy_riemann,
        ),
        Verb::Diffop { j, k, polys } => {
            let (j, k) = (*j, *k);
            let dim = cli.dim;
            // without --dim, widen the inferred dimension to cover j and k
            poly_verb(&cli, polys, stdin, AlgebraKind::Deformed, |f| {
                if f.is_zero() && j != k {
                    Ok(f.clone())
                } else if dim.is_none() && f.dim() < j.max(k) {
                    PolyFunction::parse_with_kind(
                        &f.to_string(),
                        Some(j.max(k)),
                        Some(AlgebraKind::Deformed),
                    )?
                    .difference_op(j, k)
                } else {
                    f.difference_op(j, k)
                }
            })
        }
        Verb::Monogenic { polys, side } => {
            let side: Side = (*side).into();
            let items = inputs(polys, stdin)?;
            let fs = parse_polys(&items, cli.dim, AlgebraKind::Clifford)?;
            let mut text = String::new();
            let mut values = Vec::new();
            for f in &fs {
                let (ok, witness) = f.is_monogenic(side).map_err(compute_err)?;
                text.push_str(&format!(
                    "monogenic: {ok}\nwitness: {}\n",
                    show_poly(&witness)
                ));
                values.push(json!({ "monogenic": ok, "witness": poly_to_json(&witness) }));
            }
            Ok(Output {
                text,
                json: one_or_many(values),
                nonzero: false,
            })
        }
        Verb::Detq { entries } => {
            let det = match entries.len() {
                0 => verify::quantum_det_generic(),
                4 => {
                    let items: Vec<(usize, String)> = entries
                        .iter()
                        .cloned()
                        .enumerate()
                        .map(|(i, s)| (i + 1, s))
                        .collect();
                    let es = parse_exprs(&items)?;
                    verify::quantum_det(&es[0], &es[1], &es[2], &es[3])
                }
                n => {
                    return Err(Failure::Usage(format!(
                        "detq takes zero or four entries, got {n}"
                    )))
                }
            }
            .map_err(compute_err)?;
            Ok(Output {
                text: format!("{det}\n"),
                json: expression_to_json(&det),
                nonzero: false,
            })
        }
        Verb::PlaneRelations { classical } => {
            let rels = verify::derive_plane_relations().map_err(compute_err)?;
            let mut text = String::new();
            for r in &rels {
                text.push_str(&format!("{}: {}\n", r.basis, r.relation));
            }
            let mut json = plane_relations_to_json(&rels);
            if *classical {
                let commuting = Presentation::preset("entries-commute")
                    .and_then(|p| p.with_param("q = 1"))
                    .map_err(compute_err)?;
                let mut limits = Vec::new();
                for r in &rels {
                    let n = normalize(&r.relation, &commuting).map_err(compute_err)?;
                    text.push_str(&format!("at q = 1, {}: {}\n", r.basis, n));
                    limits.push(expression_to_json(&n));
                }
                json = json!({ "relations": json, "classical": limits });
            }
            Ok(Output {
                text,
                json,
                nonzero: false,
            })
        }
        Verb::Verify { check, functions } => {
            let cfg = Config {
                qjk: cli.qjk,
                sign: cli.sign,
            };
            let fs = if functions.is_empty() {
                None
            } else {
                if check != "theorem-monogenic" && check != "all" {
                    return Err(Failure::Usage(
                        "--f applies to theorem-monogenic only".into(),
                    ));
                }
                let items: Vec<(usize, String)> = functions
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, s)| (i + 1, s))
                    .collect();
                Some(parse_polys(
                    &items,
                    Some(cli.dim.unwrap_or(2)),
                    AlgebraKind::Clifford,
                )?)
            };
            let reports = verify::run_check(check, cfg, fs.as_deref()).map_err(compute_err)?;
            let nonzero = reports.iter().any(|r| !r.all_zero());
            let text = reports
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output {
                text,
                json: one_or_many(reports.iter().map(report_to_json).collect()),
                nonzero,
            })
        }
        Verb::CriticalPairs { n } => {
            let p = presentation(&cli)?;
            if *n == 0 || *n > crate::rewrite::MAX_PROBE_INDEX {
                return Err(Failure::Usage(format!(
                    "--n must lie in 1..={}",
                    crate::rewrite::MAX_PROBE_INDEX
                )));
            }
            let pairs = critical_pairs(&p, *n).map_err(compute_err)?;
            let bad = pairs.iter().filter(|c| !c.residual.is_zero()).count();
            let mut text = String::new();
            let mut values = Vec::new();
            for c in &pairs {
                text.push_str(&format!(
                    "overlap: {}\n  rules: {} | {}\n  residual: {}\n",
                    c.overlap, c.first, c.second, c.residual
                ));
                values.push(json!({
                    "overlap": expression_to_json(&c.overlap),
                    "first": c.first,
                    "second": c.second,
                    "residual": expression_to_json(&c.residual),
                }));
            }
            text.push_str(&format!(
                "{} critical pairs, {} with nonzero residual\n",
                pairs.len(),
                bad
            ));
            Ok(Output {
                text,
                json: json!({ "presentation": p.name, "pairs": values, "nonzero": bad }),
                nonzero: bad > 0,
            })
        }
    }
}
