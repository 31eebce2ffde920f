use std::io::Cursor;
use std::process::Command;

use qheis_core::cli::{run, EXIT_COMPUTE, EXIT_NONZERO, EXIT_OK, EXIT_PARSE, EXIT_USAGE};

fn qheis(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qheis").chain(args.iter().copied());
    let code = run(
        argv,
        &mut Cursor::new(stdin.as_bytes().to_vec()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn normalize_quantum_plane() {
    let (code, out, _) = qheis(&["normalize", "--preset", "qplane", "x[2] ox x[1]"], "");
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "q * (x[1] ox x[2])\n");
}

#[test]
fn lemma_as_printed_is_nonzero() {
    let (code, out, _) = qheis(&["verify", "lemma-f1", "--qjk=q", "--sign=as-printed"], "");
    assert_eq!(code, EXIT_NONZERO);
    assert!(out.contains("[nonzero] mixed, f=1 (j=k=1)"));
    assert!(out.contains("residual: 2*i*hbar"));
    let (code, _, _) = qheis(&["verify", "lemma-f1", "--qjk=q", "--sign=unified"], "");
    assert_eq!(code, EXIT_OK);
}

#[test]
fn determinant_default_symbols() {
    let (code, out, _) = qheis(&["detq"], "");
    assert_eq!((code, out.as_str()), (EXIT_OK, "a d - q * (c b)\n"));
    let (code, out, _) = qheis(&["detq", "1", "0", "0", "1"], "");
    assert_eq!((code, out.as_str()), (EXIT_OK, "1\n"));
}

#[test]
fn exit_status_per_error_class() {
    assert_eq!(qheis(&["frobnicate"], "").0, EXIT_USAGE);
    assert_eq!(
        qheis(
            &["normalize", "--qjk=maybe", "--preset", "qplane", "x[1]"],
            ""
        )
        .0,
        EXIT_USAGE
    );
    assert_eq!(qheis(&["normalize", "x[1]"], "").0, EXIT_USAGE);
    assert_eq!(
        qheis(&["normalize", "--preset", "no-such", "x[1]"], "").0,
        EXIT_USAGE
    );
    assert_eq!(
        qheis(
            &["normalize", "--preset", "/no/such/file.rules", "x[1]"],
            ""
        )
        .0,
        EXIT_USAGE
    );
    let (code, _, err) = qheis(&["normalize", "--preset", "qplane", "x["], "");
    assert_eq!(code, EXIT_PARSE);
    assert!(err.contains("column 2"));
    assert_eq!(
        qheis(
            &["normalize", "--preset", "qplane", "x[1] ox x[2] ox x[3]"],
            ""
        )
        .0,
        EXIT_PARSE
    );
    assert_eq!(
        qheis(
            &[
                "normalize",
                "--preset",
                "qplane",
                "--budget",
                "0",
                "x[2] ox x[1]"
            ],
            ""
        )
        .0,
        EXIT_COMPUTE
    );
    assert_eq!(qheis(&["diffop", "1", "1", "x1"], "").0, EXIT_COMPUTE);
    assert_eq!(
        qheis(
            &[
                "check",
                "--preset",
                "qplane",
                "x[2] ox x[1]",
                "x[1] ox x[2]"
            ],
            ""
        )
        .0,
        EXIT_NONZERO
    );
    assert_eq!(
        qheis(
            &[
                "check",
                "--preset",
                "qplane",
                "x[2] ox x[1]",
                "q * (x[1] ox x[2])"
            ],
            ""
        )
        .0,
        EXIT_OK
    );
    assert_eq!(qheis(&["--help"], "").0, EXIT_OK);
}

#[test]
fn batch_mode_reads_standard_input() {
    let (code, out, _) = qheis(
        &["normalize", "--preset", "dual-plane"],
        "d[1] ox d[2]\n\n# comment\nd[2] ox d[1]\n",
    );
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "q^-1 * (d[2] ox d[1])\nd[2] ox d[1]\n");
    let (code, _, err) = qheis(&["normalize", "--preset", "qplane"], "x[1]\nx[2] +\n");
    assert_eq!(code, EXIT_PARSE);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn calculus_verbs() {
    assert_eq!(qheis(&["dirac", "x1*E[1] + x2*E[2]"], "").1, "-2\n");
    assert_eq!(
        qheis(&["monogenic", "x1*E[1] - x2*E[2]"], "").1,
        "monogenic: true\nwitness: 0\n"
    );
    assert_eq!(
        qheis(&["monogenic", "x1*E[1]"], "").1,
        "monogenic: false\nwitness: -1\n"
    );
    assert_eq!(qheis(&["cr", "x0 + x1*E[1]"], "").1, "0\n");
    assert_eq!(qheis(&["diffop", "1", "2", "x1"], "").1, "be[2]\n");
}

#[test]
fn json_reports_follow_schema() {
    let (code, out, _) = qheis(&["verify", "theorem-monogenic", "--json"], "");
    assert_eq!(code, EXIT_NONZERO);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["check"], "theorem-monogenic");
    let rels = v["relations"].as_array().unwrap();
    assert_eq!(rels[0]["verdict"], "zero");
    assert_eq!(rels[0]["residual"], serde_json::json!([]));
    for r in rels {
        for key in ["label", "substitutions", "residual", "verdict"] {
            assert!(r.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn binary_output_is_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_qheis");
    for args in [
        vec!["verify", "all", "--qjk=table"],
        vec!["verify", "all", "--json"],
        vec!["critical-pairs", "--preset", "manin-word", "--json"],
        vec!["plane-relations", "--classical"],
    ] {
        let a = Command::new(bin).args(&args).output().unwrap();
        let b = Command::new(bin).args(&args).output().unwrap();
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
    let out = Command::new(bin)
        .args(["normalize", "--preset", "qplane", "x[2] ox x[1]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "q * (x[1] ox x[2])\n"
    );
}
