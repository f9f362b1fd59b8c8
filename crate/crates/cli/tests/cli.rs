use std::path::PathBuf;
use std::process::Command;

use wsync_cli::{run, EXIT_BUDGET, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_OK};
use wsync_core::format::{parse_document, read_trace_csv};
use num_rational::BigRational;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn wsync(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wsync").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn accept_prints_probability() {
    let (code, out, _) = wsync(&["accept", &fixture("b_one.pa"), "--word", "a"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "1");
    let (_, out, _) = wsync(&["accept", &fixture("b_half.pa"), "--word", "a.a"]);
    assert_eq!(out.trim(), "1/2");
}

#[test]
fn run_lists_support() {
    let (code, out, _) = wsync(&["run", &fixture("b_half.pa"), "--word", "a"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("sA = 1/2") && out.contains("sR = 1/2"), "{out}");
}

#[test]
fn certify_accepts_alias_letters() {
    let (code, out, _) = wsync(&["certify", &fixture("c_one.pa"), "--schedule", "a.$,a.$"]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn certify_fails_on_half_instance() {
    let (code, _, _) = wsync(&["certify", &fixture("c_half.pa"), "--schedule", "a.$"]);
    assert_eq!(code, EXIT_CHECK_FAILED);
}

#[test]
fn search_reports_best() {
    let (code, out, _) = wsync(&["search", &fixture("b_half.pa"), "--max-len", "8"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("best_prob = 1/2"), "{out}");
    let (_, par, _) = wsync(&["search", &fixture("b_half.pa"), "--max-len", "8", "--parallel"]);
    assert_eq!(out, par);
}

#[test]
fn search_over_budget() {
    let (code, _, err) = wsync(&["search", &fixture("b_half.pa"), "--max-len", "8", "--budget", "2"]);
    assert_eq!(code, EXIT_BUDGET);
    assert!(err.contains("budget"), "{err}");
}

#[test]
fn schedule_not_found() {
    let (code, out, _) = wsync(&["schedule", &fixture("b_half.pa"), "--k", "2", "--max-len", "4"]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(out.contains("not found"), "{out}");
    let (code, _, _) = wsync(&["schedule", &fixture("b_one.pa"), "--k", "3", "--max-len", "2"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn input_errors() {
    assert_eq!(wsync(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(wsync(&["accept", "/nonexistent.pa", "--word", "a"]).0, EXIT_INPUT);
    let (code, _, err) = wsync(&["accept", &fixture("b_one.pa"), "--word", "zz"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("zz"), "{err}");
}

#[test]
fn validate_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(wsync(&["validate", &fixture("b_half.pa")]).0, EXIT_OK);

    let bad_sum = dir.path().join("sum.pa");
    let text = std::fs::read_to_string(fixture("b_half.pa")).unwrap().replace("sR = \"1/2\"", "sR = \"1/4\"");
    std::fs::write(&bad_sum, text).unwrap();
    let (code, out, _) = wsync(&["validate", bad_sum.to_str().unwrap()]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(out.contains("3/4"), "{out}");

    let bad_syntax = dir.path().join("syntax.pa");
    std::fs::write(&bad_syntax, "states = [\n").unwrap();
    assert_eq!(wsync(&["validate", bad_syntax.to_str().unwrap()]).0, EXIT_INPUT);
}

#[test]
fn lift_twin_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.pa");
    let c = dir.path().join("c.pa");
    assert_eq!(wsync(&["lift", &fixture("two_letter.pa"), "-o", a.to_str().unwrap()]).0, EXIT_OK);
    assert_eq!(wsync(&["twin", a.to_str().unwrap(), "-o", c.to_str().unwrap()]).0, EXIT_OK);
    let doc = parse_document(&std::fs::read_to_string(&c).unwrap()).unwrap();
    assert!(doc.twinned().is_ok());

    let (a, c) = (a.to_str().unwrap(), c.to_str().unwrap());
    assert_eq!(wsync(&["check-p1", c, "--v1", "a.b", "--v2", "b.$"]).0, EXIT_OK);
    assert_eq!(wsync(&["check-p2", a, c, "--word", "a.b.a"]).0, EXIT_OK);
    assert_eq!(wsync(&["check-p2", a, c, "--word", "a.$"]).0, EXIT_INPUT);
    assert_eq!(wsync(&["absorb", c, "--prefix", "a.$", "--horizon", "5"]).0, EXIT_OK);
    assert_eq!(wsync(&["halfbound", c, "--word", "a.#.b"]).0, EXIT_OK);
    // twin input must carry lift roles
    assert_eq!(wsync(&["twin", &fixture("b_one.pa"), "-o", c]).0, EXIT_INPUT);
}

#[test]
fn trace_csv_rows_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let (code, out, _) = wsync(&["trace", &fixture("c_half.pa"), "--word", "a.$.a", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("norms:"), "{out}");
    let rows = read_trace_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let total: BigRational = row.masses.iter().map(|(_, p)| p.value().clone()).sum();
        assert_eq!(total, BigRational::from_integer(1.into()));
    }
}

#[test]
fn lasso_to_stdout() {
    let (code, out, _) = wsync(&["lasso", &fixture("b_half.pa"), "--stem", "", "--loop", "a", "--reps", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn binary_exit_code() {
    let status = Command::new(env!("CARGO_BIN_EXE_wsync"))
        .args(["accept", &fixture("b_one.pa"), "--word", "a"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&status.stdout).trim(), "1");
}
