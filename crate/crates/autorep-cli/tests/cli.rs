//! End-to-end tests of the binary: output formats, exit codes, and the
//! serialization contract (`"inf"` in JSON, empty cells in CSV).

use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_autorep"))
}

fn op_file(contents: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const ROTATION_JSON: &str =
    r#"{"n": 2, "rows": [[0.5, -0.8660254037844386], [0.8660254037844386, 0.5]]}"#;

#[test]
fn fitz_reports_graph_membership() {
    let op = op_file(ROTATION_JSON);
    let on = stdout_json(&run(&[
        "fitz",
        "--op",
        op.path().to_str().unwrap(),
        "--point",
        "1,0,0.5,0.8660254037844386",
    ]));
    assert_eq!(on["on_graph"], serde_json::json!(true));
    assert!((on["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let off = stdout_json(&run(&[
        "fitz",
        "--op",
        op.path().to_str().unwrap(),
        "--point",
        "1,0,0,0",
    ]));
    assert_eq!(off["on_graph"], serde_json::json!(false));
}

#[test]
fn rep_kinds_agree_for_rotation() {
    let op = op_file(ROTATION_JSON);
    let path = op.path().to_str().unwrap();
    let mut values = Vec::new();
    for kind in ["A", "B", "C", "unified"] {
        let record = stdout_json(&run(&["rep", "--kind", kind, "--op", path, "--point", "1,0,0,0"]));
        values.push(record["value"].as_f64().unwrap());
    }
    for v in &values {
        assert!((v - 1.0).abs() < 1e-6, "got {values:?}");
    }
}

#[test]
fn rep_json_round_trips_through_file() {
    let op = op_file("2\n");
    let out_file = NamedTempFile::new().unwrap();
    let out = run(&[
        "rep",
        "--kind",
        "unified",
        "--op",
        op.path().to_str().unwrap(),
        "--point",
        "0.1,0.30000000000000004",
        "--out",
        out_file.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(out_file.path()).unwrap();
    let record: serde_json::Value = serde_json::from_str(&text).unwrap();
    // unified = x x* + (x* - 2x)^2 / 4 for the scalar operator 2
    let expected = 0.1 * 0.30000000000000004
        + (0.30000000000000004f64 - 0.2).powi(2) / 4.0;
    assert_eq!(record["value"].as_f64().unwrap(), expected);
    // serialize -> parse -> serialize is a fixed point
    assert_eq!(
        serde_json::to_string(&record).unwrap(),
        serde_json::to_string(&serde_json::from_str::<serde_json::Value>(&text).unwrap()).unwrap()
    );
}

#[test]
fn infinity_serializes_as_inf_in_json_and_empty_in_csv() {
    // antisymmetric operator: representers are +inf off the graph
    let op = op_file("0 -1\n1 0\n");
    let path = op.path().to_str().unwrap();
    let record = stdout_json(&run(&["rep", "--kind", "C", "--op", path, "--point", "1,0,0,0"]));
    assert_eq!(record["value"], serde_json::json!("inf"));

    let out = run(&["compare", "--op", path, "--box", "-1:1", "--m", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x0,x1,xstar0,xstar1,A,B,C,unified,maxgap"
    );
    // off-graph rows carry empty value cells
    assert!(text.lines().any(|l| l.contains(",,")));

    let out = run(&["compare", "--op", path, "--box", "-1:1", "--m", "3", "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let points = parsed["points"].as_array().unwrap();
    assert_eq!(points.len(), 81); // 3^4 joint nodes, deterministic order
    assert!(points.iter().any(|p| p["unified"] == serde_json::json!("inf")));
}

#[test]
fn compare_is_deterministic() {
    let op = op_file("1\n");
    let path = op.path().to_str().unwrap();
    let a = run(&["compare", "--op", path, "--box", "-1:1", "--m", "5"]);
    let b = run(&["compare", "--op", path, "--box", "-1:1", "--m", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 26);
}

#[test]
fn graph_emits_band_csv() {
    let op = op_file("2\n");
    let out = run(&[
        "graph",
        "--op",
        op.path().to_str().unwrap(),
        "--box",
        "-2:2",
        "--m",
        "21",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x0,xstar0,residual");
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3);
        let x: f64 = fields[0].parse().unwrap();
        let xs: f64 = fields[1].parse().unwrap();
        // every reported node is close to the graph x* = 2x (h = 0.2)
        assert!((xs - 2.0 * x).abs() <= 1.0);
    }
}

#[test]
fn gallery_neglog_point_and_sweep() {
    let record = stdout_json(&run(&["gallery", "neglog", "--which", "arep", "--point", "1,-1"]));
    assert_eq!(record["value"].as_f64().unwrap(), -1.0);

    let record = stdout_json(&run(&["gallery", "neglog", "--which", "arep", "--point", "1,-0.2"]));
    assert_eq!(record["value"], serde_json::json!("inf"));

    let out = run(&["gallery", "neglog", "--sweep", "--box", "-1:1", "--m", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,xstar,f,fstar,fitz,fitzconj,arep,seprep");
    assert_eq!(text.lines().count(), 26);
}

#[test]
fn gallery_idfam_and_l2demo() {
    let record = stdout_json(&run(&["gallery", "idfam", "--g", "power:3", "--point", "2,0"]));
    let expected = 1.0 + 2.0 * 2f64.sqrt() / 3.0;
    assert!((record["value"].as_f64().unwrap() - expected).abs() < 1e-12);

    let out = run(&["gallery", "l2demo", "--n", "100"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,partial_sum,tail_bound");
    assert!(text.lines().last().unwrap().starts_with("100,"));
}

#[test]
fn verify_small_suites_pass() {
    for suite in ["rotation", "truncation"] {
        let out = run(&["verify", suite]);
        assert!(out.status.success(), "suite {suite}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.lines().all(|l| l.starts_with("PASS")));
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    // malformed matrix -> 2
    let bad = op_file("1 2 3\n");
    let out = run(&["fitz", "--op", bad.path().to_str().unwrap(), "--point", "1,1"]);
    assert_eq!(out.status.code(), Some(2));

    // missing file -> 2
    let out = run(&["fitz", "--op", "/no/such/file", "--point", "1,1"]);
    assert_eq!(out.status.code(), Some(2));

    // non-monotone operator -> 2
    let neg = op_file("-1\n");
    let out = run(&["fitz", "--op", neg.path().to_str().unwrap(), "--point", "1,1"]);
    assert_eq!(out.status.code(), Some(2));

    // wrong point arity -> 3
    let op = op_file("1\n");
    let out = run(&["rep", "--kind", "C", "--op", op.path().to_str().unwrap(), "--point", "1,2,3"]);
    assert_eq!(out.status.code(), Some(3));

    // unknown suite -> 2
    let out = run(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));

    // strict non-attainment -> 1: the inner minimizer sits far outside a
    // deliberately tiny search box
    let op2 = op_file("2\n");
    let out = run(&[
        "rep",
        "--kind",
        "B",
        "--op",
        op2.path().to_str().unwrap(),
        "--point",
        "0,0.9",
        "--box",
        "-0.0001:0.0001",
        "--strict",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // without --strict the same call reports attained: false but exits 0
    let out = run(&[
        "rep",
        "--kind",
        "B",
        "--op",
        op2.path().to_str().unwrap(),
        "--point",
        "0,0.9",
        "--box",
        "-0.0001:0.0001",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["attained"], serde_json::json!(false));
}
