use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flgauge")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let out = run(&a);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn mazur_numbers_table() {
    let (code, v) = json(&["mazur-numbers", "--p", "3", "--max", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "flgauge.mazur-numbers/1");
    assert_eq!(v["values"], serde_json::json!([1, 2, 2, 3]));
}

#[test]
fn syn_on_the_unit() {
    let out = run(&["syn", "--in", &fixture("unit.fl"), "--weight", "1"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "H0 = ()\nH1 = (3^4)\n");
    let (code, v) = json(&["syn", "--in", &fixture("unit.fl"), "--weight", "0"]);
    assert_eq!(code, 0);
    assert_eq!((v["h0"].clone(), v["h1"].clone()), (serde_json::json!([4]), serde_json::json!([4])));
}

#[test]
fn syn_crosscheck_and_weight_range() {
    let (code, v) = json(&["syn", "--in", &fixture("ext_p3_t1.fl"), "--weight", "1", "--crosscheck"]);
    assert_eq!(code, 0);
    assert_eq!(v["crosscheck"]["agrees"], true);
    let (code, v) = json(&["syn", "--in", &fixture("unit.fl"), "--weight", "2"]);
    assert_eq!(code, 2);
    assert_eq!(v["schema"], "flgauge.error/1");
}

#[test]
fn verify_divisibility_reports_z() {
    let out = run(&["verify", "--p", "2", "--witt-len", "3", "--suite", "divisibility"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("z = (1/2*v+^2, 1/8*v+^4"), "{text}");
    assert!(text.ends_with("result: pass\n"));
}

#[test]
fn verify_all_passes_for_small_parameters() {
    let (code, v) = json(&["verify", "--p", "3", "--witt-len", "2", "--suite", "all"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 8);
}

#[test]
fn verify_overflow_is_a_failure_not_a_pass() {
    let (code, v) = json(&["verify", "--p", "2", "--witt-len", "3", "--window", "10", "--suite", "psi-maz"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(run(&["verify", "--p", "4", "--suite", "pd"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--p", "3", "--window", "2", "--suite", "psi-maz"]).status.code(), Some(2));
    assert_eq!(run(&["mazur-numbers", "--p", "3"]).status.code(), Some(2));
    assert_eq!(run(&["fl", "check", "--in", "/nonexistent/file.fl"]).status.code(), Some(2));
}

#[test]
fn parse_errors_are_structured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.fl");
    std::fs::write(&path, "flgauge-module 1\np 3\nN 2\nf 1\nkind fl\nwmax 1\npiece 0 free 2\npiece 1 free 2\nvminus 1 2x3\n").unwrap();
    let (code, v) = json(&["fl", "check", "--in", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["kind"], "Parse");
    assert_eq!(v["line"], 9);
    assert!(v["message"].as_str().unwrap().contains("degree 1"));
}

#[test]
fn fl_check_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("notfl.fl");
    // k{2} with φ'_2 = 0 is not FL
    let t = std::fs::read_to_string(fixture("k2_p3.fl")).unwrap().replace("phi 2 1x1\n  1\n", "phi 2 1x1\n  0\n");
    std::fs::write(&path, t).unwrap();
    let (code, v) = json(&["fl", "check", "--in", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
    let (code, _) = json(&["fl", "check", "--in", &fixture("ext_p3_t1.fl")]);
    assert_eq!(code, 0);
}

#[test]
fn fl_operations() {
    let (_, v) = json(&["fl", "ext1", "--in", &fixture("k2_p3.fl"), "--in2", &fixture("ext_p3_split.fl")]);
    assert_eq!((v["hom"].clone(), v["ext1"].clone()), (serde_json::json!(1), serde_json::json!(2)));
    let (code, v) = json(&["fl", "kernel", "--in", &fixture("ext_to_k2.morph")]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true);
    assert!(v["module"].as_str().unwrap().contains("piece 0 free 1\n"));

    let lift = run(&["fl", "lift", "--in", &fixture("ext_p3_t1.fl")]);
    assert_eq!(lift.status.code(), Some(0));
    let twist = run(&["fl", "twist", "--in", &fixture("unit.fl"), "--i", "1"]);
    assert_eq!(String::from_utf8_lossy(&twist.stdout), std::fs::read_to_string(fixture("w1.fl")).unwrap());
}

#[test]
fn sen_commands() {
    let (_, v) = json(&["sen", "ext-class", "--in", &fixture("ext_p3_t1.fl")]);
    assert_eq!(v["t"], 1);
    assert_eq!(v["splits"], false);
    let (_, v) = json(&["sen", "ext-class", "--in", &fixture("ext_f9_gen.fl")]);
    assert_eq!(v["t"], serde_json::json!([0, 1]));
    let (_, v) = json(&["sen", "alpha", "--in", &fixture("ext_p3_t1.fl")]);
    assert_eq!(v["alpha"], serde_json::json!([[0, 1], [0, 0]]));
    assert_eq!(v["square_zero"], true);

    let dir = tempfile::tempdir().unwrap();
    let applied = dir.path().join("applied.fl");
    let out = run(&["sen", "apply", "--in", &fixture("ext_p3_t1.fl")]);
    std::fs::write(&applied, &out.stdout).unwrap();
    let (_, v) = json(&["sen", "ext-class", "--in", applied.to_str().unwrap()]);
    assert_eq!(v["t"], 0);
    assert_eq!(v["splits"], true);
    let (code, v) = json(&["sen", "theta", "--in", &fixture("ext_p3_t1.fl")]);
    assert_eq!(code, 0);
    assert_eq!(v["eigenspaces_match"], true);
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        vec!["verify", "--p", "2", "--witt-len", "2", "--suite", "witt-identities", "--json"],
        vec!["sen", "theta", "--in", &fixture("ext_f9_gen.fl"), "--json"],
        vec!["selftest", "--only", "1,4", "--json"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn selftest_subset() {
    let out = run(&["selftest", "--only", "1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("criterion")).count(), 3);
}
