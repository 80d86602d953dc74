use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn wfnorm_with_input(args: &[&str], input: &str) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wfnorm"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn wfnorm(args: &[&str]) -> Run {
    wfnorm_with_input(args, "")
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

#[test]
fn eval_and_mass() {
    let r = wfnorm(&["eval", &data("running_example.json"), "ab"]);
    assert_eq!((r.code, r.stdout.trim()), (0, "6"));
    let r = wfnorm(&["eval", &data("normal_form.json"), "ab"]);
    assert_eq!(r.stdout.trim(), "3/14");
    let r = wfnorm(&["eval", &data("running_example.json"), ""]);
    assert_eq!(r.stdout.trim(), "0");
    let r = wfnorm(&["--json", "mass", &data("running_example.json")]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["mass"], "28");
}

#[test]
fn divergent_mass() {
    let dir = tempfile::tempdir().unwrap();
    let loop2 = write(
        dir.path(),
        "loop.json",
        r#"{"alphabet": ["a"], "states": 1, "initial": {"q0": "1"}, "final": {"q0": "1"},
            "transitions": [{"from": "q0", "symbol": "a", "to": "q0", "weight": "2"}]}"#,
    );
    let r = wfnorm(&["mass", loop2.to_str().unwrap()]);
    assert_eq!((r.code, r.stdout.trim()), (0, "diverges"));
    let r = wfnorm(&["normalize", loop2.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("MassDiverges"), "{}", r.stderr);
    let r = wfnorm(&["decompose", loop2.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stderr.contains("zeta 5/2") && r.stderr.contains("epsilon 1/4"), "{}", r.stderr);
}

#[test]
fn check_lists_failing_states() {
    let r = wfnorm(&["check", &data("running_example.json")]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("q0 total 4 residual 3 FAIL"), "{}", r.stdout);
    assert!(r.stderr.starts_with("error[NotStochastic]"), "{}", r.stderr);
    let r = wfnorm(&["--json", "check", &data("running_example.json")]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["failing"][0], "q0");
    let e: Value = serde_json::from_str(&r.stderr).unwrap();
    assert_eq!(e["error"], "NotStochastic");
    assert_eq!(wfnorm(&["check", &data("normal_form.json")]).code, 0);
}

#[test]
fn normalised_output_is_equivalent_to_the_normal_form() {
    let n = wfnorm(&["normalize", &data("running_example.json")]);
    assert_eq!(n.code, 0);
    assert_eq!(n.stderr.trim(), "Z 28");
    let r = wfnorm_with_input(&["equiv", &data("normal_form.json"), "-"], &n.stdout);
    assert_eq!(r.stdout.trim(), "equivalent");
    let r = wfnorm_with_input(&["equiv", &data("normal_form.json"), "-", "--max-len", "6"], &n.stdout);
    assert_eq!(r.stdout.trim(), "equivalent");
}

#[test]
fn equiv_reports_a_witness() {
    let r = wfnorm(&["--json", "equiv", &data("running_example.json"), &data("normal_form.json"), "--max-len", "3"]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["equivalent"], false);
    assert_eq!(v["witness"]["word"], "aa");
    assert_eq!(v["witness"]["left"], "2");
    assert_eq!(v["witness"]["right"], "1/14");
}

#[test]
fn expression_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sre = wfnorm(&["to-sre", &data("normal_form.json")]);
    assert_eq!(sre.code, 0);
    let pa = dir.path().join("pa.json");
    let r = wfnorm(&["from-sre", sre.stdout.trim(), "-o", pa.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = wfnorm(&["equiv", pa.to_str().unwrap(), &data("normal_form.json"), "--exact"]);
    assert_eq!(r.stdout.trim(), "equivalent");
    let r = wfnorm(&["from-sre", "1/2:a + 1/3:b"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("Parse"), "{}", r.stderr);
}

#[test]
fn decompose_writes_the_expression() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.sre");
    let r = wfnorm(&["decompose", &data("running_example.json"), "--epsilon", "1/4", "-o", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("zeta 1\nZ 28"), "{}", r.stdout);
    let s = wfnorm(&["sample", out.to_str().unwrap(), "-n", "200", "--seed", "3"]);
    assert_eq!(s.code, 0, "{}", s.stderr);
    let total: u64 = s.stdout.lines().map(|l| l.split('\t').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 200);
}

#[test]
fn tropical_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(
        dir.path(),
        "t.json",
        r#"{"semiring": "tropical", "alphabet": ["a"], "states": 1,
            "initial": {"q0": "1"}, "final": {"q0": "0"},
            "transitions": [{"from": "q0", "symbol": "a", "to": "q0", "weight": "3"}]}"#,
    );
    let r = wfnorm(&["eval", t.to_str().unwrap(), "aa"]);
    assert_eq!(r.stdout.trim(), "7");
    let out = dir.path().join("res.json");
    let r = wfnorm(&["trop-decompose", t.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "gamma 3\nc0 1");
    let r = wfnorm(&["eval", out.to_str().unwrap(), "aaaa"]);
    assert_eq!(r.stdout.trim(), "0");
    let r = wfnorm(&["trop-decompose", &data("running_example.json")]);
    assert_eq!(r.code, 1);
}

#[test]
fn sampling_is_reproducible() {
    let a = wfnorm(&["--json", "sample", &data("normal_form.json"), "-n", "500", "--seed", "11"]);
    let b = wfnorm(&["--json", "sample", &data("normal_form.json"), "-n", "500", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["generator"], "chacha8");
    assert_eq!(v["draws"], 500);
    let r = wfnorm(&["sample", &data("running_example.json")]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("NotStochastic"));
}

#[test]
fn rho_reports_the_radius() {
    let r = wfnorm(&["rho", &data("running_example.json"), "--tol", "1e-10"]);
    let lines: Vec<&str> = r.stdout.lines().collect();
    let rho: f64 = lines[0].strip_prefix("rho ").unwrap().parse().unwrap();
    assert!((rho - 0.8).abs() < 1e-9);
    assert_eq!(lines[1], "finite-mass true");
}

#[test]
fn error_exit_codes() {
    assert_eq!(wfnorm(&["frobnicate"]).code, 2);
    assert_eq!(wfnorm(&["mass"]).code, 2);
    assert_eq!(wfnorm(&["equiv", "a", "b", "--exact", "--max-len", "3"]).code, 2);
    let r = wfnorm(&["mass", "/nonexistent/file.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.starts_with("error[Io]"));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\n  \"alphabet\": [\"a\"],\n  \"states\": 1,\n  \"initial\": {\"q0\": \"x\"}\n}");
    let r = wfnorm(&["--json", "mass", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    let e: Value = serde_json::from_str(&r.stderr).unwrap();
    assert_eq!(e["error"], "Parse");
    assert!(e["message"].as_str().unwrap().contains("line 4"), "{e}");
    let r = wfnorm(&["eval", &data("running_example.json"), "abc"]);
    assert!(r.stderr.starts_with("error[UnknownSymbol]"));
}
