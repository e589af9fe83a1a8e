//! End-to-end runs of the compiled binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tourninv"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn binary");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn inv_of_a_three_cycle() {
    let o = run(&["inv", "3:101"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("inv = 1\n"));
}

#[test]
fn json_output_leads_with_the_schema() {
    let o = run(&["--json", "tmr", "3:101"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "tourninv/1");
    assert_eq!(v["value"], 1);
    assert!(stdout(&o).trim_start().starts_with("{\n  \"schema\""));
}

#[test]
fn emitted_certificates_check_out() {
    let cert = stdout(&run(&["--json", "inv", "5:1011010011"], None));
    let o = run(&["check", "5:1011010011", "--cert", "-"], Some(&cert));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("valid"));
}

#[test]
fn bad_certificate_exits_with_one() {
    let cert = r#"{"kind":"family","value":0,"family":[],"order":[0,1,2]}"#;
    let o = run(&["check", "3:101", "--cert", "-"], Some(cert));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_with_two() {
    let o = run(&["inv", "bogus"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn exhausted_budget_exits_with_three() {
    let o = run(&["--node-limit", "1", "inv", "7:001111100000000000000"], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn stdin_batches_one_graph_per_line() {
    let o = run(&["inv", "-"], Some("3:101\n3:111\n"));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("inv = 1") && text.contains("inv = 0"));
}

#[test]
fn enumerate_lists_isomorphism_classes() {
    let o = run(&["enumerate", "5", "--iso"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 12);
}

#[test]
fn verify_theorems_is_clean_and_reproducible() {
    let args = ["--json", "--workers", "2", "verify-theorems", "--max-n", "5"];
    let first = run(&args, None);
    assert_eq!(first.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    assert_eq!(first.stdout, run(&args, None).stdout);
    let serial = ["--json", "verify-theorems", "--max-n", "5"];
    assert_eq!(first.stdout, run(&serial, None).stdout);
}

#[test]
fn sampled_schur_scan_is_seeded() {
    let args = ["--json", "--seed", "7", "scan", "schur", "--n1", "3", "--n2", "3", "--samples", "50"];
    let a = run(&args, None);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, run(&args, None).stdout);
}
