use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsuper")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn verify_osp12_passes() {
    let out = run(&["verify", "--algebra", "osp:1|2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out);
    assert_eq!(doc["report"]["c0"], "-1/8");
    assert_eq!(doc["report"]["epsilon"], "0");
    assert_eq!(doc["relation_suite_version"], "wsuper-relations-1");
    assert_eq!(doc["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn verify_spo23_with_whittaker_battery() {
    let out = run(&["verify", "--algebra", "spo:2|3", "--truncate", "5", "--lambda", "2/3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let doc = report(&out);
    let names: Vec<&str> = doc["report"]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for want in ["critical-square", "cartan-presentation", "c-theta-on-top", "wh-intertwines", "wh-dims"] {
        assert!(names.contains(&want), "{}", want);
    }
}

#[test]
fn exceptional_family_is_unsupported() {
    let out = run(&["verify", "--algebra", "G3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(report(&out)["report"]["error"].as_str().unwrap().contains("unsupported family"));
}

#[test]
fn unknown_flag_is_rejected() {
    let out = run(&["verify", "--algebra", "osp:1|2", "--colour", "red"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn osp12_module() {
    let out = run(&["module", "--algebra", "osp:1|2", "--lambda", ""]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["report"];
    assert_eq!(r["weight_dims"], serde_json::json!([[[], "0", 2]]));
    assert_eq!(r["psi_C"], "-1/8");
    assert_eq!(r["type"], "Q");
    assert_eq!(r["singular_vectors"], serde_json::json!([]));
}

#[test]
fn mismatched_level_is_a_precondition_failure() {
    let out = run(&["module", "--algebra", "spo:2|3", "--lambda", "1", "--c", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(report(&out)["report"]["error"].as_str().unwrap().contains("matchable level is -1/2"));
}

#[test]
fn type_even_module_needs_a_level() {
    assert_eq!(run(&["module", "--algebra", "sl:2|1", "--lambda", "1"]).status.code(), Some(3));
    let out = run(&["module", "--algebra", "sl:2|1", "--lambda", "1", "--c", "1/3", "--truncate", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["report"]["type"], "M");
}

#[test]
fn output_is_deterministic() {
    let args = ["module", "--algebra", "spo:2|3", "--lambda", "1", "--truncate", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn blocks_group_reflected_weights() {
    let out = run(&["blocks", "--algebra", "spo:2|3", "--lambda", "1/3;7;2/3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["report"];
    assert_eq!(r["blocks"], serde_json::json!([[0, 2], [1]]));
}

#[test]
fn table_format() {
    let out = run(&["grade", "--algebra", "spo:2|3", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("report.r ") && l.trim_end().ends_with('3')));
}
