use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}

fn ccrush(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccrush")).args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = ccrush(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, source: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, source).unwrap();
    p
}

#[test]
fn analyze_lists_interactions() {
    let f = corpus("running-example.ccl");
    let v = json_of(&["analyze", path_str(&f), "--json"]);
    let got: Vec<Vec<String>> = serde_json::from_value(v["interactions"].clone()).unwrap();
    let mut want: Vec<Vec<String>> =
        ["A", "B", "C", "D", "E", "F", "G", "H", "I"].iter().map(|o| vec![o.to_string()]).collect();
    want.extend([vec!["A".into(), "B".into()], vec!["A".into(), "C".into()], vec!["D".into(), "E".into(), "F".into()]]);
    assert_eq!(got, want);
}

#[test]
fn analyze_without_options() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "plain.ccl", "fn main() { work(5); }\n");
    let v = json_of(&["analyze", path_str(&f), "--json"]);
    assert_eq!(v["interactions"], Value::Array(vec![]));
}

#[test]
fn json_output_is_reproducible() {
    let f = corpus("running-example.ccl");
    for cmd in ["analyze", "regions", "compress", "model", "compare"] {
        let a = ccrush(&[cmd, path_str(&f), "--json"]);
        let b = ccrush(&[cmd, path_str(&f), "--json", "--jobs", "4"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn model_renders_the_global_model() {
    let f = corpus("running-example.ccl");
    let v = json_of(&["model", path_str(&f), "--json"]);
    assert_eq!(v["rendered"], "1 + 3.1A + 0.2B + 0.3C + 0.4D + 0.5E + 0.6F + 0.7G + 0.8H + 0.9I + 3AB + 3AC + 5DEF");
    let short = json_of(&["model", path_str(&corpus("running-example-short.ccl")), "--json"]);
    let influenced: Vec<&Value> =
        short["classification"].as_array().unwrap().iter().filter(|e| e["category"] == "influenced").collect();
    assert_eq!(influenced.len(), 2);
    assert!(influenced.iter().all(|e| e["max_degree"] == 2));
}

#[test]
fn constant_program_has_a_constant_model() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "const.ccl", "options A;\nfn main() { a := opt(\"A\"); work(2.5); }\n");
    let v = json_of(&["model", path_str(&f), "--json"]);
    assert_eq!(v["rendered"], "0.0025");
    assert_eq!(v["global"]["terms"].as_array().unwrap().len(), 1);
}

#[test]
fn ground_truth_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let f = corpus("running-example.ccl");
    let args = ["groundtruth", path_str(&f), "--json", "--timings", "--cache", path_str(&cache)];
    let first = json_of(&args);
    assert_eq!(first["metadata"]["cached"], false);
    assert_eq!(first["rows"].as_array().unwrap().len(), 1024);
    let files: Vec<_> = std::fs::read_dir(&cache).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files.len(), 1);
    let name = files[0].to_str().unwrap().to_string();
    assert!(name.ends_with(".gt.json") && name.len() == 64 + 8, "{name}");
    let second = json_of(&args);
    assert_eq!(second["metadata"]["cached"], true);
    assert_eq!(first["rows"], second["rows"]);
}

#[test]
fn ground_truth_of_an_option_free_program() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "plain.ccl", "fn main() { work(5); }\n");
    let v = json_of(&["groundtruth", path_str(&f), "--json"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["ms"], 5);
}

#[test]
fn compare_reports_costs() {
    let f = corpus("running-example.ccl");
    let v = json_of(&["compare", path_str(&f), "--json"]);
    let row = |k: &str| v["approaches"].as_array().unwrap().iter().find(|a| a["approach"] == k).unwrap().clone();
    assert_eq!(row("cc")["cost"], 8);
    assert_eq!(row("cc")["mape"], 0.0);
    assert_eq!(row("bf")["cost"], 1024);
    assert_eq!(row("bf")["mape"], Value::Null);
    assert!(v.get("metadata").is_none());

    let only_bf = json_of(&["compare", path_str(&f), "--json", "--approaches", "bf"]);
    assert_eq!(only_bf["approaches"].as_array().unwrap().len(), 1);
    assert_eq!(only_bf["approaches"][0]["mape"], Value::Null);
}

#[test]
fn deep_loop_event_reduction() {
    let f = corpus("deep-loop.ccl");
    let v = json_of(&["compare", path_str(&f), "--json", "--approaches", "cc"]);
    let opt = v["approaches"][0]["events_optimized"].as_u64().unwrap();
    let unopt = v["approaches"][0]["events_unoptimized"].as_u64().unwrap();
    assert!(unopt >= 10 * opt, "{unopt} vs {opt}");
}

#[test]
fn csv_and_markdown_outputs() {
    let f = corpus("running-example-short.ccl");
    let csv = String::from_utf8(ccrush(&["compress", path_str(&f), "--csv"]).stdout).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("A,B,C,D,E,F,G,H,I,J\n"));
    let md = String::from_utf8(ccrush(&["run", path_str(&f), "--config", "A,B,C"]).stdout).unwrap();
    assert!(md.contains("End-to-end: 10000 ms"), "{md}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.ccl", "fn main() { x := ; }\n");
    let out = ccrush(&["analyze", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error"));

    let missing = ccrush(&["analyze", path_str(&dir.path().join("nope.ccl"))]);
    assert_eq!(missing.status.code(), Some(2));

    let unknown = ccrush(&["run", path_str(&corpus("running-example-short.ccl")), "--config", "Z"]);
    assert_eq!(unknown.status.code(), Some(2));

    let names: Vec<String> = (0..23).map(|i| format!("O{i}")).collect();
    let big = write(dir.path(), "big.ccl", &format!("options {};\nfn main() {{ work(1); }}\n", names.join(", ")));
    let capped = ccrush(&["groundtruth", path_str(&big)]);
    assert_eq!(capped.status.code(), Some(1));
}
