use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hamsix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamsix")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("structured output is json")
}

fn emit(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path = path.to_str().unwrap().to_string();
    let mut all = vec!["catalog"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--emit", &path]);
    hamsix(&all);
    path
}

#[test]
fn catalog_exit_codes() {
    assert_eq!(code(&hamsix(&["catalog", "--type", "1"])), 0);
    assert_eq!(code(&hamsix(&["catalog", "--type", "6a", "--g", "1", "--g1", "1"])), 2);
    assert_eq!(code(&hamsix(&["catalog", "--type", "2", "--same-level"])), 2);
    assert_eq!(code(&hamsix(&["catalog", "--type", "9"])), 1);
    assert_eq!(code(&hamsix(&["catalog", "--type", "1", "--k", "1"])), 1);
}

#[test]
fn infeasible_text_names_the_rules() {
    let o = hamsix(&["catalog", "--type", "6a", "--g", "1", "--g1", "1"]);
    let text = stdout(&o);
    assert!(text.contains("infeasible"), "{text}");
    assert!(text.contains("representability"), "{text}");
}

#[test]
fn emitted_document_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = emit(dir.path(), "six_b.toml", &["--type", "6b", "--k", "0"]);
    let direct = json(&hamsix(&["catalog", "--type", "6b", "--k", "0", "--format", "structured"]));
    let again = hamsix(&["verify", &path, "--format", "structured"]);
    let again_json = json(&again);
    for key in ["verdict", "run", "constraints", "sample", "certificate", "profile"] {
        assert_eq!(direct[key], again_json[key], "{key}");
    }
    assert_eq!(code(&again), if direct["verdict"] == "feasible" { 0 } else { 2 });
}

#[test]
fn structured_output_uses_exact_fractions() {
    let o = hamsix(&["catalog", "--type", "5", "--format", "structured", "--normalize", "t0=1/3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], "hamsix-report/1");
    assert_eq!(v["verdict"], "feasible");
    let sample = v["sample"].as_object().expect("sample is a map");
    assert_eq!(sample["t0"], "1/3");
    assert!(sample.values().all(|x| x.is_string()));
}

#[test]
fn malformed_documents_fail() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[min]\nkind = \"cone\"\n").unwrap();
    let o = hamsix(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("error"));
    let missing = dir.path().join("missing.toml");
    assert_eq!(code(&hamsix(&["verify", missing.to_str().unwrap()])), 1);
    assert_eq!(code(&hamsix(&["verify", bad.to_str().unwrap(), "--normalize", "t0=-1"])), 1);
}

#[test]
fn directory_batch_reports_the_worst_outcome() {
    let dir = tempfile::tempdir().unwrap();
    emit(dir.path(), "a.toml", &["--type", "1"]);
    emit(dir.path(), "b.toml", &["--type", "4"]);
    let d = dir.path().to_str().unwrap();
    let o = hamsix(&["verify", d, "--format", "structured"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o).as_array().map(Vec::len), Some(2));

    emit(dir.path(), "c.toml", &["--type", "6a", "--g", "1", "--g1", "1"]);
    assert_eq!(code(&hamsix(&["verify", d])), 2);

    fs::write(dir.path().join("d.toml"), "not toml [").unwrap();
    let o = hamsix(&["verify", d, "--format", "structured"]);
    assert_eq!(code(&o), 1);
    let items = json(&o);
    let items = items.as_array().unwrap();
    assert_eq!(items.len(), 4);
    assert!(items[3]["error"].is_string());
}

#[test]
fn no_normalize_keeps_the_scale_free() {
    let o = hamsix(&["catalog", "--type", "1", "--no-normalize", "--format", "structured"]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["normalization"].is_null());
}
