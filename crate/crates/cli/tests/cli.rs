use std::process::{Command, Output};

use serde_json::Value;

fn nodaltree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodaltree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn verdict<'a>(v: &'a Value, check: &str) -> &'a str {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check"] == check)
        .unwrap()["verdict"]
        .as_str()
        .unwrap()
}

#[test]
fn star_verify() {
    let out = nodaltree(&[
        "verify",
        "--generate",
        "star",
        "--n",
        "5",
        "--weights",
        "unit",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["spectrum_simple"], false);
    assert_eq!(verdict(&v, "davies_bound"), "pass");
    assert_eq!(verdict(&v, "nodal_count"), "inapplicable");
    assert_eq!(verdict(&v, "interlacing"), "inapplicable");
    assert_eq!(verdict(&v, "perron_frobenius"), "pass");
    assert_eq!(v["config"]["seed"], 0);
}

#[test]
fn path2_spectrum() {
    let out = nodaltree(&["spectrum", "--generate", "path", "--n", "2", "--weights", "unit"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let values: Vec<f64> = v["spectrum"]["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(values.len(), 2);
    assert!(values[0].abs() < 1e-12 && (values[1] - 2.0).abs() < 1e-12);
    assert_eq!(v["config"]["command"], "spectrum");
}

#[test]
fn batch_is_byte_identical() {
    let args = ["batch", "--seed", "7", "--count", "200", "--format", "json"];
    let a = nodaltree(&args);
    let b = nodaltree(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["summary"]["failures"].as_array().unwrap().len(), 0);
    let parallel = nodaltree(&[
        "batch", "--seed", "7", "--count", "200", "--format", "json", "--jobs", "3",
    ]);
    assert_eq!(json(&parallel)["summary"], v["summary"]);
}

#[test]
fn batch_text_table() {
    let out = nodaltree(&["batch", "--seed", "7", "--count", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# config: {\"command\":\"batch\""));
    assert!(text.contains("interlacing"));
}

#[test]
fn batch_config_override() {
    let dir = std::env::temp_dir().join(format!("nodaltree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("batch.json");
    std::fs::write(&path, r#"{"count": 5, "n_max": 6, "seed": 3}"#).unwrap();
    let out = nodaltree(&["batch", "--config", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["count"], 5);
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["summary"]["corpus"]["n_max"], 6);

    std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(
        nodaltree(&["batch", "--config", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn generate_output_round_trips_through_input() {
    let dir = std::env::temp_dir().join(format!("nodaltree-gen-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (format, file) in [("json", "tree.json"), ("dot", "tree.dot")] {
        let path = dir.join(file);
        let gen = nodaltree(&[
            "generate",
            "--generate",
            "random",
            "--n",
            "10",
            "--weights",
            "uniform:0.5:2",
            "--potential",
            "uniform:-1:1",
            "--seed",
            "42",
            "--format",
            format,
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(gen.status.code(), Some(0));
        let from_file = nodaltree(&["spectrum", "--input", path.to_str().unwrap()]);
        let generated = nodaltree(&[
            "spectrum",
            "--generate",
            "random",
            "--n",
            "10",
            "--weights",
            "uniform:0.5:2",
            "--potential",
            "uniform:-1:1",
            "--seed",
            "42",
        ]);
        assert_eq!(json(&from_file)["spectrum"], json(&generated)["spectrum"], "{format}");
    }
}

#[test]
fn nodal_dot_and_json() {
    let dot = nodaltree(&[
        "nodal",
        "--generate",
        "path",
        "--n",
        "4",
        "--index",
        "3",
        "--format",
        "dot",
    ]);
    assert_eq!(dot.status.code(), Some(0));
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.starts_with("// config: "));
    assert!(text.contains("graph"));
    let v = json(&nodaltree(&["nodal", "--generate", "path", "--n", "4", "--index", "3"]));
    assert_eq!(v["nodal"]["sign_graphs"].as_array().unwrap().len(), 3);
    assert_eq!(v["nodal"]["zero_count"], 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(nodaltree(&["verify"]).status.code(), Some(2));
    assert_eq!(nodaltree(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        nodaltree(&["spectrum", "--generate", "path", "--n", "3", "--eps-z", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nodaltree(&["nodal", "--generate", "path", "--n", "3", "--index", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nodaltree(&["generate", "--generate", "path", "--n", "3", "--format", "text"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nodaltree(&["generate", "--generate", "path", "--n", "3", "--weights", "uniform:2:1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn failing_check_exits_1() {
    // With eps_z = 2 every vertex counts as zero, so the Perron check fails.
    let out = nodaltree(&["verify", "--generate", "path", "--n", "4", "--eps-z", "2"]);
    assert_eq!(out.status.code(), Some(1));
}
