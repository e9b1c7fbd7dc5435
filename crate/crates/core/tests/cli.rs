//! End-to-end runs of the `modlab` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn modlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn poletsky_scenario_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("poletsky.json");
    let out = modlab(&["verify-poletsky", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = read_json(&dir.path().join("report.json"));
    assert_eq!(rep["verdict"]["pass"], Value::Bool(true));
    assert!(dir.path().join("tables/poletsky.csv").exists());
    assert!(dir.path().join("plots/poletsky_bars.svg").exists());
}

#[test]
fn reversed_shell_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("poletsky.json");
    let out = modlab(
        &["verify-poletsky", "--config", cfg.to_str().unwrap(), "--set", "poletsky.shells=[[0.6,0.3]]"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr: Value = serde_json::from_slice(&out.stderr).unwrap();
    let errs = read_json(&dir.path().join("errors.json"));
    assert_eq!(stderr, errs);
    let list = errs["errors"].as_array().unwrap();
    assert!(list.iter().any(|e| e["field"] == "poletsky.shells.0"), "{errs}");
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn missing_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = modlab(&["modulus", "--config", "/nonexistent/scenario.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("errors.json").exists());
}

#[test]
fn unknown_scenario_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{ "command": "zoo-dump", "zoo": { "sample": 3 } }"#).unwrap();
    let out = modlab(&["zoo-dump", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_zoo_dump_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("zoo.json");
    let out = modlab(&["zoo-dump", "--config", cfg.to_str().unwrap(), "--set", "zoo.samples=0"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("tables/zoo.csv")).unwrap();
    assert_eq!(text, "x0,x1,f0,f1,k_o,k_o_numeric,q\n");
}

#[test]
fn unit_scaling_dumps_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("zoo.json");
    let out = modlab(
        &[
            "zoo-dump",
            "--config",
            cfg.to_str().unwrap(),
            "--set",
            "map.kind=scaling",
            "--set",
            "map.m=1",
            "--set",
            "zoo.samples=20",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, rows) = csv_rows(&dir.path().join("tables/zoo.csv"));
    assert_eq!(rows.len(), 20);
    for r in rows {
        assert_eq!(r[0], r[2]);
        assert_eq!(r[1], r[3]);
        assert!((r[4] - 1.0).abs() < 1e-12 && (r[5] - 1.0).abs() < 1e-6);
    }
}

#[test]
fn zoo_dump_outer_dilatation_agrees_with_finite_differences() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario("zoo.json");
    let out = modlab(&["zoo-dump", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&dir.path().join("tables/zoo.csv"));
    let k = header.iter().position(|h| h == "k_o").unwrap();
    assert_eq!(rows.len(), 100);
    for r in rows {
        assert!((r[k] - r[k + 1]).abs() <= 1e-3 * r[k], "{} vs {}", r[k], r[k + 1]);
    }
}

#[test]
fn reports_are_reproducible_and_record_overrides() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = scenario("equicontinuity.json");
    let args = ["equicontinuity", "--config", cfg.to_str().unwrap(), "--seed", "7", "--set", "scan.r0=0.3"];
    assert_eq!(modlab(&args, a.path()).status.code(), Some(0));
    assert_eq!(modlab(&args, b.path()).status.code(), Some(0));
    let ra = std::fs::read(a.path().join("report.json")).unwrap();
    let rb = std::fs::read(b.path().join("report.json")).unwrap();
    assert!(ra == rb, "report.json differs between identical runs");
    let rep: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(rep["seed"], 7);
    assert_eq!(rep["scenario"]["scan"]["r0"], 0.3);
    {
        let t = "equicontinuity.csv";
        let ta = std::fs::read(a.path().join("tables").join(t)).unwrap();
        assert_eq!(ta, std::fs::read(b.path().join("tables").join(t)).unwrap());
    }
}

#[test]
fn thread_count_does_not_change_the_report() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = scenario("rectangle.json");
    let c = cfg.to_str().unwrap();
    assert_eq!(modlab(&["modulus", "--config", c, "--threads", "1"], a.path()).status.code(), Some(0));
    assert_eq!(modlab(&["modulus", "--config", c, "--threads", "4"], b.path()).status.code(), Some(0));
    let mut ra = read_json(&a.path().join("report.json"));
    let mut rb = read_json(&b.path().join("report.json"));
    ra["scenario"]["threads"] = Value::Null;
    rb["scenario"]["threads"] = Value::Null;
    assert_eq!(ra, rb);
}
