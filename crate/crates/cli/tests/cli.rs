//! End-to-end checks of the binary: golden curve files, audit round
//! trips, replay determinism and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_macroreal")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("macroreal-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn reproduce_2a_matches_golden() {
    let out = tmp_dir("fig2a");
    let res = run(&[
        "reproduce",
        "--figure",
        "2a",
        "--grid",
        "17",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let got = read(&out.join("curve.csv"));
    let want = include_str!("golden/fig2a_grid17.csv");
    assert_eq!(got, want, "figure 2a curve drifted from the golden file");
}

#[test]
fn reproduce_4_matches_golden() {
    let out = tmp_dir("fig4");
    let res = run(&[
        "reproduce",
        "--figure",
        "4",
        "--grid",
        "17",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let got = read(&out.join("curve.csv"));
    let want = include_str!("golden/fig4_grid17.csv");
    assert_eq!(got, want, "figure 4 curve drifted from the golden file");
}

#[test]
fn audit_round_trips_emitted_dataset() {
    let out = tmp_dir("construct5");
    let res = run(&["construct", "--n", "5", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let audit_out = tmp_dir("audit5");
    let res = run(&[
        "audit",
        "--dataset",
        out.join("dataset.csv").to_str().unwrap(),
        "--out",
        audit_out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let audit: serde_json::Value =
        serde_json::from_str(&read(&audit_out.join("audit.json"))).unwrap();
    assert_eq!(audit["regime"]["regime"], "STD_SAT_EXT_VIOL");
    let pi = audit["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["family"] == "PI")
        .unwrap();
    assert!((pi["min"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    // auditing the emitted dataset reproduces the construct-time reports
    let construction: serde_json::Value =
        serde_json::from_str(&read(&out.join("construction.json"))).unwrap();
    for want in construction["reports"].as_array().unwrap() {
        let fam = &want["family"];
        let got = audit["reports"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| &r["family"] == fam)
            .unwrap_or_else(|| panic!("family {fam} missing from audit"));
        let (a, b) = (
            got["min"].as_f64().unwrap(),
            want["min"].as_f64().unwrap(),
        );
        assert!((a - b).abs() < 1e-12, "{fam}: audit {a} vs construct {b}");
    }
}

#[test]
fn replay_reproduces_outputs_bit_identically() {
    let out = tmp_dir("replay");
    let res = run(&[
        "reproduce",
        "--figure",
        "2b",
        "--grid",
        "33",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let first_curve = read(&out.join("curve.csv"));
    let first_manifest = read(&out.join("manifest.json"));
    let res = run(&["replay", out.join("manifest.json").to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(first_curve, read(&out.join("curve.csv")));
    assert_eq!(first_manifest, read(&out.join("manifest.json")));
}

#[test]
fn shots_command_runs_plan() {
    let c5 = tmp_dir("c5-for-shots");
    let res = run(&[
        "construct",
        "--n",
        "5",
        "--out",
        c5.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(res.status.success());
    let construction: serde_json::Value =
        serde_json::from_str(&read(&c5.join("construction.json"))).unwrap();
    let mut experiments = Vec::new();
    for i in 0..5 {
        experiments.push(serde_json::json!({"time_indices": [i]}));
    }
    for i in 0..5 {
        for j in (i + 1)..5 {
            experiments.push(serde_json::json!({"time_indices": [i, j]}));
        }
    }
    let plan = serde_json::json!({
        "model": construction["hamiltonian_model"],
        "experiments": experiments,
        "shots": 50_000,
        "seed": 99,
    });
    let plan_path = c5.join("plan.json");
    std::fs::write(&plan_path, serde_json::to_string(&plan).unwrap()).unwrap();
    let shots_out = tmp_dir("shots");
    let res = run(&[
        "shots",
        "--plan",
        plan_path.to_str().unwrap(),
        "--out",
        shots_out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let reports: serde_json::Value =
        serde_json::from_str(&read(&shots_out.join("reports.json"))).unwrap();
    let pentagon = reports["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["report"]["family"] == "PI")
        .unwrap();
    let min = pentagon["report"]["min"].as_f64().unwrap();
    assert!((min + 0.5).abs() < 0.05, "pentagon estimate {min}");
    assert!(pentagon["significance"].as_f64().unwrap() < -5.0);
    // estimated CSV carries the stderr column
    let csv = read(&shots_out.join("estimated.csv"));
    assert!(csv.lines().nth(1).unwrap().contains("stderr"));
}

#[test]
fn exit_codes() {
    // bad figure id -> 2
    let res = run(&["reproduce", "--figure", "7x", "--out", "/tmp/na"]);
    assert_eq!(res.status.code(), Some(2));
    // bad construction size -> 2
    let res = run(&["construct", "--n", "6", "--out", "/tmp/na"]);
    assert_eq!(res.status.code(), Some(2));
    // missing file -> 2
    let res = run(&["audit", "--dataset", "/nonexistent/ds.json"]);
    assert_eq!(res.status.code(), Some(2));
    // malformed spec file -> 2 with line diagnostics
    let dir = tmp_dir("badspec");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("spec.json");
    std::fs::write(&bad, "{\"model\": {}}").unwrap();
    let res = run(&["scan", "--spec", bad.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("spec.json:"), "diagnostics missing: {err}");
}

#[test]
fn luders_dim2_ho3_within_bound() {
    let out = tmp_dir("luders");
    let res = run(&[
        "luders",
        "--family",
        "ho3",
        "--dims",
        "2",
        "--trials",
        "4000",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let doc: serde_json::Value = serde_json::from_str(&read(&out.join("luders.json"))).unwrap();
    assert_eq!(doc["bound"], -1.0);
    assert_eq!(doc["per_dim"][0]["within_bound"], true);
    let worst = doc["per_dim"][0]["worst"].as_f64().unwrap();
    assert!(worst >= -1.0 - 1e-9 && worst < -0.8, "worst {worst}");
}
