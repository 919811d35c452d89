use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rbg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbg")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = rbg(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const TRAIN: &str = r#"{"points":[{"h_ext":35},{"h_ext":10}],"seed":0,"requested":2,"retained":2}"#;
const TEST: &str = r#"{"points":[{"h_ext":20}],"seed":0,"requested":1,"retained":1}"#;

fn campaigns(dir: &Path) {
    fs::write(dir.join("train.json"), TRAIN).unwrap();
    fs::write(dir.join("test.json"), TEST).unwrap();
    ok(dir, &["campaign", "--plan", "train.json", "--out", "train"]);
    ok(dir, &["campaign", "--plan", "test.json", "--out", "test"]);
}

#[test]
fn simulate_writes_a_trajectory_csv() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["simulate", "--t-final", "60", "--input", "h_ext=20", "--out", "out/sim.csv"]);
    let text = fs::read_to_string(d.path().join("out/sim.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 62);
    assert!(lines[0].starts_with("time_s,T_1,T_2"));
    assert!(lines[0].ends_with("Q_10"));
    let stdout = ok(d.path(), &["simulate", "--t-final", "2"]);
    assert_eq!(stdout.lines().count(), 4);
}

#[test]
fn parameters_and_series_inputs() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("p.json"), r#"{"t_cab": -18.0}"#).unwrap();
    let flat = ok(d.path(), &["simulate", "--t-final", "5", "--params", "p.json"]);
    assert!(flat.lines().nth(6).unwrap().starts_with("5,-18,-18,-18,-18,-18,-18,-18,"));

    fs::write(d.path().join("h.csv"), "time_s,h\n0,10\n100,30\n").unwrap();
    let a = ok(d.path(), &["simulate", "--t-final", "100", "--series", "h_ext=h.csv"]);
    let b = ok(d.path(), &["simulate", "--t-final", "100", "--input", "h_ext=20"]);
    assert_ne!(a, b);
    let short = rbg(d.path(), &["simulate", "--t-final", "200", "--series", "h_ext=h.csv"]);
    assert!(!short.status.success());
}

#[test]
fn doe_is_reproducible_and_filtered() {
    let d = tempfile::tempdir().unwrap();
    let a: Value = serde_json::from_str(&ok(d.path(), &["doe", "--n", "200", "--seed", "5"])).unwrap();
    let b: Value = serde_json::from_str(&ok(d.path(), &["doe", "--n", "200", "--seed", "5"])).unwrap();
    assert_eq!(a, b);
    assert_eq!(a["requested"], 200);
    let retained = a["retained"].as_u64().unwrap();
    assert!(retained < 200 && retained > 100);
    assert_eq!(a["points"].as_array().unwrap().len() as u64, retained);
    let raw: Value = serde_json::from_str(&ok(d.path(), &["doe", "--n", "20", "--no-filter"])).unwrap();
    assert_eq!(raw["points"].as_array().unwrap().len(), 20);
    assert_eq!(raw["points"][0].as_object().unwrap().len(), 7);
}

#[test]
fn reduce_pipeline_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    campaigns(p);
    let index = json(&p.join("train/campaign.json"));
    assert_eq!(index["files"].as_array().unwrap().len(), 2);

    ok(p, &["reduce", "--campaign", "train", "--n-modes", "4", "--seed", "3", "--out", "a.json"]);
    ok(p, &["reduce", "--campaign", "train", "--n-modes", "4", "--seed", "3", "--out", "b.json"]);
    assert_eq!(fs::read(p.join("a.json")).unwrap(), fs::read(p.join("b.json")).unwrap());

    let art = json(&p.join("a.json"));
    assert_eq!(art["partition"]["primary_theta"], serde_json::json!([3, 4, 5, 7]));
    assert_eq!(art["partition"]["secondary_theta"], serde_json::json!([2, 6]));
    assert_eq!(art["provenance"]["seed"], 3);
    assert_eq!(art["provenance"]["deim_order"], serde_json::json!([7, 3, 5, 4]));
    assert_eq!(art["coupling"]["weights"]["rows"], 2);

    ok(p, &["run-reduced", "--artifact", "a.json", "--plan", "test.json", "--reconstruct", "--out", "hyb"]);
    ok(p, &["evaluate", "--reference", "test", "--approx", "hyb", "--out", "report.json", "--plot", "t.svg"]);
    let report = json(&p.join("report.json"));
    assert!(report["mae"].as_f64().unwrap() <= 0.2);
    assert!(report["max_ae"].as_f64().unwrap() <= 1.0);
    assert_eq!(report["n_variables"], 7);
    let svg = fs::read_to_string(p.join("t.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains(report["worst_variable"].as_str().unwrap()));

    // without reconstruction the tertiary wall temperature is absent
    ok(p, &["run-reduced", "--artifact", "a.json", "--t-final", "10", "--out", "plain.csv"]);
    let header = fs::read_to_string(p.join("plain.csv")).unwrap();
    assert!(header.starts_with("time_s,T_2,"));
}

#[test]
fn reduce_options() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    campaigns(p);
    ok(p, &["reduce", "--campaign", "train", "--eps-tol", "300", "--activation", "relu", "--out", "e.json"]);
    let art = json(&p.join("e.json"));
    assert_eq!(art["basis"]["rule"]["epsilon"], 300.0);
    assert_eq!(art["coupling"]["activation"], "relu");

    ok(p, &["reduce", "--campaign", "train", "--n-stab", "sweep", "--validation", "test", "--out", "s.json"]);
    let art = json(&p.join("s.json"));
    assert_eq!(art["provenance"]["n_stab_sweep"].as_array().unwrap().len(), 4);

    let bad = rbg(p, &["reduce", "--campaign", "train", "--n-stab", "sweep"]);
    assert_eq!(bad.status.code(), Some(1));
    let both = rbg(p, &["reduce", "--campaign", "train", "--n-modes", "3", "--eps-tol", "1"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn bench_reports_matching_step_counts() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    campaigns(p);
    ok(p, &["reduce", "--campaign", "train", "--out", "a.json"]);
    let r: Value = serde_json::from_str(&ok(p, &["bench", "--artifact", "a.json", "--t-final", "600", "--repeats", "3"])).unwrap();
    assert_eq!(r["full_steps"], 600);
    assert_eq!(r["full_steps"], r["hybrid_steps"]);
    assert!(r["speedup"].as_f64().unwrap() > 0.0);
    assert_eq!(r["n_primary_theta"], 4);
    let few = rbg(p, &["bench", "--artifact", "a.json", "--repeats", "2"]);
    assert!(!few.status.success());
}

#[test]
fn multizone_model_from_the_cli() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(d.path(), &["simulate", "--model", "multizone", "--t-final", "3", "--input", "I_solar=0"]);
    let header = out.lines().next().unwrap();
    assert!(header.contains("x_front_left"));
    assert_eq!(header.split(',').count(), 1 + 60 + 132);
}

#[test]
fn errors_are_json_on_stderr() {
    let d = tempfile::tempdir().unwrap();
    let out = rbg(d.path(), &["reduce", "--campaign", "missing"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "failed");
    assert!(err["message"].as_str().unwrap().contains("missing"));

    let out = rbg(d.path(), &["simulate", "--input", "nope=1"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err.to_string().contains("nope"));

    let out = rbg(d.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "usage");

    assert!(rbg(d.path(), &["--help"]).status.success());
}
