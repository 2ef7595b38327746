use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn gamedyn(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gamedyn")).args(args).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn matching_pennies_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let game = data("matching_pennies.json");
    let o = gamedyn(&["--out", out, "simulate", "--game", game.to_str().unwrap(), "--rule", "sequential-best"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["artifact_version"], 1);
    assert_eq!(report["command"], "simulate");
    assert_eq!(report["payload"]["cycle"]["period"], 4);
    let rows = gamedyn::io::read_trajectory_csv(&dir.path().join("trajectory.csv")).unwrap();
    assert!(rows.len() > 4);
    assert_eq!(rows[0].t, 0);
}

#[test]
fn near_potential_limit_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let game = data("coordination.json");
    let phi = data("coordination_potential.json");
    let o = gamedyn(&[
        "--out",
        out,
        "simulate",
        "--game",
        game.to_str().unwrap(),
        "--potential",
        phi.to_str().unwrap(),
        "--x0",
        "0,2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("report.json"));
    let limit = &report["payload"]["near_potential_limit"];
    assert_eq!(limit["holds"], true, "{limit}");
    assert!(report["payload"]["delta"].as_f64().unwrap() > 0.0);
}

#[test]
fn malformed_game_exits_with_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"players\": 2,\n  \"action_sets\": [[0, 1], [0, 1]],,\n}\n").unwrap();
    let out = dir.path().join("out");
    let o = gamedyn(&["--out", out.to_str().unwrap(), "simulate", "--game", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["kind"], "parse");
    assert_eq!(err["line"], 3);
    assert!(err["path"].as_str().unwrap().ends_with("bad.json"));
    assert_eq!(json(&out.join("error.json")), err);
}

#[test]
fn missing_file_and_bad_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = gamedyn(&["--out", out, "simulate", "--game", "/nonexistent/game.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(gamedyn(&["simulate", "--rule", "nope"]).status.code(), Some(2));
    let o = gamedyn(&["--out", out, "verify", "--suite", "no_such_check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_prints_one_line_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = gamedyn(&["--out", out, "verify", "--suite", "contraction_machinery"]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("PASS") && l.contains("contraction_machinery")), "{stdout}");
    let report = json(&dir.path().join("verify.json"));
    assert_eq!(report["payload"]["failed"], 0);
}

#[test]
fn run_config_drives_the_cournot_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("cournot.toml")).unwrap();
    let out = dir.path().join("cournot");
    let text = text.replace("\"out/cournot\"", &format!("{:?}", out.to_str().unwrap()));
    let config = dir.path().join("cournot.toml");
    std::fs::write(&config, text).unwrap();
    let o = gamedyn(&["run", "--config", config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["command"], "cournot");
    assert!(out.join("plot/full/circle.dat").exists());
    assert!(out.join("plot/tail/circle.dat").exists());
    assert!(std::fs::read_dir(out.join("runs")).unwrap().count() >= 16);
}

#[test]
fn invariant_sets_and_contraction_commands_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let game = data("coordination.json");
    let o = gamedyn(&["--out", out, "analyze-contraction", "--game", game.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("contraction.json"));
    let alpha = report["payload"]["certificate"]["alpha"].as_f64().unwrap();
    assert!(alpha > 0.0 && alpha <= 1.0);

    let phi = data("coordination_potential.json");
    let args = ["--out", out, "invariant-sets", "--game", game.to_str().unwrap(), "--phi", phi.to_str().unwrap()];
    let o = gamedyn(&[&args[..], &["--grid", "20", "--steps", "30"]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("invariant_sets.json"));
    let spec = &report["payload"]["invariant_set"];
    assert!(spec["R4"].as_f64().unwrap() <= spec["R5"].as_f64().unwrap());
    assert!(dir.path().join("trajectory.csv").exists());
}
