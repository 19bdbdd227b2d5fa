use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn nicf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nicf"))
        .args(args)
        .env_remove("NICF_SEED")
        .output()
        .expect("run nicf")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn expand_folded() {
    let out = nicf(&["expand", "--kind", "folded", "--x", "0.4", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["kind"], "folded");
    assert_eq!(v["result"]["digits"], serde_json::json!([[3, -1], [2, 1]]));
    assert_eq!(v["result"]["terminated"], true);
}

#[test]
fn expand_odd_as_csv() {
    let out = nicf(&[
        "expand", "--kind", "odd", "--x", "0.302776", "--n", "2", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "index,b\n1,3\n2,3\n"
    );
}

#[test]
fn out_of_domain_is_a_validation_error() {
    let out = nicf(&["expand", "--kind", "folded", "--x", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("domain") && err.contains("[0, 0.5]"), "{err}");
}

#[test]
fn certify_folded_passes() {
    let out = nicf(&["certify", "--family", "folded"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["pass"], true);
    assert!(r["certified_sup"].as_f64().unwrap() < 0.288);
    for key in ["target", "grid_spacing", "padding"] {
        assert!(r[key].is_number(), "{key}");
    }
}

#[test]
fn certify_conjugate_reports_its_failure() {
    let out = nicf(&["certify", "--family", "conjugate", "--report-components"]);
    assert_eq!(out.status.code(), Some(1));
    let r = &json(&out)["result"];
    assert_eq!(r["pass"], false);
    assert!(r["certified_sup"].as_f64().unwrap() > 0.234);
    let note = r["details"]["psi"]["note"].as_str().unwrap();
    assert!(note.contains("0.092") && note.contains("0.0992"), "{note}");
    assert_eq!(
        r["details"]["psi"]["components"].as_array().unwrap().len(),
        4
    );
}

#[test]
fn decay_csv_has_one_row_per_step() {
    let out = nicf(&[
        "decay", "--kind", "folded", "--n-max", "20", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 21);
    assert!(lines[0].starts_with("n,error"));
    let out = nicf(&["decay", "--kind", "conjugate", "--n-max", "20"]);
    let v = json(&out);
    assert!(v["result"]["fitted_rate"].as_f64().unwrap() < 0.234);
    assert_eq!(v["result"]["errors"].as_array().unwrap().len(), 21);
}

#[test]
fn decay_rejects_zero_steps() {
    let out = nicf(&["decay", "--kind", "folded", "--n-max", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mixing_gaps_decay() {
    let out = nicf(&[
        "mixing", "--kind", "folded", "--e", "0,0.25", "--f", "2,+1", "--n", "5,10,15", "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let gaps: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1]);
}

#[test]
fn mixing_rejects_inadmissible_words() {
    let out = nicf(&[
        "mixing", "--kind", "folded", "--e", "0,0.25", "--f", "2,-1", "--n", "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("a + e >= 2"));
}

#[test]
fn conjugate_and_odd_mixing_cross_check() {
    let out = nicf(&[
        "mixing",
        "--kind",
        "conjugate",
        "--e",
        "0,0.25",
        "--f",
        "2,+1",
        "--n",
        "1,3",
        "--mc-samples",
        "400000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for p in json(&out)["result"]["points"].as_array().unwrap() {
        assert!(p["z_score"].as_f64().unwrap() < 4.0);
    }
    let out = nicf(&[
        "mixing",
        "--kind",
        "odd",
        "--e=-0.25,0.25",
        "--f=-3,2",
        "--n",
        "2",
        "--mc-samples",
        "400000",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let p = &json(&out)["result"]["points"][0];
    assert!(p["z_score"].as_f64().unwrap() < 4.0);
}

#[test]
fn identical_runs_give_identical_bytes() {
    let args = [
        "mixing",
        "--kind",
        "folded",
        "--e",
        "0,0.25",
        "--f",
        "3,-1",
        "--n",
        "1,2",
        "--mc-samples",
        "100000",
        "--seed",
        "42",
    ];
    let a = nicf(&args);
    let b = nicf(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_fills_flags_and_flags_win() {
    let path = scratch("expand.conf");
    std::fs::write(&path, "# expansion\nkind = folded\nx = 0.4\nn = 5\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&nicf(&["expand", "--config", p]));
    assert_eq!(v["result"]["digits"].as_array().unwrap().len(), 2);
    let v = json(&nicf(&["expand", "--config", p, "--n", "1"]));
    assert_eq!(v["config"]["n"], 1);
    assert_eq!(v["result"]["digits"].as_array().unwrap().len(), 1);
}

#[test]
fn seed_comes_from_the_environment_unless_given() {
    let args = [
        "mixing", "--kind", "folded", "--e", "0,0.25", "--f", "2,+1", "--n", "1",
    ];
    let run = |extra: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_nicf"))
            .args(args)
            .args(extra)
            .env("NICF_SEED", "99")
            .output()
            .unwrap();
        json(&out)["config"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(&[]), 99);
    assert_eq!(run(&["--seed", "5"]), 5);
}

#[test]
fn output_flag_writes_a_file() {
    let path = scratch("expand.json");
    let out = nicf(&[
        "expand",
        "--kind",
        "even",
        "--x",
        "-0.3",
        "--n",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["digits"][0], serde_json::json!([3, -1]));
}
