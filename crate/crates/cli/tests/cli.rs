use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/motivating.json")
}

fn ordo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordo")).args(args).env_remove("ORDO_SEED").output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn without_timing(mut v: Value) -> Value {
    if let Some(stats) = v.get_mut("stats").and_then(Value::as_object_mut) {
        stats.remove("elapsed");
    }
    if let Some(hist) = v.get_mut("incumbent_history").and_then(Value::as_array_mut) {
        for h in hist {
            h.as_object_mut().unwrap().remove("elapsed");
        }
    }
    v
}

#[test]
fn solve_fixture_reaches_cost_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("result.json");
    let trace_path = dir.path().join("trace.jsonl");
    let bounds_path = dir.path().join("bounds.json");
    let out = ordo(&[
        "solve",
        "--problem",
        fixture().to_str().unwrap(),
        "--mode",
        "gcdo",
        "--out",
        out_path.to_str().unwrap(),
        "--trace",
        trace_path.to_str().unwrap(),
        "--dump-bounds",
        bounds_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["cost"], serde_json::json!({"k": 0, "c": 1.0}));
    assert_eq!(v["proved_optimal"], Value::Bool(true));
    assert_eq!(v["best_order"], serde_json::json!([2, 3, 4, 1, 5]));
    let hist: Vec<f64> = v["incumbent_history"].as_array().unwrap().iter().map(|h| h["cost"]["c"].as_f64().unwrap()).collect();
    assert_eq!(hist, vec![8.0, 3.0, 1.0]);

    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(saved, v);

    let trace = std::fs::read_to_string(&trace_path).unwrap();
    let records: Vec<Value> = trace.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len() as u64, v["stats"]["iterations"].as_u64().unwrap());
    for key in ["order", "level", "witness", "estimate", "incumbent", "standard_move", "reducing_move", "g_called"] {
        assert!(records[0].get(key).is_some(), "trace record lacks {key}");
    }
    assert_eq!(records.iter().filter(|r| r["g_called"] == Value::Bool(true)).count(), 3);

    let bounds: Value = serde_json::from_str(&std::fs::read_to_string(&bounds_path).unwrap()).unwrap();
    let bounds = bounds.as_array().unwrap();
    assert!(!bounds.is_empty());
    assert!(bounds.iter().any(|b| b["constraints"] == serde_json::json!(["s1", "s2", "s3", "s4"]) && b["cost"]["c"] == 8.0));
}

#[test]
fn oracle_agrees_with_solve() {
    let f = fixture();
    let solved = stdout_json(&ordo(&["solve", "--problem", f.to_str().unwrap()]));
    let out = ordo(&["oracle", "--problem", f.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["cost"], solved["cost"]);
}

#[test]
fn cdito_mode_and_greedy_clique_find_the_same_optimum() {
    let f = fixture();
    for args in [["--mode", "cdito"], ["--clique", "greedy"]] {
        let mut all = vec!["solve", "--problem", f.to_str().unwrap()];
        all.extend(args);
        let v = stdout_json(&ordo(&all));
        assert_eq!(v["cost"]["c"], 1.0);
        assert_eq!(v["proved_optimal"], Value::Bool(true));
    }
}

#[test]
fn bench_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bench.csv");
    let out = ordo(&["bench", "--flows", "2", "--trials", "2", "--timeout", "5", "--out", csv_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scenario,mode,t1,gamma1_k,gamma1_c,gamma_k,gamma_c,eta,zeta");
    assert_eq!(lines.len(), 3);
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), text);
}

#[test]
fn bench_rejects_bad_seed_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_ordo"))
        .args(["bench", "--flows", "2", "--trials", "1", "--timeout", "1"])
        .env("ORDO_SEED", "banana")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ORDO_SEED"));
}

#[test]
fn generate_is_deterministic_and_solvable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(ordo(&["generate", "--flows", "2", "--seed", "7", "--out", a.to_str().unwrap()]).status.success());
    assert!(ordo(&["generate", "--flows", "2", "--seed", "7", "--out", b.to_str().unwrap()]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let r1 = ordo(&["solve", "--problem", a.to_str().unwrap(), "--timeout", "10"]);
    let r2 = ordo(&["solve", "--problem", a.to_str().unwrap(), "--timeout", "10"]);
    assert!(r1.status.success(), "{}", stderr(&r1));
    assert_eq!(without_timing(stdout_json(&r1)), without_timing(stdout_json(&r2)));
}

#[test]
fn tree_lists_every_permutation() {
    let out = ordo(&["tree", "--n", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 24);
    assert_eq!(lines[0], "1,1234,4");
    assert_eq!(lines[1], "2,2134,1");
    let perms: std::collections::HashSet<&str> = lines.iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(perms.len(), 24);
}

#[test]
fn trace_fixture_prints_table() {
    let out = ordo(&["trace-fixture"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("order"));
    assert!(text.contains("23415"));
    assert!(text.trim_end().ends_with("g_calls 3"));
}

#[test]
fn malformed_json_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"n": 3, "ordering_constraints": [{"id": "a", "weight": -2, "disjuncts": [[1, 2]]}]}"#).unwrap();
    let out = ordo(&["solve", "--problem", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("weight"), "{}", stderr(&out));

    std::fs::write(&p, r#"{"ordering_constraints": []}"#).unwrap();
    let out = ordo(&["solve", "--problem", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`n`"), "{}", stderr(&out));

    std::fs::write(&p, "{ not json").unwrap();
    assert_eq!(ordo(&["solve", "--problem", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn invalid_instance_names_the_mission() {
    let mut inst: Value = serde_json::from_str(&std::fs::read_to_string(fixture()).unwrap()).unwrap();
    inst["missions"][1]["end"] = Value::from(42);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, inst.to_string()).unwrap();
    let out = ordo(&["solve", "--problem", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missions[1]"), "{}", stderr(&out));
}

#[test]
fn state_constraints_need_a_domain() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"n": 2, "theory_constraints": [{"id": "s", "weight": 1, "kind": "state"}]}"#).unwrap();
    let out = ordo(&["solve", "--problem", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generic_temporal_problem_solves() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(
        &p,
        r#"{"n": 3,
            "ordering_constraints": [{"id": "o", "weight": 2, "disjuncts": [[3, 1]]}],
            "theory_constraints": [{"id": "t", "weight": "inf", "kind": "temporal",
                                    "payload": {"from": 2, "to": 1, "lower": 5}}]}"#,
    )
    .unwrap();
    let out = ordo(&["solve", "--problem", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["cost"], serde_json::json!({"k": 0, "c": 0.0}));
    assert_eq!(v["best_order"], serde_json::json!([2, 3, 1]));
    assert_eq!(v["proved_optimal"], Value::Bool(true));
}

#[test]
fn oracle_refuses_large_problems() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"n": 9}"#).unwrap();
    let out = ordo(&["oracle", "--problem", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("capacity"), "{}", stderr(&out));
}

#[test]
fn timeout_without_solution_exits_3() {
    let out = ordo(&["solve", "--problem", fixture().to_str().unwrap(), "--timeout", "0.000000001"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_json(&out)["best_order"], Value::Null);
}

#[test]
fn unknown_arguments_exit_2() {
    assert_eq!(ordo(&["solve", "--problem", "x.json", "--mode", "fast"]).status.code(), Some(2));
    assert_eq!(ordo(&["frobnicate"]).status.code(), Some(2));
}
