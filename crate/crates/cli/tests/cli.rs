use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exelkit")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn uniform_weights_make_the_two_loop_regular() {
    let o = run(&["graph", "classify", "g_2loop", "--lambda", "uniform"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["is_regular"], true);
    assert_eq!(v["is_exel"], true);
}

#[test]
fn irregular_weights_exit_with_two() {
    let o = run(&["graph", "classify", "g_fork"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["is_regular"], false);
    assert_eq!(code(&run(&["graph", "classify", "g_fork", "--lambda", "uniform"])), 0);
}

#[test]
fn missing_input_exits_with_one() {
    let o = run(&["graph", "ideals", "no_such_graph.json"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no_such_graph.json: file not found"));
    assert!(o.stdout.is_empty());
}

#[test]
fn wrong_kind_of_input_exits_with_one() {
    assert_eq!(code(&run(&["cp", "analyze", "g_line"])), 1);
    assert_eq!(code(&run(&["graph", "represent", "m_half"])), 1);
}

#[test]
fn lazy_star_fails_the_vanishing_condition() {
    let o = run(&["graph", "check-lambda", "lazy:star:1", "--budget", "50"]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["conditions"]["c0"], "fails_on_evidence");
    assert_eq!(v["conditions"]["linf"], "holds_on_evidence");
    assert_eq!(v["conditions"]["exact"], false);
    assert_eq!(code(&run(&["graph", "check-lambda", "lazy:star:geometric:1/2", "--budget", "50"])), 0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["graph", "represent", "g_2loop", "g_fork", "r03", "--depth", "2"];
    let first = run(&args);
    assert!(matches!(code(&first), 0 | 2));
    assert_eq!(first.stdout, run(&args).stdout);
    let mut parallel = vec!["--jobs", "4"];
    parallel.extend(args);
    assert_eq!(first.stdout, run(&parallel).stdout);
}

#[test]
fn several_inputs_keep_their_order() {
    let v = json(&run(&["cp", "analyze", "m_shift", "m_half"]));
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|x| x["input"].as_str().unwrap()).collect();
    assert_eq!(names, ["m_shift", "m_half"]);
}

#[test]
fn table_output_has_one_leaf_per_line() {
    let o = run(&["--table", "cp", "analyze", "m_shift"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.split('\t').count() == 2), "{text}");
    assert!(text.lines().any(|l| l == "analysis.gns_kernel.points\t[0]"), "{text}");
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"lambda": "uniform", "table": true}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = run(&["--config", cfg, "graph", "classify", "g_fork"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "is_regular\ttrue"));
    let o = run(&["--config", cfg, "graph", "classify", "g_fork", "--lambda", "file"]);
    assert_eq!(code(&o), 2);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"lamda": "uniform"}"#).unwrap();
    assert_eq!(code(&run(&["--config", bad.to_str().unwrap(), "graph", "classify", "g_fork"])), 1);
}

#[test]
fn documents_and_matrices_are_read_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("split.json");
    std::fs::write(
        &graph,
        r#"{"vertices": ["u", "v", "w"], "edges": [
            {"id": "e", "src": "u", "rng": "v", "lambda": "1/2"},
            {"id": "f", "src": "u", "rng": "w", "lambda": "1/2"}]}"#,
    )
    .unwrap();
    let o = run(&["graph", "classify", graph.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["is_corner"], false);

    let m = dir.path().join("m.json");
    std::fs::write(&m, r#"[["0.5", "0.5"], ["0", "1"]]"#).unwrap();
    let m = m.to_str().unwrap();
    assert_eq!(code(&run(&["cp", "analyze", m])), 1);
    let o = run(&["--float", "6", "cp", "analyze", m]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["analysis"]["norm"], "1");

    let csv = dir.path().join("m.csv");
    std::fs::write(&csv, "1/2,1/2\n0,1\n").unwrap();
    assert_eq!(json(&run(&["cp", "analyze", csv.to_str().unwrap()]))["analysis"]["norm"], "1");
}

#[test]
fn enumerate_regular_reports_the_shift() {
    let o = run(&["exel", "enumerate-regular", "g_2loop", "--lambda", "uniform"]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    let o = run(&["exel", "enumerate-regular", "g_line"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["atoms"], serde_json::json!(["e", "w"]));
    assert!(v["matches_shift"].as_array().unwrap().contains(&Value::Bool(true)));
}

#[test]
fn fixtures_list_and_export() {
    let v = json(&run(&["fixtures", "list"]));
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|x| x["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"g_line") && names.contains(&"r19") && names.contains(&"m_half"));

    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["fixtures", "export", dir.path().to_str().unwrap()])), 0);
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for name in names {
        let file = format!("{name}.json");
        let exported = std::fs::read(dir.path().join(&file)).unwrap();
        assert_eq!(exported, std::fs::read(shipped.join(&file)).unwrap(), "{file}");
    }
}
