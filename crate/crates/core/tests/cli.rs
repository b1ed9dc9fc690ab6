mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{assert_schema, bin, data, test_data};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn run_env(args: &[&str], threads: &str) -> Output {
    Command::new(bin())
        .args(args)
        .env("OGOP_SIM_THREADS", threads)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gop_show_writes_schema_valid_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "--out",
        s(dir.path()),
        "--format",
        "json",
        "gop",
        "show",
        "--gop",
        "8",
        "--irap",
        "64",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let seq = read_json(&dir.path().join("gop.json"));
    assert_schema("coded_sequence.schema.json", &seq);
    assert_eq!(json_stdout(&o), seq);
    let csv = std::fs::read_to_string(dir.path().join("gop.csv")).unwrap();
    assert!(csv.starts_with("poc,decode_idx,tid,kind,refs,collocated_ref,segment\n"));
    assert_eq!(csv.lines().count(), 66);
}

#[test]
fn gop_one_is_all_base_layer() {
    let o = run(&[
        "--format", "json", "gop", "show", "--gop", "1", "--irap", "8",
    ]);
    assert_eq!(code(&o), 0);
    let seq = json_stdout(&o);
    assert!(seq["pictures"]
        .as_array()
        .unwrap()
        .iter()
        .all(|p| p["tid"] == 0));
}

#[test]
fn usage_errors_exit_two() {
    let bad_gop = run(&["gop", "show", "--gop", "12", "--irap", "64"]);
    assert_eq!(code(&bad_gop), 2);
    assert!(String::from_utf8_lossy(&bad_gop.stderr).contains("error[invalid-argument]"));
    assert_eq!(code(&run(&["gop", "show"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(
        code(&run(&["ladder", "validate", "/nonexistent/ladder.json"])),
        2
    );
    let ladder = data("ladder.json");
    let both = run(&[
        "sim",
        "run",
        s(&ladder),
        "--trace",
        "a.csv",
        "--schedule",
        "b.csv",
    ]);
    assert_eq!(code(&both), 2);
    let neither = run(&["sim", "run", s(&ladder)]);
    assert_eq!(code(&neither), 2);
    let short = run(&[
        "sim",
        "run",
        s(&ladder),
        "--schedule",
        s(&test_data("schedule_short.csv")),
    ]);
    assert_eq!(code(&short), 2);
    assert!(String::from_utf8_lossy(&short.stderr).contains("3 entries for 11 segments"));
    let unknown = run(&[
        "sim",
        "run",
        s(&ladder),
        "--schedule",
        s(&test_data("schedule_unknown.csv")),
    ]);
    assert_eq!(code(&unknown), 2);
    assert_eq!(
        code(&run_env(
            &["gop", "show", "--gop", "8", "--irap", "64"],
            "zero"
        )),
        2
    );
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn ladder_validate_exit_codes_and_schema() {
    let o = run(&[
        "--format",
        "json",
        "ladder",
        "validate",
        s(&data("ladder.json")),
    ]);
    assert_eq!(code(&o), 0);
    let report = json_stdout(&o);
    assert_schema("conformance_report.schema.json", &report);
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);

    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "--out",
        s(dir.path()),
        "ladder",
        "validate",
        s(&data("ladder_faulty_dmvr.json")),
    ]);
    assert_eq!(code(&o), 1);
    let report = read_json(&dir.path().join("conformance.json"));
    assert_schema("conformance_report.schema.json", &report);
    let v = &report["violations"].as_array().unwrap()[0];
    assert_eq!(v["rule_id"], "rasl-dmvr");
    assert_eq!(v["location"]["poc"], 120);
    assert!(String::from_utf8_lossy(&o.stdout).contains("rasl-dmvr"));

    let o = run(&[
        "--format",
        "json",
        "ladder",
        "validate",
        s(&data("ladder_2160_720.json")),
    ]);
    assert_eq!(code(&o), 0);
    let report = json_stdout(&o);
    assert_schema("conformance_report.schema.json", &report);
    assert_eq!(report["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn fixtures_match_config_schema() {
    for f in [
        "ladder.json",
        "ladder_faulty_dmvr.json",
        "ladder_2160_720.json",
        "ladder_open.json",
    ] {
        assert_schema("ladder_config.schema.json", &read_json(&data(f)));
    }
}

fn sim(dir: &Path, extra: &[&str]) -> Output {
    let ladder = data("ladder.json");
    let mut args = vec![
        "--out",
        s(dir),
        "--format",
        "json",
        "--seed",
        "7",
        "sim",
        "run",
        s(&ladder),
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn trace_run_resolves_panic_with_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let trace = data("trace_step_down.csv");
    let o = sim(dir.path(), &["--trace", s(&trace)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&dir.path().join("report.json"));
    assert_schema("run_report.schema.json", &report);
    assert_eq!(report, json_stdout(&o));
    assert_eq!(report["seed"], 7);
    assert_eq!(report["driver"], "trace");
    let switches = report["session"]["switches"].as_array().unwrap();
    let panic: Vec<&Value> = switches.iter().filter(|s| s["panic"] == true).collect();
    assert_eq!(panic.len(), 1);
    assert_eq!(panic[0]["to"], "720p-closed");
    assert_eq!(panic[0]["fallback"], true);
    assert_eq!(panic[0]["outcome"], "seamless");
    assert_eq!(report["session"]["summary"]["panic_down_switches"], 1);
    assert_eq!(report["inputs"].as_array().unwrap().len(), 6);
    for table in report["bdrate"].as_array().unwrap() {
        assert_schema("bdrate_table.schema.json", table);
    }
    let q = std::fs::read_to_string(dir.path().join("quality.csv")).unwrap();
    assert!(q.starts_with("poc,quality_db,rep_id,status\n"));
    assert_eq!(q.lines().count(), 642);
    let sw = std::fs::read_to_string(dir.path().join("switches.csv")).unwrap();
    assert_eq!(sw.lines().count(), switches.len() + 1);

    let off = tempfile::tempdir().unwrap();
    let o = sim(off.path(), &["--trace", s(&trace), "--fallback", "off"]);
    assert_eq!(code(&o), 0);
    let report = read_json(&off.path().join("report.json"));
    assert_schema("run_report.schema.json", &report);
    assert_eq!(report["fallback"], false);
    let illegal = report["session"]["switches"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["outcome"] == "illegal_rpr_ratio")
        .count();
    assert_eq!(illegal, 1);
    assert_eq!(report["session"]["summary"]["dropped_pictures"], 31);
}

#[test]
fn schedule_run_and_no_rpr() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(dir.path(), &["--schedule", s(&data("schedule_up.csv"))]);
    assert_eq!(code(&o), 0);
    let report = json_stdout(&o);
    assert_schema("run_report.schema.json", &report);
    assert_eq!(report["driver"], "schedule");
    assert_eq!(
        report["session"]["switches"][0]["outcome"],
        "graceful_drift"
    );

    let o = sim(
        dir.path(),
        &[
            "--schedule",
            s(&data("schedule_up.csv")),
            "--caps",
            "no-rpr",
        ],
    );
    let report = json_stdout(&o);
    assert_schema("run_report.schema.json", &report);
    let sw = &report["session"]["switches"][0];
    assert_eq!(sw["outcome"], "dropped_pictures");
    assert_eq!(sw["dropped_pocs"].as_array().unwrap().len(), 31);
}

#[test]
fn runs_are_byte_identical_across_thread_counts() {
    let trace = data("trace_step_down.csv");
    let args = |dir: &Path| -> Vec<String> {
        [
            "--out",
            s(dir),
            "--seed",
            "1",
            "sim",
            "run",
            s(&data("ladder.json")),
            "--trace",
            s(&trace),
        ]
        .map(String::from)
        .to_vec()
    };
    let mut outputs = Vec::new();
    for threads in ["1", "4", "1"] {
        let dir = tempfile::tempdir().unwrap();
        let a = args(dir.path());
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        let o = run_env(&a, threads);
        assert_eq!(code(&o), 0);
        let files: Vec<Vec<u8>> = ["report.json", "quality.csv", "switches.csv"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect();
        outputs.push((o.stdout, files));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn bdrate_command() {
    let dir = tempfile::tempdir().unwrap();
    let anchor = data("rd/720p.csv");
    let o = run(&[
        "--out",
        s(dir.path()),
        "--format",
        "json",
        "bdrate",
        s(&anchor),
        s(&test_data("rd_720p_x110.csv")),
    ]);
    assert_eq!(code(&o), 0);
    let table = read_json(&dir.path().join("bdrate.json"));
    assert_schema("bdrate_table.schema.json", &table);
    for row in table["rows"].as_array().unwrap() {
        assert!(
            (row["bd_rate_percent"].as_f64().unwrap() - 10.0).abs() < 1e-3,
            "{row}"
        );
    }
    let text = std::fs::read_to_string(dir.path().join("bdrate.txt")).unwrap();
    assert!(text.contains("10.00%"));

    let o = run(&["bdrate", s(&anchor), s(&test_data("rd_disjoint.csv"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[no-overlap]"));
}

#[test]
fn schemas_reject_corrupted_reports() {
    let o = run(&[
        "--format",
        "json",
        "sim",
        "run",
        s(&data("ladder.json")),
        "--trace",
        s(&data("trace_step_down.csv")),
    ]);
    let good = json_stdout(&o);
    let validator = jsonschema::validator_for(&common::schema("run_report.schema.json")).unwrap();
    assert!(validator.is_valid(&good));
    let mut extra = good.clone();
    extra["session"]["switches"][0]["surprise"] = Value::Bool(true);
    assert!(!validator.is_valid(&extra));
    let mut bad_outcome = good.clone();
    bad_outcome["session"]["switches"][0]["outcome"] = "crashed".into();
    assert!(!validator.is_valid(&bad_outcome));
    let mut bad_digest = good;
    bad_digest["inputs"][0]["sha256"] = "xyz".into();
    assert!(!validator.is_valid(&bad_digest));
}
