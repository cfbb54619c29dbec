//! Functional tests that drive the compiled binary: exit codes, the
//! one-line stderr error contract, JSON output shape and determinism.

mod common;

use std::io::Write;
use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::{json, Value};

use weiltrace::curves::{lefschetz_t1, FiniteField, HyperCurve};
use weiltrace::groups::CharTable;
use weiltrace::wdrep::{WDData, WDPart};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weiltrace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fix(name: &str) -> String {
    common::fixture_path(name).to_str().expect("utf-8 path").to_string()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited")
}

/// Writes `content` to a fresh file inside `dir` and returns its path.
fn temp_file(dir: &tempfile::TempDir, name: &str, content: &str) -> String {
    let path = dir.path().join(name);
    let mut file = std::fs::File::create(&path).expect("create temp file");
    file.write_all(content.as_bytes()).expect("write temp file");
    path.to_str().expect("utf-8 path").to_string()
}

#[test]
fn validate_summarizes_group_and_table() {
    let out = run(&[
        "validate",
        "--group",
        &fix("group_c7c3.json"),
        "--chartab",
        &fix("chartab_c7c3.json"),
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stderr.is_empty(), "--json must silence the summary");
    let v = stdout_json(&out);
    assert_eq!(v["ok"], json!(true));
    assert_eq!(v["order"], json!(21));
    assert_eq!(v["inertia_order"], json!(7));
    assert_eq!(v["residue_degree"], json!(3));
    assert_eq!(v["classes"], json!(5));
    assert_eq!(v["table_rows"], json!(5));
}

#[test]
fn summary_note_goes_to_stderr_unless_json() {
    let quiet = run(&["validate", "--group", &fix("group_c7c3.json"), "--json"]);
    let chatty = run(&["validate", "--group", &fix("group_c7c3.json")]);
    assert_eq!(code(&chatty), 0);
    assert!(stderr_text(&chatty).contains("group of order 21"));
    assert_eq!(stdout_json(&chatty), stdout_json(&quiet));
}

#[test]
fn missing_input_file_exits_with_io_code() {
    let dir = tempfile::tempdir().expect("tempdir");
    let absent = dir.path().join("absent.json");
    let out = run(&["validate", "--group", absent.to_str().expect("utf-8 path")]);
    assert_eq!(code(&out), 2);
    let err = stderr_text(&out);
    assert!(err.starts_with("error: io: "), "got {err:?}");
    assert_eq!(err.lines().count(), 1, "exactly one stderr line");
}

#[test]
fn malformed_json_exits_with_io_code() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = temp_file(&dir, "garbage.json", "{ this is not json");
    let out = run(&["validate", "--group", &path]);
    assert_eq!(code(&out), 2);
    assert!(stderr_text(&out).starts_with("error: io: "));
}

#[test]
fn invalid_group_data_exits_with_domain_code() {
    let raw = std::fs::read_to_string(fix("group_c7c3.json")).expect("fixture readable");
    let mut v: Value = serde_json::from_str(&raw).expect("fixture is JSON");
    v["mul"][1] = json!(0);
    let dir = tempfile::tempdir().expect("tempdir");
    let path = temp_file(&dir, "broken_group.json", &v.to_string());
    let out = run(&["validate", "--group", &path]);
    assert_eq!(code(&out), 1);
    assert!(stderr_text(&out).starts_with("error: domain: "));
}

#[test]
fn conflicting_trace_sources_exit_with_config_code() {
    let counts = fix("counts_x.json");
    let out = run(&[
        "reconstruct",
        "--group",
        &fix("group_c7c3.json"),
        "--q",
        "7",
        "--dim-bound",
        "6",
        "--traces",
        &counts,
        "--counts",
        &counts,
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr_text(&out).starts_with("error: config: "));
}

#[test]
fn zero_worker_count_exits_with_config_code() {
    let out = run(&["count", "--field", "7", "--poly", "1,0,0,1", "--jobs", "0"]);
    assert_eq!(code(&out), 3);
    assert!(stderr_text(&out).starts_with("error: config: "));
}

#[test]
fn orbit_listing_matches_the_fixture_table() {
    let out = run(&[
        "orbits",
        "--group",
        &fix("group_c7c3.json"),
        "--chartab",
        &fix("chartab_c7c3.json"),
        "--q",
        "7",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let expected = json!({
        "orbits": [
            {"degree": 1, "m": 1, "members": [0, 1, 2], "rep": 0},
            {"degree": 3, "m": 3, "members": [3], "rep": 3},
            {"degree": 3, "m": 3, "members": [4], "rep": 4},
        ]
    });
    assert_eq!(stdout_json(&out), expected);
}

#[test]
fn reconstruction_from_counts_matches_the_stored_result() {
    let out = run(&[
        "reconstruct",
        "--group",
        &fix("group_c7c3.json"),
        "--q",
        "7",
        "--counts",
        &fix("counts_x.json"),
        "--dim-bound",
        "6",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let raw = std::fs::read_to_string(fix("expected_x.json")).expect("fixture readable");
    let stored: Value = serde_json::from_str(&raw).expect("fixture is JSON");
    assert_eq!(stdout_json(&out), stored);
}

#[test]
fn repeated_runs_emit_identical_bytes() {
    let args = [
        "reconstruct",
        "--group",
        &fix("group_c7c3.json"),
        "--q",
        "7",
        "--counts",
        &fix("counts_xprime.json"),
        "--dim-bound",
        "6",
        "--json",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn worker_count_does_not_change_output_bytes() {
    let base = [
        "roundtrip",
        "--trials",
        "6",
        "--seed",
        "9",
        "--json",
        "--jobs",
    ];
    let single = run(&[&base[..], &["1"]].concat());
    let pooled = run(&[&base[..], &["4"]].concat());
    assert_eq!(code(&single), 0);
    assert_eq!(single.stdout, pooled.stdout);
}

#[test]
fn pretty_flag_reformats_the_same_document() {
    let args = [
        "orbits",
        "--group",
        &fix("group_c7c3.json"),
        "--q",
        "7",
        "--json",
    ];
    let compact = run(&args);
    let pretty = run(&[&args[..], &["--pretty"]].concat());
    assert_eq!(code(&pretty), 0);
    assert_ne!(compact.stdout, pretty.stdout);
    assert!(pretty.stdout.iter().filter(|&&b| b == b'\n').count() > 1);
    assert_eq!(stdout_json(&compact), stdout_json(&pretty));
}

#[test]
fn stored_reconstruction_evaluates_back_to_the_count_traces() {
    let out = run(&[
        "traces",
        "--group",
        &fix("group_c7c3.json"),
        "--q",
        "7",
        "--rep",
        &fix("expected_x.json"),
        "--max-r",
        "6",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let entries = v["entries"].as_array().expect("entries array");
    assert_eq!(entries.len(), 42);
    let mut got = std::collections::BTreeMap::new();
    for e in entries {
        let g = e["g"].as_u64().expect("g");
        let r = e["r"].as_u64().expect("r");
        assert_eq!(e["trace"]["n"], json!(1), "integer trace at ({g}, {r})");
        got.insert((g, r), e["trace"]["c"][0].as_str().expect("coefficient").to_string());
    }
    let raw = std::fs::read_to_string(fix("counts_x.json")).expect("fixture readable");
    let counts: Value = serde_json::from_str(&raw).expect("fixture is JSON");
    for e in counts["entries"].as_array().expect("entries") {
        let g = e["g"].as_u64().expect("g");
        let r = e["r"].as_u64().expect("r");
        let count = e["count"].as_i64().expect("count");
        let expected = 7i64.pow(r as u32) + 1 - count;
        assert_eq!(got[&(g, r)], expected.to_string(), "slot ({g}, {r})");
    }
}

#[test]
fn point_count_command_agrees_with_the_library() {
    let out = run(&["count", "--field", "7^2", "--poly", "1,0,0,1", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let field = FiniteField::new(7, 2).expect("prime power");
    let curve = HyperCurve::new(&field, vec![1, 0, 0, 1]).expect("valid curve");
    let count = curve.count_points();
    assert_eq!(v["q"], json!(49));
    assert_eq!(v["degree"], json!(3));
    assert_eq!(v["genus"], json!(1));
    assert_eq!(v["count"], json!(count));
    assert_eq!(v["t1"], json!(lefschetz_t1(count, 49)));
}

#[test]
fn negative_coefficients_reduce_into_the_field() {
    let plain = run(&["count", "--field", "11", "--poly", "10,0,1", "--json"]);
    let signed = run(&["count", "--field", "11", "--poly", "-1,0,1", "--json"]);
    assert_eq!(code(&signed), 0);
    assert_eq!(plain.stdout, signed.stdout);
}

#[test]
fn bad_field_spec_is_a_config_error() {
    let out = run(&["count", "--field", "7^2^3", "--poly", "1,0,1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr_text(&out).starts_with("error: config: "));
}

#[test]
fn composite_field_size_is_a_domain_error() {
    let out = run(&["count", "--field", "12", "--poly", "1,0,1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr_text(&out).starts_with("error: domain: "));
}

#[test]
fn recover_t1_inverts_a_point_count() {
    let out = run(&["recover-t1", "--q", "343", "--genus", "3", "--count", "295", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out), json!({"t1": 49}));
}

#[test]
fn recover_t1_rejects_an_unresolvable_count() {
    let out = run(&["recover-t1", "--q", "343", "--genus", "0", "--count", "99"]);
    assert_eq!(code(&out), 1);
    assert!(stderr_text(&out).starts_with("error: domain: "));
}

#[test]
fn failing_weight_check_reports_and_exits_nonzero() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = temp_file(
        &dir,
        "wd_bad.json",
        r#"{"q":7,"parts":[{"n":2,"eigs":[{"re":1.0,"im":0.0}]}]}"#,
    );
    let out = run(&["wm-check", "--input", &path, "--json"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], json!(false));
    assert_eq!(v["parts"][0]["n"], json!(2));
    assert_eq!(v["parts"][0]["failing"], json!(1));
    assert!(stderr_text(&out).contains("error: domain: weight check failed"));
}

#[test]
fn passing_weight_check_exits_cleanly() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = temp_file(
        &dir,
        "wd_good.json",
        r#"{"q":7,"parts":[{"n":1,"eigs":[{"re":1.0,"im":0.0}]}]}"#,
    );
    let out = run(&["wm-check", "--input", &path, "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["pass"], json!(true));
}

#[test]
fn kernel_eigenvalues_regroup_into_the_original_wd() {
    let lambda = Complex64::new(0.0, 2.0);
    let wd = WDData::new(4, vec![WDPart { n: 2, eigs: vec![lambda] }]).expect("valid input");
    let kernel: Vec<Value> = wd
        .kernel_eigenvalues()
        .iter()
        .map(|e| json!({"re": e.re, "im": e.im}))
        .collect();
    let dir = tempfile::tempdir().expect("tempdir");
    let path = temp_file(&dir, "kernel.json", &json!({"q": 4, "eigs": kernel}).to_string());
    let out = run(&["wd-from-kernel", "--input", &path, "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["q"], json!(4));
    let parts = v["parts"].as_array().expect("parts");
    assert_eq!(parts.len(), 1);
    assert_eq!(parts[0]["n"], json!(2));
    let eigs = parts[0]["eigs"].as_array().expect("eigs");
    assert_eq!(eigs.len(), 1);
    let re = eigs[0]["re"].as_f64().expect("re");
    let im = eigs[0]["im"].as_f64().expect("im");
    assert!((re - lambda.re).abs() < 1e-9 && (im - lambda.im).abs() < 1e-9);
}

#[test]
fn roundtrip_smoke_is_clean() {
    let out = run(&["roundtrip", "--trials", "3", "--seed", "5", "--json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["trials"], json!(3));
    assert_eq!(v["passes"], json!(3));
    assert_eq!(v["failures"], json!([]));
}

#[test]
fn roundtrip_flags_require_a_group() {
    let out = run(&["roundtrip", "--trials", "1", "--q", "7"]);
    assert_eq!(code(&out), 3);
    assert!(stderr_text(&out).starts_with("error: config: "));
}

#[test]
fn chartab_emits_the_computed_table() {
    let out = run(&["chartab", "--group", &fix("group_c7c3.json"), "--json"]);
    assert_eq!(code(&out), 0);
    let table = CharTable::compute(&common::group_c7c3()).expect("sample table computes");
    let expected = serde_json::to_value(&table).expect("table serializes");
    assert_eq!(stdout_json(&out), expected);
}

#[test]
fn traces_with_zero_max_r_is_a_config_error() {
    let out = run(&[
        "traces",
        "--group",
        &fix("group_c7c3.json"),
        "--q",
        "7",
        "--rep",
        &fix("expected_x.json"),
        "--max-r",
        "0",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr_text(&out).starts_with("error: config: "));
}
