//! End-to-end tests of the `predint` binary: exit codes, output formats,
//! reproducibility, and agreement with the library the CLI wraps.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use predint_core::discrete::{binom_bounds, BinomialMethod, BinomialProblem};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_predint")
}

fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write fixture");
    path
}

fn run(args: &[&str], threads: &str) -> Output {
    Command::new(binary())
        .args(args)
        .env("PREDINT_THREADS", threads)
        .output()
        .expect("spawn predint")
}

fn run_ok(args: &[&str], threads: &str) -> String {
    let output = run(args, threads);
    assert!(
        output.status.success(),
        "predint {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn the_worked_plugin_example_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.json",
        r#"{
            "task": "predict",
            "family": "normal",
            "method": "plug_in",
            "data": { "inline": [1.0, 2.0, 3.0] },
            "alpha": 0.5,
            "side": "upper"
        }"#,
    );
    let stdout = run_ok(&["predict", "--config", config.to_str().unwrap()], "1");
    let document: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let bound = &document["result"]["bounds"][0];
    assert_eq!(bound["side"], "upper");
    assert_eq!(bound["endpoint"].as_f64().unwrap(), 2.0);
    assert_eq!(document["config"]["side"], "upper");
    assert_eq!(document["config"]["format"], "json");
}

#[test]
fn a_missing_field_names_itself_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.json",
        r#"{
            "task": "predict",
            "family": "normal",
            "method": "plug_in",
            "data": { "inline": [1.0, 2.0, 3.0] }
        }"#,
    );
    let output = run(&["predict", "--config", config.to_str().unwrap()], "1");
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("`alpha`"), "stderr: {}", stderr_of(&output));
}

#[test]
fn malformed_json_reports_the_line_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.json", "{\n  \"task\": \"predict\",\n  oops\n}\n");
    let output = run(&["predict", "--config", config.to_str().unwrap()], "1");
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("line 3"), "stderr: {}", stderr_of(&output));
}

#[test]
fn an_unknown_config_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.json",
        r#"{ "task": "predict", "alhpa": 0.1 }"#,
    );
    let output = run(&["predict", "--config", config.to_str().unwrap()], "1");
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("alhpa"), "stderr: {}", stderr_of(&output));
}

#[test]
fn a_task_verb_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.json",
        r#"{
            "task": "predict",
            "family": "normal",
            "method": "plug_in",
            "data": { "inline": [1.0, 2.0, 3.0] },
            "alpha": 0.5
        }"#,
    );
    let output = run(&["fit", "--config", config.to_str().unwrap()], "1");
    assert_eq!(output.status.code(), Some(2));
    let message = stderr_of(&output);
    assert!(message.contains("predict") && message.contains("fit"), "stderr: {message}");
}

const COVERAGE_CONFIG: &str = r#"{
    "task": "coverage",
    "method": "nelson",
    "truth": { "model": "binomial", "prob": 0.25 },
    "n": 20,
    "m": 20.0,
    "alpha": 0.05,
    "side": "upper",
    "n_sim": 3000,
    "seed": 42,
    "format": "csv"
}"#;

fn drop_timestamp(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            let (kept, _) = line.rsplit_once(',').expect("timestamp column");
            kept
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn coverage_reruns_are_identical_except_the_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.json", COVERAGE_CONFIG);
    let first = run_ok(&["coverage", "--config", config.to_str().unwrap()], "1");
    let second = run_ok(&["coverage", "--config", config.to_str().unwrap()], "1");
    let mut lines = first.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,model,n,m,alpha,side,n_sim,coverage,se,failures,master_seed,timestamp"
    );
    let row = lines.next().unwrap();
    let failures: u64 = row.split(',').nth(9).unwrap().parse().unwrap();
    assert!(failures > 0, "this study is chosen to produce some failed replicates");
    assert_eq!(drop_timestamp(&first), drop_timestamp(&second));
}

#[test]
fn the_thread_count_does_not_change_the_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.json", COVERAGE_CONFIG);
    let serial = run_ok(&["coverage", "--config", config.to_str().unwrap()], "1");
    let threaded = run_ok(&["coverage", "--config", config.to_str().unwrap()], "8");
    assert_eq!(drop_timestamp(&serial), drop_timestamp(&threaded));
}

#[test]
fn a_bad_thread_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "run.json", COVERAGE_CONFIG);
    let output = run(&["coverage", "--config", config.to_str().unwrap()], "many");
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("PREDINT_THREADS"));
}

#[test]
fn the_json_document_can_be_rerun_from_its_embedded_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.json",
        r#"{
            "task": "predict",
            "family": "gamma",
            "method": "calibration_bootstrap",
            "data": { "inline": [1.2, 0.8, 2.3, 1.7, 0.9, 1.4, 2.0, 1.1, 1.6, 1.3] },
            "alpha": 0.1,
            "side": "two_sided",
            "b": 400,
            "seed": 77,
            "grid": { "min": 0.2, "max": 4.0, "points": 9 }
        }"#,
    );
    let first = run_ok(&["predict", "--config", config.to_str().unwrap()], "1");
    let document: serde_json::Value = serde_json::from_str(&first).unwrap();

    let embedded = serde_json::to_string(&document["config"]).unwrap();
    let config2 = write_file(dir.path(), "rerun.json", &embedded);
    let second = run_ok(&["predict", "--config", config2.to_str().unwrap()], "1");
    let document2: serde_json::Value = serde_json::from_str(&second).unwrap();

    assert_eq!(document["result"], document2["result"]);
}

#[test]
fn seed_and_format_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.json",
        r#"{
            "task": "predict",
            "family": "normal",
            "method": "calibration_bootstrap",
            "data": { "inline": [9.2, 10.1, 11.4, 10.8, 9.7, 10.3, 11.0, 9.9, 10.6, 10.2] },
            "alpha": 0.05,
            "b": 200,
            "seed": 1
        }"#,
    );
    let path = config.to_str().unwrap();
    let base = run_ok(&["predict", "--config", path], "1");
    let reseeded = run_ok(&["predict", "--config", path, "--seed", "2"], "1");
    assert_ne!(base, reseeded, "a different seed must move the bootstrap bound");

    let csv = run_ok(&["predict", "--config", path, "--format", "csv"], "1");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,family,side,level,endpoint,replicates,failures,u_tilde,seed"
    );
    let row = lines.next().unwrap();
    let endpoint = row.split(',').nth(4).unwrap();
    assert!(
        endpoint.contains('e') && endpoint.split('e').next().unwrap().len() >= 17,
        "endpoint must carry 17 significant digits, got {endpoint}"
    );
}

#[test]
fn output_goes_to_the_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.json",
        r#"{
            "task": "predict",
            "family": "normal",
            "method": "plug_in",
            "data": { "inline": [1.0, 2.0, 3.0] },
            "alpha": 0.5
        }"#,
    );
    let out = dir.path().join("result.json");
    let stdout = run_ok(
        &["predict", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()],
        "1",
    );
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    let document: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(document["result"]["bounds"][0]["endpoint"].as_f64().unwrap(), 2.0);
}

#[test]
fn censored_csv_data_fits_and_predicts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_file(
        dir.path(),
        "lives.csv",
        "hours,status\n34.2,1\n101.0,1\n58.1,1\n222.4,0\n77.3,1\n222.4,0\n145.9,1\n13.8,1\n",
    );
    let config = write_file(
        dir.path(),
        "run.json",
        &format!(
            r#"{{
                "task": "fit",
                "family": "sev",
                "data": {{ "csv": {path:?}, "column": "hours", "status_column": "status" }}
            }}"#,
            path = csv.to_str().unwrap()
        ),
    );
    let stdout = run_ok(&["fit", "--config", config.to_str().unwrap()], "1");
    let document: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(document["result"]["n"], 8);
    assert_eq!(document["result"]["events"], 6);
    assert_eq!(document["result"]["converged"], true);
}

#[test]
fn a_type2_shape_violation_exits_2_with_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_file(
        dir.path(),
        "lives.csv",
        "hours,status\n34.2,1\n101.0,1\n58.1,0\n222.4,1\n",
    );
    let config = write_file(
        dir.path(),
        "run.json",
        &format!(
            r#"{{
                "task": "fit",
                "family": "normal",
                "data": {{ "csv": {path:?}, "column": "hours", "status_column": "status" }}
            }}"#,
            path = csv.to_str().unwrap()
        ),
    );
    let output = run(&["fit", "--config", config.to_str().unwrap()], "1");
    assert_eq!(output.status.code(), Some(2));
    let message = stderr_of(&output);
    assert!(message.contains("line 4") && message.contains("Type-II"), "stderr: {message}");
}

#[test]
fn discrete_bounds_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.json",
        r#"{
            "task": "predict",
            "family": "binomial",
            "method": "jeffreys",
            "data": { "inline": [5] },
            "n": 20,
            "m": 20.0,
            "alpha": 0.05,
            "side": "two_sided"
        }"#,
    );
    let stdout = run_ok(&["predict", "--config", config.to_str().unwrap()], "1");
    let document: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let bounds = document["result"]["bounds"].as_array().unwrap();

    let problem = BinomialProblem::new(5, 20, 20, 0.025).unwrap();
    let expected = binom_bounds(&problem, BinomialMethod::Jeffreys, None).unwrap();
    assert_eq!(bounds[0]["endpoint"].as_f64().unwrap(), expected.lower as f64);
    assert_eq!(bounds[1]["endpoint"].as_f64().unwrap(), expected.upper as f64);
}

#[test]
fn a_degenerate_count_fails_numerically_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "run.json",
        r#"{
            "task": "predict",
            "family": "binomial",
            "method": "nelson",
            "data": { "inline": [0] },
            "n": 20,
            "m": 20.0,
            "alpha": 0.05,
            "side": "upper"
        }"#,
    );
    let output = run(&["predict", "--config", config.to_str().unwrap()], "1");
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr_of(&output).contains("nelson"), "stderr: {}", stderr_of(&output));
}

#[test]
fn nonparametric_predictions_render_their_own_tables() {
    let dir = tempfile::tempdir().unwrap();
    let data = "3.1, 2.7, 3.9, 3.3, 2.9, 3.6, 3.0, 3.4, 2.8, 3.7, 3.2, 3.5, 2.6, 3.8, 3.05, 3.45, 2.95, 3.65, 3.15";
    let conformal = write_file(
        dir.path(),
        "conformal.json",
        &format!(
            r#"{{
                "task": "predict",
                "method": "conformal_mean",
                "data": {{ "inline": [{data}] }},
                "alpha": 0.1
            }}"#
        ),
    );
    let csv = run_ok(&["predict", "--config", conformal.to_str().unwrap(), "--format", "csv"], "1");
    assert!(csv.starts_with("method,alpha,randomized,u,interval_lower,interval_upper\n"));
    assert!(csv.lines().nth(1).unwrap().starts_with("conformal_mean,"));

    let order = write_file(
        dir.path(),
        "order.json",
        &format!(
            r#"{{
                "task": "predict",
                "method": "order_statistic",
                "data": {{ "inline": [{data}] }},
                "r": 1,
                "s": 19
            }}"#
        ),
    );
    let csv = run_ok(&["predict", "--config", order.to_str().unwrap(), "--format", "csv"], "1");
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "order_statistic");
    assert_eq!(fields[1], "1");
    assert_eq!(fields[2], "19");
    let coverage: f64 = fields[5].parse().unwrap();
    assert!((coverage - 0.9).abs() < 1e-12);
}

#[test]
fn headerless_single_column_csv_loads() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_file(dir.path(), "plain.csv", "1.0\n2.0\n3.0\n");
    let config = write_file(
        dir.path(),
        "run.json",
        &format!(
            r#"{{
                "task": "predict",
                "family": "normal",
                "method": "plug_in",
                "data": {{ "csv": {path:?} }},
                "alpha": 0.5,
                "side": "upper"
            }}"#,
            path = csv.to_str().unwrap()
        ),
    );
    let stdout = run_ok(&["predict", "--config", config.to_str().unwrap()], "1");
    let document: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(document["result"]["bounds"][0]["endpoint"].as_f64().unwrap(), 2.0);
}
