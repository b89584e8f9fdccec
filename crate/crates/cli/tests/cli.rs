//! End-to-end tests of the `bvsieve` binary: exit codes, report schemas,
//! cache behavior and output determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bvsieve"))
}

fn run(args: &[&str], cache: &Path) -> Output {
    bin()
        .args(args)
        .arg("--cache-dir")
        .arg(cache)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", text(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON value")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn field_info_reports_invariants() {
    let out = bin()
        .args(["field", "info", "--poly", "1,0,1"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["d_k"], -4);
    assert_eq!(v["degree"], 2);
    assert_eq!(v["signature"]["r1"], 0);
    assert_eq!(v["signature"]["r2"], 1);
    assert_eq!(v["maximality_certified"], true);
    assert_eq!(v["label"], "x^2+1");
}

#[test]
fn field_info_accepts_negative_leading_coefficients() {
    let out = bin()
        .args(["field", "info", "--poly", "-1,1"])
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["degree"], 1);
    assert_eq!(v["d_k"], 1);
}

#[test]
fn field_info_rejects_reducible_polynomial() {
    let out = bin()
        .args(["field", "info", "--poly", "1,2,1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("reducible"));
}

#[test]
fn enumerate_builds_then_reuses_cache_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ideals", "enumerate", "--poly", "1,0,1", "--limit", "1000"];
    let first = run(&args, dir.path());
    let second = run(&args, dir.path());
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "cache reuse changes the report");
    assert!(text(&second.stderr).contains("cache hit"));
    let v = stdout_json(&first);
    // independent count: sum over n <= 1000 of the Kronecker divisor count
    assert_eq!(v["count"], 787);
    assert_eq!(v["residue"]["method"], "exact_quadratic_imaginary");
    let file = dir.path().join(v["cache_file"].as_str().unwrap());
    assert!(file.is_file());
}

#[test]
fn enumerate_limit_one_counts_only_the_unit_ideal() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["ideals", "enumerate", "--poly", "1,0,1", "--limit", "1"],
        dir.path(),
    );
    assert_eq!(stdout_json(&out)["count"], 1);
}

#[test]
fn default_cache_dir_is_created_under_the_working_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["ideals", "enumerate", "--poly", "1,0,1", "--limit", "100"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join(".bvsieve-cache").is_dir());
}

#[test]
fn cache_dir_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["ideals", "enumerate", "--poly", "1,0,1", "--limit", "100"])
        .env("BVSIEVE_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("ideals-1_0_1-q100.jsonl").is_file());
}

#[test]
fn sum_without_cache_is_an_environment_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sum", "bv", "--poly", "1,0,1", "--x", "100", "--w", "2", "--y", "10",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("cache"));
}

#[test]
fn sum_reports_are_identical_across_thread_counts() {
    let args = [
        "sum", "bv", "--poly", "1,0,1", "--x", "2000", "--w", "5", "--y", "50", "--build",
    ];
    let mut outs = Vec::new();
    for threads in ["1", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let out = bin()
            .args(args)
            .arg("--cache-dir")
            .arg(dir.path())
            .env("BVSIEVE_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", text(&out.stderr));
        outs.push(out.stdout);
    }
    assert_eq!(outs[0], outs[1], "thread count leaked into the report");
    let v: Value = serde_json::from_slice(&outs[0]).unwrap();
    assert_eq!(v["statement"], "thm1.1");
    assert_eq!(v["elapsed_ms"], 0);
    assert!(v["lhs"].as_f64().unwrap() >= 1.0);
}

#[test]
fn bilinear_at_the_degenerate_lower_limit_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sum",
            "bilinear",
            "--poly",
            "1,0,1",
            "--x",
            "1",
            "--w",
            "1",
            "--y",
            "2",
            "--build",
        ],
        dir.path(),
    );
    let v = stdout_json(&out);
    assert_eq!(v["statement"], "thm1.3");
    assert_eq!(v["lhs"], 0.0);
}

#[test]
fn weighted_alpha_outside_the_open_interval_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    for alpha in ["1.5", "0.5", "1.0"] {
        let out = run(
            &[
                "sum", "weighted", "--poly", "1,0,1", "--x", "100", "--w", "2", "--y", "10",
                "--alpha", alpha, "--build",
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(2), "alpha = {alpha}");
    }
}

#[test]
fn weighted_requires_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sum", "weighted", "--poly", "1,0,1", "--x", "100", "--w", "2", "--y", "10",
            "--build",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sum_csv_format_emits_header_and_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sum", "bv", "--poly", "1,0,1", "--x", "500", "--w", "2", "--y", "20", "--build",
            "--format", "csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let body = text(&out.stdout);
    let mut lines = body.lines();
    let header = lines.next().unwrap();
    let row = lines.next().unwrap();
    assert!(header.starts_with("statement,"));
    assert_eq!(header.split(',').count(), row.split(',').count());
}

#[test]
fn verify_single_statement_reports_and_passes() {
    let out = bin()
        .args([
            "verify", "--lemma", "3.6", "--poly", "1,0,1", "--grid", "1e3,3e3",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", text(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["lemma"], "3.6");
    assert_eq!(v["grid"], serde_json::json!([1000, 3000]));
    assert_eq!(v["pass"], true);
    assert!(text(&out.stderr).contains("1/1 checks passed"));
}

#[test]
fn verify_unknown_statement_is_usage_error() {
    let out = bin()
        .args([
            "verify", "--lemma", "9.99", "--poly", "1,0,1", "--grid", "1e3,3e3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_without_selection_is_usage_error() {
    let out = bin().args(["verify", "--poly", "1,0,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_csv_rows_match_report_count() {
    let out = bin()
        .args([
            "verify", "--lemma", "3.4", "--lemma", "3.6", "--poly", "1,0,1", "--grid",
            "1e3,2e3,4e3", "--format", "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", text(&out.stderr));
    let body = text(&out.stdout);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "lemma,field,grid_last,lhs_last,main_last,residual_last,exponent,pass");
    assert_eq!(lines.len(), 1 + 2, "one header plus one row per check");
}

#[test]
fn verify_writes_a_baseline_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bands.json");
    let out = bin()
        .args([
            "verify", "--lemma", "3.6", "--poly", "1,0,1", "--grid", "1e3,3e3",
        ])
        .arg("--write-baseline")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let bands: Value = serde_json::from_reader(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(bands["version"], 1);
    assert!(bands["bands"]["x^2+1|3.6"].as_f64().unwrap() > 0.0);
}

#[test]
fn config_file_supplies_defaults_and_residue_policy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "poly = \"1,0,1\"\nlimit = 200\n[residue]\nmethod = \"user\"\nuser_value = 0.785\n",
    )
    .unwrap();
    let out = bin()
        .args(["ideals", "enumerate"])
        .arg("--config")
        .arg(&cfg)
        .arg("--cache-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["limit"], 200);
    assert_eq!(v["residue"]["method"], "user_supplied");
    assert_eq!(v["residue"]["value"], 0.785);
}

#[test]
fn config_file_with_unknown_keys_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "polly = \"1,0,1\"\n").unwrap();
    let out = bin()
        .args(["field", "info"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupt_cache_is_an_environment_error() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ideals", "enumerate", "--poly", "1,0,1", "--limit", "100"];
    assert!(run(&args, dir.path()).status.success());
    let file = dir.path().join("ideals-1_0_1-q100.jsonl");
    std::fs::write(&file, "not json\n").unwrap();
    let out = run(&args, dir.path());
    assert_eq!(out.status.code(), Some(3));
}
