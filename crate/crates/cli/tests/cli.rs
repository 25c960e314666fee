use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn epibvp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epibvp"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("EPIBVP_OUT")
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .map(|d| d.map(|e| e.unwrap().file_name().into_string().unwrap()).collect())
        .unwrap_or_default();
    v.sort();
    v
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn zero_lambda_gives_trivial_and_upper() {
    let tmp = tempfile::tempdir().unwrap();
    let out = epibvp(tmp.path(), &["solve", "--problem", "p2", "--lambda", "0"]);
    assert!(out.status.success());
    assert_eq!(files(tmp.path()), ["p2_0_trivial.json", "p2_0_upper.json"]);
    let t = json(&tmp.path().join("p2_0_trivial.json"));
    assert_eq!(t["c"].as_f64(), Some(0.0));
    assert_eq!(t["label"], "trivial");
}

#[test]
fn past_critical_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = epibvp(tmp.path(), &["solve", "--problem", "p2", "--lambda", "40"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no real c"));
    assert!(files(tmp.path()).is_empty());
}

#[test]
fn short_bracket_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let out = epibvp(tmp.path(), &["scan", "--problem", "p1", "--lambda-max", "100"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_input_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path();
    assert_eq!(epibvp(p, &["greens-check", "--problem", "p3", "--k", "3"]).status.code(), Some(1));
    assert_eq!(epibvp(p, &["solve", "--problem", "p7", "--lambda", "1"]).status.code(), Some(1));
    assert_eq!(epibvp(p, &["solve", "--problem", "p1"]).status.code(), Some(1));
    let shift = ["solve", "--problem", "p3", "--lambda", "1", "--engine", "monotone", "--k", "3"];
    assert_eq!(epibvp(p, &shift).status.code(), Some(1));
}

#[test]
fn both_engines_at_negative_lambda() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["solve", "--problem", "p1", "--lambda", "-1", "--engine", "both"];
    assert!(epibvp(tmp.path(), &args).status.success());
    assert_eq!(
        files(tmp.path()),
        [
            "p1_-1_alpha_monotone.json",
            "p1_-1_beta_monotone.json",
            "p1_-1_engine_gap.json",
            "p1_-1_negative.json",
            "p1_-1_positive.json",
        ]
    );
    let gap = json(&tmp.path().join("p1_-1_engine_gap.json"));
    for side in gap["sides"].as_array().unwrap() {
        assert_eq!(side["nearest"], "positive");
        assert!(side["gap"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn radial_csv_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["solve", "--problem", "p3", "--lambda", "5", "--format", "csv"];
    assert!(epibvp(tmp.path(), &args).status.success());
    let text = fs::read_to_string(tmp.path().join("p3_5_lower.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,w,phi,residual"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
    assert_eq!(last[2], 0.0);
    assert_eq!(lines.count(), 1001);
}

#[test]
fn scan_meets_tolerance() {
    let tmp = tempfile::tempdir().unwrap();
    let out = epibvp(tmp.path(), &["scan", "--problem", "p2", "--tol", "0.1"]);
    assert!(out.status.success());
    let r = json(&tmp.path().join("p2_critical.json"));
    let width = r["lambda_hi"].as_f64().unwrap() - r["lambda_lo"].as_f64().unwrap();
    assert!(width <= 0.1 && width > 0.0);
    assert_eq!(r["within_bounds"], true);
}

#[test]
fn greens_range_all_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let out = epibvp(tmp.path(), &["greens-check", "--problem", "p2", "--k", "0.1..9.8"]);
    assert!(out.status.success());
    let r = json(&tmp.path().join("p2_greens.json"));
    assert_eq!(r["all_pass"], true);
    assert_eq!(r["entries"].as_array().unwrap().len(), 5);
}

#[test]
fn greens_range_records_invalid_samples() {
    let tmp = tempfile::tempdir().unwrap();
    let out = epibvp(tmp.path(), &["greens-check", "--problem", "p3", "--k", "1..4", "--samples", "4"]);
    assert!(out.status.success());
    let r = json(&tmp.path().join("p3_greens.json"));
    let errors: Vec<bool> = r["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["error"].is_string())
        .collect();
    assert_eq!(errors, [false, false, true, true]);
}

#[test]
fn existence_profile_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = epibvp(tmp.path(), &["existence-profile", "--problem", "p3", "--lambdas", "0:5:20"]);
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("p3_existence.csv")).unwrap();
    let counts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(counts, ["2", "2", "2", "0", "0"]);
}

#[test]
fn residual_table_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let out = epibvp(tmp.path(), &["residual-table", "--problem", "p3", "--lambda", "11.34"]);
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("p3_11.34_residuals.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("r,lower,upper"));
    assert_eq!(text.lines().count(), 11);
    for line in text.lines().skip(1) {
        for v in line.split(',').skip(1) {
            assert!(v.parse::<f64>().unwrap().abs() <= 1e-8, "{line}");
        }
    }
}

#[test]
fn monotone_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let out = epibvp(tmp.path(), &["monotone", "--problem", "p2", "--lambda", "20"]);
    assert!(out.status.success());
    let r = json(&tmp.path().join("p2_20_monotone.json"));
    assert_eq!(r["converged"], true);
    assert_eq!(r["steps"].as_array().unwrap().len(), r["iterations"].as_u64().unwrap() as usize);
}

#[test]
fn artifacts_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["solve", "--problem", "p3", "--lambda", "4", "--engine", "both"];
    assert!(epibvp(a.path(), &args).status.success());
    assert!(epibvp(b.path(), &args).status.success());
    let names = files(a.path());
    assert_eq!(names, files(b.path()));
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n}");
    }
}

#[test]
fn floats_keep_seventeen_digits() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(epibvp(tmp.path(), &["solve", "--problem", "p3", "--lambda", "1"]).status.success());
    let text = fs::read_to_string(tmp.path().join("p3_1_upper.json")).unwrap();
    let c_line = text.lines().find(|l| l.trim_start().starts_with("\"c\"")).unwrap();
    let digits = c_line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = digits.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17, "{c_line}");
}

#[test]
fn config_file_and_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    let from_file = tmp.path().join("file_out");
    fs::write(
        &cfg,
        format!("# run\nproblem = p3\nlambda = 2\nout = {}\n", from_file.display()),
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_epibvp");

    let out = Command::new(bin)
        .args(["--config", cfg.to_str().unwrap(), "solve", "--lambda", "3"])
        .env_remove("EPIBVP_OUT")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(files(&from_file), ["p3_3_lower.json", "p3_3_upper.json"]);

    let env_dir = tmp.path().join("env_out");
    let out = Command::new(bin)
        .args(["--config", cfg.to_str().unwrap(), "solve"])
        .env("EPIBVP_OUT", &env_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(files(&env_dir), ["p3_2_lower.json", "p3_2_upper.json"]);

    let flag_dir = tmp.path().join("flag_out");
    let out = Command::new(bin)
        .args(["--config", cfg.to_str().unwrap(), "solve", "--out", flag_dir.to_str().unwrap()])
        .env("EPIBVP_OUT", &env_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(files(&flag_dir).len(), 2);

    fs::write(&cfg, "problem = p3\nbogus = 1\n").unwrap();
    let out = Command::new(bin)
        .args(["--config", cfg.to_str().unwrap(), "solve", "--lambda", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
