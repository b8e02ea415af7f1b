use std::path::PathBuf;
use std::process::{Command, Output};

fn martlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_martlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn constants_json_layout() {
    let o = martlab(&["constants", "--p", "4", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["config"]["p"], "4");
    let rows = v["rows"].as_array().unwrap();
    let pich = rows.iter().find(|r| r["name"] == "pichorides").unwrap();
    let value = pich["lhs"].as_f64().unwrap();
    assert!((value - (1.0 + 2f64.sqrt())).abs() < 1e-13);
    assert_eq!(pich["method"], "closed_form");
    assert!(v.get("wall_time").is_some());
}

#[test]
fn csv_has_comment_header_then_columns() {
    let o = martlab(&["constants", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# martlab "));
    let header = lines.find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "check,name,parameter,trial,lhs,rhs,slack,std_err,method,pass");
    assert!(text.contains("# pass=true"));
    assert!(!text.contains("wall"));
}

#[test]
fn flags_override_config_file() {
    let cfg = tmp("override.cfg");
    std::fs::write(&cfg, "# comment\np = 4\n").unwrap();
    let o = martlab(&[
        "--config",
        cfg.to_str().unwrap(),
        "constants",
        "--p",
        "3",
        "--output",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["p"], "3");

    let o = martlab(&["--config", cfg.to_str().unwrap(), "constants", "--output", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["p"], "4");
}

#[test]
fn threshold_from_config_changes_verdict() {
    let args = [
        "verify",
        "--function",
        "log_U",
        "--K",
        "2",
        "--points",
        "500",
        "--check",
        "majorization",
    ];
    assert_eq!(martlab(&args).status.code(), Some(0));
    let cfg = tmp("strict.cfg");
    std::fs::write(&cfg, "tol_majorization = -1\n").unwrap();
    let mut strict = vec!["--config", cfg.to_str().unwrap()];
    strict.extend(args);
    assert_eq!(martlab(&strict).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    let cfg = tmp("bogus.cfg");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(
        martlab(&["--config", cfg.to_str().unwrap(), "constants"]).status.code(),
        Some(2)
    );
    assert_eq!(martlab(&[]).status.code(), Some(2));
    assert_eq!(martlab(&["suite", "medium"]).status.code(), Some(2));
    assert_eq!(martlab(&["eval", "--function", "nope"]).status.code(), Some(2));
    assert_eq!(martlab(&["simulate", "--experiment", "nope"]).status.code(), Some(2));
}

#[test]
fn module_domain_error_exits_1() {
    let o = martlab(&["constants", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn negative_control_fails_and_plain_scan_passes() {
    let args = [
        "verify",
        "--function",
        "log_U",
        "--K",
        "2",
        "--points",
        "2000",
        "--check",
        "majorization",
    ];
    assert_eq!(martlab(&args).status.code(), Some(0));
    let mut neg = args.to_vec();
    neg.push("--negative-control");
    let o = martlab(&neg);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("negative_control,")).unwrap();
    assert!(row.ends_with(",false"));
}

#[test]
fn out_file_matches_stdout_and_is_seed_stable() {
    let path = tmp("exit.csv");
    let args = [
        "--seed",
        "7",
        "simulate",
        "--experiment",
        "exit",
        "--paths",
        "300",
        "--dt",
        "1e-3",
    ];
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let o = martlab(&with_out);
    assert!(o.stdout.is_empty());
    let file = std::fs::read_to_string(&path).unwrap();
    let o2 = martlab(&args);
    assert_eq!(stdout(&o2), file);
    assert!(file.contains("E tau"));
    assert!(!file.contains("out="));
}

#[test]
fn riesz_circle_lp_small_run() {
    let o = martlab(&[
        "riesz", "--domain", "circle", "--check", "lp", "--p", "4", "--grid", "1024", "--trials", "20", "--output",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);
}
