use std::process::{Command, Output};

fn turnpoint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turnpoint"))
        .args(args)
        .output()
        .expect("spawn turnpoint")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn airy_table_rows_and_wronskian() {
    let o = turnpoint(&["airy-table", "--from", "-5", "--to", "2", "--step", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,ai,aip,bi,bip,wronskian"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 15);
    for r in rows {
        let w: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!((w - std::f64::consts::FRAC_1_PI).abs() <= 1e-12);
    }
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(turnpoint(&["airy-table", "--bogus"]).status.code(), Some(2));
    assert_eq!(turnpoint(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn bad_config_is_usage_error() {
    assert_eq!(
        turnpoint(&["approx", "--problem", "/nonexistent/p.json"]).status.code(),
        Some(2)
    );
    assert_eq!(turnpoint(&["approx", "--eps", "-1"]).status.code(), Some(2));
    assert_eq!(turnpoint(&["validate", "--only", "42"]).status.code(), Some(2));
}

#[test]
fn rates_prints_slope_line() {
    let dir = std::env::temp_dir().join(format!("turnpoint-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let problem = dir.join("quad.json");
    std::fs::write(&problem, r#"{"mu_poly": [0.0, 1.0, 0.5]}"#).unwrap();
    let o = turnpoint(&[
        "rates",
        "--problem",
        problem.to_str().unwrap(),
        "--eps",
        "1e-1,5e-2,2.5e-2,1.25e-2",
        "--points",
        "201",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,sup_error");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("# slope="));
}

#[test]
fn output_is_deterministic() {
    let args = ["approx", "--eps", "0.02", "--points", "41"];
    let a = turnpoint(&args);
    let b = turnpoint(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_mirrors_csv_fields() {
    let o = turnpoint(&["series", "--kind", "b0", "--order", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1]["im"].as_f64(), Some(-0.25));
    assert_eq!(rows[2]["re"].as_f64(), Some(-7.0 / 32.0));
}

#[test]
fn every_subcommand_has_a_selftest() {
    for cmd in [
        "approx",
        "airy-table",
        "series",
        "charts-check",
        "validate",
        "rates",
        "eigen",
    ] {
        let o = turnpoint(&[cmd, "--selftest"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stdout(&o));
    }
}

#[test]
fn thread_count_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_turnpoint"))
        .args(["eigen", "--n-max", "2", "--eps", "0.1,0.05"])
        .env("TURNPOINT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_turnpoint"))
        .args(["eigen", "--n-max", "1"])
        .env("TURNPOINT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn charts_check_reports_json() {
    let o = turnpoint(&["charts-check", "--points", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
}
