//! End-to-end runs of the `vqubits` binary.

use std::process::{Command, Output};

fn vq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqubits")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn threshold_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &str| {
        ["threshold", "--scheme", "compact-interleaved", "--d", "3,5,7", "--p", "1e-3:1e-2:log8", "--trials", "20", "--seed", "7", "--bootstrap", "0", "--out", out]
            .map(String::from)
            .to_vec()
    };
    for out in [&a, &b] {
        let argv = args(out.to_str().unwrap());
        let o = vq(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "scheme,variant,d,k,param_name,param_value,trials,failures,logical_error_rate,stderr,seed");
    assert_eq!(lines.count(), 24);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn config_file_with_argv_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"setup": "natural-all-at-once", "distances": [3], "p_values": [1e-3, 2e-3], "trials_per_point": 10, "seed": 3}"#).unwrap();
    let o = vq(&["threshold", "--config", cfg.to_str().unwrap(), "--trials", "15", "--bootstrap", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("natural,all-at-once,3,10,p,") && r.contains(",15,")));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"trials": 10}"#).unwrap();
    assert_eq!(vq(&["threshold", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn sensitivity_sweeps_one_parameter() {
    let o = vq(&["sensitivity", "--param", "k", "--values", "2,5", "--d", "3", "--trials", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("compact,interleaved,3,2,k,2,") && rows[1].starts_with("compact,interleaved,3,5,k,5,"));
}

#[test]
fn magic_table() {
    let o = vq(&["magic", "--budget", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("1.82x") && text.contains("1.22x"), "{text}");
    let o = vq(&["magic", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["speedup_vs_fast"].as_f64().unwrap() - 100.0 / 55.0).abs() < 1e-12);
}

#[test]
fn verify_cnot_exit_codes() {
    assert_eq!(vq(&["verify-cnot", "--d", "3", "--scheme", "natural"]).status.code(), Some(0));
    assert_eq!(vq(&["verify-cnot", "--d", "3,5", "--scheme", "compact"]).status.code(), Some(0));
    assert_eq!(vq(&["verify-cnot", "--d", "3", "--omit", "4"]).status.code(), Some(1));
    assert_eq!(vq(&["verify-cnot", "--scheme", "baseline"]).status.code(), Some(2));
}

#[test]
fn layout_json_and_usage_errors() {
    let o = vq(&["layout", "--scheme", "compact", "--d", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["transmon_count"], 29);
    assert_eq!(v["cavity_count"], 25);
    assert_eq!(vq(&["layout", "--d", "2"]).status.code(), Some(2));
    assert_eq!(vq(&["threshold", "--p", "0:1:sq4"]).status.code(), Some(2));
    assert_eq!(vq(&["threshold", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(vq(&[]).status.code(), Some(2));
}
