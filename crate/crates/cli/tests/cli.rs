use std::process::{Command, Output};

use serde_json::Value;

fn metrokit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metrokit")).args(args).env_remove("METROKIT_THREADS").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn local_pg_variance() {
    let out = metrokit(&["variance", "--hamiltonian", "local", "--n", "5", "--state", "pg"]);
    assert!(out.status.success());
    let v = json(&out)["results"]["variance"].as_f64().unwrap();
    assert!((v - 4.25).abs() < 1e-9, "{v}");
}

#[test]
fn ising_first_ladder_block() {
    let out = metrokit(&["algebra", "--hamiltonian", "nn", "--n", "5", "--block", "1"]);
    assert!(out.status.success());
    let report = json(&out);
    let block = &report["results"]["s3_block"];
    assert_eq!(block["dim"], serde_json::json!([8, 2]));
    for (i, row) in block["entries"].as_array().unwrap().iter().enumerate() {
        for (j, z) in row.as_array().unwrap().iter().enumerate() {
            let re = z[0].as_f64().unwrap();
            let im = z[1].as_f64().unwrap();
            let target = if i == j { 2.0 } else { 0.0 };
            assert!((re - target).abs() < 1e-9 && im.abs() < 1e-9, "({i},{j}) = {re}+{im}i");
        }
    }
}

#[test]
fn ghz_bound_without_noise() {
    let out = metrokit(&["bound", "--variant", "local-ghz", "--n", "4", "--q2", "0"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["results"]["cq"].as_f64(), Some(64.0));
}

#[test]
fn unknown_case_exits_two() {
    let out = metrokit(&["reproduce", "no-such-case"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_case_passes() {
    let out = metrokit(&["reproduce", "nonlocal-n4"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["results"]["passed"], Value::Bool(true));
    assert!(report["results"]["assertions"].as_array().unwrap().iter().any(|a| a["name"] == "spectrum levels and multiplicities"));
}

#[test]
fn computation_error_is_structured() {
    let out = metrokit(&["qfi", "--hamiltonian", "cluster", "--n", "3", "--p", "0.9"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "NonCommutingNoise");
}

#[test]
fn conflicting_channel_flags_are_usage_errors() {
    let out = metrokit(&["qfi", "--hamiltonian", "nn", "--n", "3", "--p", "0.9", "--gamma", "1", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = metrokit(&["qfi", "--hamiltonian", "nn", "--n", "3", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_metrokit"))
        .args(["variance", "--hamiltonian", "nn", "--n", "3"])
        .env("METROKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_output_is_deterministic() {
    let args = ["freq-scan", "--n", "4", "--search", "--seed", "11"];
    let first = metrokit(&args);
    let second = metrokit(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn freq_scan_csv_columns() {
    let out = metrokit(&["freq-scan", "--n", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,k,t_opt,f_over_t,i_rel"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][1], "product");
    assert_eq!(rows[0][4], "1.0");
    for row in rows.iter().filter(|r| r[1] != "product") {
        assert!(row[4].parse::<f64>().unwrap() > 1.0, "{row:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("metrokit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = metrokit(&["variance", "--hamiltonian", "nn", "--n", "5", "--state", "optimal", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((report["results"]["variance"].as_f64().unwrap() - 16.0).abs() < 1e-9);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["algebra", "state", "variance", "qfi", "bound", "freq-scan", "reproduce"] {
        let out = metrokit(&[sub, "--help"]);
        assert!(out.status.success(), "{sub}");
        assert!(!out.stdout.is_empty());
    }
}
