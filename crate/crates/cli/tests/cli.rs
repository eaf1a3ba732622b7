use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn roymax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roymax"))
        .args(args)
        .env("ROYMAX_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("roymax-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn cdf_grid_gives_one_row_per_point() {
    let o = roymax(&["cdf", "--m", "3", "--n", "5", "--p", "4", "--omega", "2", "--t-grid", "0.1:20:100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("t,cdf"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 100);
    assert!((rows[0][0] - 0.1).abs() < 1e-12 && (rows[99][0] - 20.0).abs() < 1e-12);
    for w in rows.windows(2) {
        assert!(w[1][1] >= w[0][1]);
    }
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r[1])));
}

#[test]
fn json_records_match_csv() {
    let args = ["roc", "--m", "2", "--n", "4", "--p", "5", "--omega", "3", "--pf-grid", "0.01:0.5:5"];
    let csv = csv_rows(&stdout(&roymax(&args)));
    let mut jargs = args.to_vec();
    jargs.extend(["--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&roymax(&jargs))).unwrap();
    let recs = doc.as_array().unwrap();
    assert_eq!(recs.len(), csv.len());
    for (r, c) in recs.iter().zip(&csv) {
        assert!((r["pf"].as_f64().unwrap() - c[0]).abs() < 1e-15);
        assert!((r["pd"].as_f64().unwrap() - c[1]).abs() < 1e-15);
        assert!(c[1] >= c[0]);
    }
}

#[test]
fn quantile_inverts_cdf() {
    let o = roymax(&["quantile", "--m", "3", "--n", "5", "--p", "4", "--q", "0.95", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let x = doc[0]["quantile"].as_f64().unwrap();
    let spec = format!("{x}:{x}:1");
    let back = csv_rows(&stdout(&roymax(&["cdf", "--m", "3", "--n", "5", "--p", "4", "--t-grid", &spec])));
    assert!((back[0][1] - 0.95).abs() < 1e-9);
}

#[test]
fn out_writes_file_and_manifest() {
    let path = scratch("sim.csv");
    let p = path.to_str().unwrap();
    let args = ["simulate", "cdf", "--m", "3", "--n", "5", "--p", "4", "--omega", "2", "--trials", "2000"];
    let run = |seed: &str| {
        let mut a = args.to_vec();
        a.extend(["--t-grid", "0.5:10:4", "--seed", seed, "--out", p]);
        assert!(roymax(&a).status.success());
        std::fs::read_to_string(&path).unwrap()
    };
    let first = run("9");
    assert_eq!(first.lines().next(), Some("x,empirical_cdf,exact_cdf"));
    assert_eq!(first, run("9"));
    assert_ne!(first, run("10"));

    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(format!("{p}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 10);
    assert_eq!(manifest["resolved_config"]["trials"], 2000);
    assert_eq!(manifest["outputs"][0], p);
    assert!(manifest["version"].is_string());
    assert!(manifest["command"].as_array().unwrap().iter().any(|a| a == "simulate"));
}

#[test]
fn asympt_constants() {
    let o = roymax(&["asympt", "--c1", "0.5", "--c2", "0.5", "--gamma", "3", "--constants", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let gp = doc["gamma_p"].as_f64().unwrap();
    // c1 = c2 = 1/2: r = sqrt(3)/2, gamma_p = 1 + sqrt(3)
    assert!((doc["r"].as_f64().unwrap() - 0.75f64.sqrt()).abs() < 1e-14);
    assert!((gp - (1.0 + 3f64.sqrt())).abs() < 1e-13);
    assert!((doc["xi"].as_f64().unwrap() - 14.0).abs() < 1e-12);
}

#[test]
fn validate_passes() {
    let o = roymax(&["validate", "--trials", "5000"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().count() > 5);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        vec!["cdf", "--m", "3", "--n", "5", "--p", "4", "--t-grid", "bad"],
        vec!["cdf", "--m", "0", "--n", "5", "--p", "4", "--t-grid", "1:2:3"],
        vec!["quantile", "--m", "3", "--n", "5", "--p", "4", "--q", "1.5"],
        vec!["simulate", "cdf", "--m", "3", "--n", "5", "--p", "4", "--covariance", "toeplitz"],
    ] {
        let o = roymax(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}

#[test]
fn ill_conditioned_cdf_points_to_highdim() {
    let o = roymax(&["cdf", "--m", "1", "--n", "20", "--p", "30", "--omega", "40", "--t-grid", "10:10:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--regime highdim"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_roymax"))
        .args(["asympt", "--c1", "0.5", "--c2", "0.5", "--constants"])
        .env("ROYMAX_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
