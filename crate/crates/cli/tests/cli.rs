use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dicomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dicomo")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn theory_reports_poisson_constants() {
    let v = json_of(&dicomo(&["theory", "--dist", r#"{"family":"poisson_product","lambda":2}"#]));
    assert!((v["s_plus"].as_f64().unwrap() - 0.7968121).abs() < 1e-6);
    assert!((v["nu_hat_plus"].as_f64().unwrap() - 0.4063757).abs() < 1e-6);
    assert!(v["provenance"].is_object());
}

#[test]
fn generate_then_diameter_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let out = dicomo(&["generate", "--model", "dout", "--d", "2", "--n", "300", "--seed", "9", "--out", path(&g)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&g).unwrap();
    assert!(text.starts_with("# n=300 m=600 simple=false seed=9\n"));

    let a = json_of(&dicomo(&["diameter", "--graph", path(&g), "--threads", "2"]));
    let b = json_of(&dicomo(&["diameter", "--model", "dout", "--d", "2", "--n", "300", "--seed", "9"]));
    for key in ["diameter", "argmax", "finite_pairs", "n", "m"] {
        assert_eq!(a[key], b[key], "{key}");
    }
    assert!(a["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(a["argmax"].as_array().unwrap().len(), 2);
}

#[test]
fn same_seed_same_edge_list() {
    let args = ["generate", "--dist", r#"{"family":"point","d_in":2,"d_out":2}"#, "--n", "50", "--seed", "4"];
    assert_eq!(dicomo(&args).stdout, dicomo(&args).stdout);
}

#[test]
fn simple_model_writes_simple_header() {
    let out = dicomo(&[
        "generate", "--model", "dcm-simple", "--dist", r#"{"family":"point","d_in":2,"d_out":2}"#, "--n", "20",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("simple=true"));
}

#[test]
fn config_keys_override_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"model": "binom", "p": 1.0, "n": 6}"#).unwrap();
    // the flags ask for a d-out graph; the config wins
    let v = json_of(&dicomo(&["diameter", "--model", "dout", "--d", "1", "--n", "9", "--config", path(&cfg)]));
    assert_eq!((v["diameter"].as_u64(), v["n"].as_u64(), v["m"].as_u64()), (Some(1), Some(6), Some(30)));

    std::fs::write(&cfg, r#"{"typo": 1}"#).unwrap();
    let out = dicomo(&["theory", "--config", path(&cfg)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("typo"));
}

#[test]
fn gw_operations_emit_estimates() {
    let point = r#"{"kind":"point","k":2}"#;
    let v = json_of(&dicomo(&["gw", "--offspring", point, "--op", "survival", "--runs", "1000"]));
    assert_eq!(v["estimate"].as_f64(), Some(1.0));
    assert_eq!(v["runs"].as_u64(), Some(1000));

    let pois = r#"{"kind":"poisson","lambda":2}"#;
    let v = json_of(&dicomo(&["gw", "--offspring", pois, "--op", "thin", "--t", "3", "--omega", "50", "--runs", "20000"]));
    let e = v["estimate"].as_f64().unwrap();
    assert!(e > 0.0 && e < 1.0);
    assert_eq!(v["params"]["burn_in"].as_u64(), Some(6));

    let v = json_of(&dicomo(&["gw", "--offspring", pois, "--op", "duality", "--runs", "50000"]));
    assert!(v["estimate"].as_f64().unwrap() < 0.05);
    assert!(v["stderr"].is_null());

    let half = r#"{"kind":"pmf","pmf":[0.5,0.25,0.25]}"#;
    let v = json_of(&dicomo(&["gw", "--offspring", half, "--op", "martingale", "--t", "4", "--runs", "20000"]));
    assert!((v["estimate"].as_f64().unwrap() - 1.0).abs() < 0.1);
}

#[test]
fn explore_profiles_and_scans() {
    let dist = r#"{"family":"point","d_in":2,"d_out":2}"#;
    let v = json_of(&dicomo(&["explore", "--dist", dist, "--n", "1000", "--omega", "16", "--start", "5"]));
    assert_eq!(v["sizes"][0].as_u64(), Some(1));
    assert_eq!(v["omega"].as_u64(), Some(16));

    let v = json_of(&dicomo(&["explore", "--dist", dist, "--n", "1000", "--omega", "16", "--scan", "50", "--direction", "in"]));
    assert_eq!(v["probes"].as_u64(), Some(50));
    assert_eq!(v["thin_counts"][0].as_u64(), Some(50));
}

#[test]
fn experiment_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("e.json");
    std::fs::write(
        &cfg,
        r#"{"kind": "diameter_convergence", "model": {"model": "dout", "d": 2},
            "sizes": [100, 200], "replicates": 2, "master_seed": 3}"#,
    )
    .unwrap();
    let mut csvs = Vec::new();
    for threads in ["1", "3"] {
        let csv = dir.path().join(format!("r{threads}.csv"));
        let summary = dir.path().join(format!("s{threads}.json"));
        let out = dicomo(&[
            "experiment", "--config", path(&cfg), "--threads", threads, "--csv", path(&csv), "--summary", path(&summary),
        ]);
        let v = json_of(&out);
        assert_eq!(v["per_size"].as_array().unwrap().len(), 2);
        let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
        assert_eq!(on_disk["per_size"], v["per_size"]);
        csvs.push(std::fs::read_to_string(&csv).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0].lines().count(), 5);
}

#[test]
fn bad_input_fails_cleanly() {
    let out = dicomo(&["generate", "--model", "dout", "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--d"));
    let out = dicomo(&["experiment", "--kind", "typical_distance", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
