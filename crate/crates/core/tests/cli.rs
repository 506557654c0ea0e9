use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_instanton")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const PIPELINES: [(&str, &str); 10] = [
    ("alg-delta", "alg_delta.json"),
    ("alh-delta", "alh_delta.json"),
    ("decay-fit", "decay.csv"),
    ("kodaira-classify", "kodaira_dcase3.json"),
    ("expansion-check", "expansion_dk.json"),
    ("twistor-check", "twistor_ak.json"),
    ("twistor-check", "twistor_dk.json"),
    ("torelli", "torelli_d3.json"),
    ("period-integral", "period_ak.json"),
    ("gh-verify", "gh_verify_dk.json"),
];

#[test]
fn shipped_configs_pass_with_checks() {
    for (cmd, file) in PIPELINES {
        let cfg = config(file);
        let out = run(&[cmd, "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{cmd} {file}: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert_eq!(r["schema"], "instanton-report/1");
        assert_eq!(r["command"], cmd);
        assert_eq!(r["pass"], true);
        let checks = r["checks"].as_array().unwrap();
        assert!(!checks.is_empty(), "{cmd}");
        for c in checks {
            assert!(c["residual"].as_f64().unwrap() <= c["threshold"].as_f64().unwrap());
        }
        assert!(r.get("wall_time_s").is_none());
    }
}

#[test]
fn alg_delta_table() {
    let out = run(&["alg-delta", "--config", config("alg_delta.json").to_str().unwrap()]);
    let r = report(&out);
    let got: Vec<(String, String)> = r["results"]["deltas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| (d["beta"].as_str().unwrap().into(), d["delta"].as_str().unwrap().into()))
        .collect();
    let want = [
        ("1", "1"),
        ("1/2", "2"),
        ("1/6", "2"),
        ("5/6", "4/5"),
        ("1/4", "2"),
        ("3/4", "2/3"),
        ("1/3", "2"),
        ("2/3", "1/2"),
    ];
    assert_eq!(got.len(), want.len());
    for ((b, d), (wb, wd)) in got.iter().zip(want) {
        assert_eq!((b.as_str(), d.as_str()), (wb, wd));
    }
}

#[test]
fn kodaira_reports_type_and_multiplicity() {
    let r = report(&run(&["kodaira-classify", "--config", config("kodaira_dcase3.json").to_str().unwrap()]));
    assert_eq!(r["results"]["type"], "DCase3");
    assert_eq!(r["results"]["m"], 1);
}

#[test]
fn wrong_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(config("kodaira_dcase3.json")).unwrap()).unwrap();
    v["expected"]["m"] = 2.into();
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["kodaira-classify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn tiny_tolerance_exits_one() {
    let out = run(&["decay-fit", "--config", config("decay.csv").to_str().unwrap(), "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["threshold"] == 1e-300));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(run(&["torelli", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&path, r#"{"unexpected": 1}"#).unwrap();
    assert_eq!(run(&["alg-delta", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["torelli"]).status.code(), Some(2));
    let cfg = config("alg_delta.json");
    assert_eq!(run(&["alg-delta", "--config", cfg.to_str().unwrap(), "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn out_and_dump_samples_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let csv_path = dir.path().join("samples.csv");
    let cfg = config("expansion_dk.json");
    let out = run(&[
        "expansion-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--dump-samples",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["command"], "expansion-check");
    let mut rd = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<(f64, f64)> = rd.deserialize().map(|r| r.unwrap()).collect();
    assert!(rows.len() >= 8);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
}

#[test]
fn timing_is_opt_in_and_seed_is_echoed() {
    let cfg = config("twistor_ak.json");
    let r = report(&run(&["twistor-check", "--config", cfg.to_str().unwrap(), "--timing", "--seed", "5"]));
    assert!(r["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(r["seed"], 5);
}

#[test]
fn reports_are_reproducible_for_a_seed() {
    let cfg = config("twistor_dk.json");
    let a = run(&["twistor-check", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    let b = run(&["twistor-check", "--config", cfg.to_str().unwrap(), "--seed", "3", "--threads", "2"]);
    assert_eq!(a.stdout, b.stdout);
}
