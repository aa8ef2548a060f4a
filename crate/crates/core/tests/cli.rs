use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const PT_PARAMS: &str = r#"{"ladder": {"beta_min": 0.2, "beta_max": 3.0, "rungs": 4}, "max_sweeps": 200}"#;

fn divbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divbench"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(&divbench(
        dir.path(),
        &["generate", "--classes", "ran1,ac3", "--sizes", "2", "--count", "1", "--seed", "5", "--out-dir", "inst"],
    ));
    dir
}

#[test]
fn generate_writes_named_instances() {
    let dir = setup();
    assert!(dir.path().join("inst/ran1_L2_s5.json").exists());
    assert!(dir.path().join("inst/ac3_L2_s5.json").exists());
}

#[test]
fn solve_then_score() {
    let dir = setup();
    let d = dir.path();
    ok(&divbench(
        d,
        &["solve", "--problem", "inst/ran1_L2_s5.json", "--solver", "pt-icm", "--params", PT_PARAMS, "--seed", "1", "--out", "s.jsonl"],
    ));
    let text = std::fs::read_to_string(d.join("s.jsonl")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // header plus 20 emissions of 8 replicas
    assert_eq!(lines.len(), 1 + 20 * 8);
    let header: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(header["#meta"]["num_spins"], 32);

    let out = ok(&divbench(
        d,
        &["diversity", "--problem", "inst/ran1_L2_s5.json", "--samples", "s.jsonl", "--alpha", "0.1", "--radius", "0.2", "--shuffles", "10", "--upper"],
    ));
    let v: Value = serde_json::from_str(&out).unwrap();
    let lower = v["lower"].as_u64().unwrap();
    assert!(lower >= 1);
    assert!(v["upper"].as_u64().unwrap() >= lower);

    // Same seed, same bytes.
    let again = ok(&divbench(
        d,
        &["solve", "--problem", "inst/ran1_L2_s5.json", "--solver", "pt-icm", "--params", PT_PARAMS, "--seed", "1"],
    ));
    assert_eq!(again, text);
}

#[test]
fn ttd_from_experiment_files() {
    let dir = setup();
    let d = dir.path();
    std::fs::create_dir(d.join("exp")).unwrap();
    for (seed, out) in [("1", "ref.jsonl"), ("2", "exp/a.jsonl"), ("3", "exp/b.jsonl")] {
        ok(&divbench(
            d,
            &["solve", "--problem", "inst/ac3_L2_s5.json", "--solver", "pt-icm", "--params", PT_PARAMS, "--seed", seed, "--out", out],
        ));
    }
    let out = divbench(
        d,
        &[
            "ttd", "--problem", "inst/ac3_L2_s5.json", "--target-from", "ref.jsonl", "--experiments", "exp", "--alpha", "0.1",
            "--radius", "0.2", "--shuffles", "10", "--target-calculations", "2", "--out", "ttd.json",
        ],
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(d.join("ttd.json")).unwrap()).unwrap();
    assert_eq!(v["record"]["experiments"], 2);
    // Two short experiments may miss the target; that is exit code 3.
    let expected = if v["record"]["censored"] == true { 3 } else { 0 };
    assert_eq!(out.status.code(), Some(expected));
    assert!(v["target"]["value"].as_u64().unwrap() >= 1);
}

#[test]
fn import_reference_checks_size_and_energies() {
    let dir = setup();
    let d = dir.path();
    ok(&divbench(
        d,
        &["solve", "--problem", "inst/ran1_L2_s5.json", "--solver", "sa", "--params", r#"{"schedule": [0.5, 1.0, 2.0], "num_reads": 3}"#, "--out", "s.jsonl"],
    ));
    ok(&divbench(d, &["import-reference", "--problem", "inst/ran1_L2_s5.json", "--samples", "s.jsonl", "--out", "ref.jsonl", "--strict"]));
    assert_eq!(std::fs::read(d.join("s.jsonl")).unwrap(), std::fs::read(d.join("ref.jsonl")).unwrap());

    // Wrong instance: energies disagree.
    let out = divbench(d, &["import-reference", "--problem", "inst/ac3_L2_s5.json", "--samples", "s.jsonl", "--out", "x.jsonl", "--strict"]);
    assert_eq!(out.status.code(), Some(2));

    let text = std::fs::read_to_string(d.join("s.jsonl")).unwrap();
    std::fs::write(d.join("short.jsonl"), text.replace("\"num_spins\":32", "\"num_spins\":8")).unwrap();
    let out = divbench(d, &["import-reference", "--problem", "inst/ran1_L2_s5.json", "--samples", "short.jsonl", "--out", "y.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = setup();
    let d = dir.path();
    let missing = divbench(d, &["solve", "--problem", "missing.json", "--solver", "sa", "--params", r#"{"schedule": [1.0]}"#]);
    assert_eq!(missing.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.json"));
    let bad = divbench(d, &["solve", "--problem", "inst/ran1_L2_s5.json", "--solver", "annealer"]);
    assert_eq!(bad.status.code(), Some(2));
    let bad_radius = divbench(d, &["diversity", "--problem", "inst/ran1_L2_s5.json", "--samples", "none.jsonl", "--radius", "2"]);
    assert_ne!(bad_radius.status.code(), Some(0));
}

#[test]
fn benchmark_report_and_censoring() {
    let dir = setup();
    let d = dir.path();
    let config = serde_json::json!({
        "problems": ["inst/ran1_L2_s5.json"],
        "solver": "pt-icm",
        "params": {"ladder": {"beta_min": 0.2, "beta_max": 3.0, "rungs": 4}, "max_sweeps": 500},
        "alpha": 0.05, "radius": 0.2, "num_experiments": 6, "wall_time_ns": 2000000,
        "shuffles": 10, "target_calculations": 2, "out_dir": "out"
    });
    std::fs::write(d.join("cfg.json"), config.to_string()).unwrap();
    ok(&divbench(d, &["benchmark", "--config", "cfg.json"]));
    let csv = std::fs::read_to_string(d.join("out/results.csv")).unwrap();
    assert!(csv.starts_with("instance,class,L,solver,params_hash,target_diversity,p,n_runs,t_a_ns,ttd_ns,censored\n"));
    assert_eq!(csv.lines().count(), 2);
    ok(&divbench(d, &["report", "--results", "out", "--out", "rep"]));
    for f in ["sorted_ttd.csv", "censored.csv", "pairwise_ttd.csv", "diversity_bands.csv"] {
        assert!(d.join("rep").join(f).exists(), "{f}");
    }

    // A budget too small for a single emission leaves every record censored.
    let mut starved = config.clone();
    starved["wall_time_ns"] = 100.into();
    starved["out_dir"] = "starved".into();
    std::fs::write(d.join("starved.json"), starved.to_string()).unwrap();
    let out = divbench(d, &["benchmark", "--config", "starved.json"]);
    assert_eq!(out.status.code(), Some(3));

    let mut unknown = config;
    unknown["colour"] = "blue".into();
    std::fs::write(d.join("unknown.json"), unknown.to_string()).unwrap();
    assert_eq!(divbench(d, &["benchmark", "--config", "unknown.json"]).status.code(), Some(2));
}
