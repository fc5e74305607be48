use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn dyngibbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyngibbs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit status")
}

fn run_fixture(model: &str, out: &Path, extra: &[&str]) -> Output {
    let inst = fixture(&format!("{model}.json"));
    let ups = fixture(&format!("{model}.updates.jsonl"));
    let qs = fixture(&format!("{model}.queries.json"));
    let mut args = vec![
        "run",
        "--instance",
        inst.to_str().unwrap(),
        "--updates",
        ups.to_str().unwrap(),
        "--queries",
        qs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--schedule",
        "N=300,eps=0.05",
        "--seed",
        "11",
    ];
    args.extend_from_slice(extra);
    dyngibbs(&args)
}

#[test]
fn run_writes_normalized_estimates() {
    for (model, delta) in [
        ("ising_cycle6", "check"),
        ("hardcore_path5", "model:hardcore"),
        ("coloring_path4", "check"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = run_fixture(model, dir.path(), &["--delta", delta]);
        assert_eq!(code(&out), 0, "{model}: {}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(dir.path().join("estimates.jsonl")).unwrap();
        let mut lines = 0;
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            lines += 1;
            if v["kind"] == "map" {
                continue;
            }
            let est: Vec<f64> = serde_json::from_value(v["estimate"].clone()).unwrap();
            let total: f64 = est.iter().sum();
            assert!((total - 1.0).abs() < 1e-9, "{model}: {line}");
        }
        assert!(lines > 0);
        for f in ["steps.jsonl", "samples.jsonl", "final_instance.json"] {
            assert!(dir.path().join(f).exists(), "{model}: missing {f}");
        }
    }
}

#[test]
fn final_instance_matches_replayed_stream() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_fixture("ising_cycle6", dir.path(), &[])), 0);
    let base = dyngibbs_cli::formats::parse_instance(
        &std::fs::read_to_string(fixture("ising_cycle6.json")).unwrap(),
    )
    .unwrap();
    let ups = std::fs::read_to_string(fixture("ising_cycle6.updates.jsonl")).unwrap();
    let mut inst = base.clone();
    for b in dyngibbs_cli::formats::parse_update_stream(&ups, &base).unwrap() {
        inst = inst.apply(&b).unwrap();
    }
    let written = std::fs::read_to_string(dir.path().join("final_instance.json")).unwrap();
    assert_eq!(written, dyngibbs_cli::formats::serialize_instance(&inst));
}

#[test]
fn malformed_instance_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"q\": 2, \"vertices\": [").unwrap();
    let out = dyngibbs(&["run", "--instance", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_update_line_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let ups = dir.path().join("u.jsonl");
    std::fs::write(&ups, "{\"ops\": [{\"op\": \"del_vertex\", \"id\": 999}]}\n").unwrap();
    let inst = fixture("ising_cycle6.json");
    let out = dyngibbs(&[
        "run",
        "--instance",
        inst.to_str().unwrap(),
        "--updates",
        ups.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&dyngibbs(&[])), 1);
    assert_eq!(code(&dyngibbs(&["run"])), 1);
    assert_eq!(code(&dyngibbs(&["frobnicate"])), 1);
    assert_eq!(code(&dyngibbs(&["--help"])), 0);
    let dir = tempfile::tempdir().unwrap();
    let inst = fixture("ising_cycle6.json");
    let out_dir = dir.path().to_str().unwrap();
    let missing = dyngibbs(&["run", "--instance", "/nonexistent/x.json", "--out", out_dir]);
    assert_eq!(code(&missing), 1);
    let bad_delta = dyngibbs(&["run", "--instance", inst.to_str().unwrap(), "--out", out_dir, "--delta", "given:2"]);
    assert_eq!(code(&bad_delta), 1);
    let bad_sched = dyngibbs(&["run", "--instance", inst.to_str().unwrap(), "--out", out_dir, "--schedule", "N=1,eps=2"]);
    assert_eq!(code(&bad_sched), 1);
}

#[test]
fn regime_violations() {
    let dir = tempfile::tempdir().unwrap();
    // Hard-core with unit fugacity on a path fails the exact Dobrushin check.
    let out = run_fixture("hardcore_path5", dir.path(), &["--delta", "check"]);
    assert_eq!(code(&out), 3);
    // The coloring stream biases a vertex, which leaves the model class.
    let out = run_fixture("coloring_path4", dir.path(), &["--delta", "model:coloring"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn bench_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = fixture("ising_cycle6.json");
    let ups = fixture("ising_cycle6.updates.jsonl");
    let out = dyngibbs(&[
        "bench",
        "--instance",
        inst.to_str().unwrap(),
        "--updates",
        ups.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--schedule",
        "N=50,eps=0.05",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bench.json")).unwrap()).unwrap();
    assert_eq!(report["steps"].as_array().unwrap().len(), 7);
    assert!(report["ratio"].as_f64().unwrap() >= 0.0);
}

#[test]
fn seeded_runs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_fixture("ising_cycle6", a.path(), &["--threads", "1"])), 0);
    assert_eq!(code(&run_fixture("ising_cycle6", b.path(), &["--threads", "2"])), 0);
    for f in ["estimates.jsonl", "steps.jsonl", "samples.jsonl", "final_instance.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs across thread counts");
    }
}
