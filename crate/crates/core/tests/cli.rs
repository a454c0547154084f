use std::path::Path;
use std::process::{Command, Output};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alpha-perc"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(bin(d, &["distill", "success", "--f", "0.75"]).status.code(), Some(0));
    assert_eq!(bin(d, &["distill", "success", "--f", "1.5"]).status.code(), Some(2));
    assert_eq!(bin(d, &["run", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(bin(d, &["frobnicate"]).status.code(), Some(2));
    std::fs::write(d.join("bad.toml"), "nope = 1\n").unwrap();
    assert_eq!(bin(d, &["--config", "bad.toml", "run"]).status.code(), Some(2));
    assert_eq!(bin(d, &["run", "--points", "missing.csv"]).status.code(), Some(1));
}

#[test]
fn every_subcommand_has_help() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["generate", "ingest", "repeaters", "run", "sweep", "threshold", "distill", "complexity"] {
        let out = bin(dir.path(), &[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        let text = String::from_utf8(out.stdout).unwrap();
        for flag in ["--config", "--seed", "--jobs", "--out"] {
            assert!(text.contains(flag), "{cmd} lacks {flag}");
        }
    }
}

#[test]
fn distill_and_complexity_values() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(dir.path(), &["distill", "success", "--f", "0.75"]));
    assert!((v["value"].as_f64().unwrap() - 0.7222).abs() < 1e-4);
    let v = json(&bin(dir.path(), &["complexity", "--n", "204"]));
    let f = v["results"][0]["f"].as_f64().unwrap();
    assert!((f / 1.3e3 - 1.0).abs() < 0.2, "{f}");
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = |out: &'static str| ["--seed", "5", "--out", out, "run", "--n", "300", "--epsilon", "0.05"];
    assert!(bin(d, &args("a")).status.success());
    assert!(bin(d, &args("b")).status.success());
    for f in ["report.json", "partition.json", "events.json"] {
        assert_eq!(std::fs::read(d.join("a").join(f)).unwrap(), std::fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
    assert!(bin(d, &["--seed", "6", "--out", "c", "run", "--n", "300", "--epsilon", "0.05"]).status.success());
    assert_ne!(std::fs::read(d.join("a/report.json")).unwrap(), std::fs::read(d.join("c/report.json")).unwrap());
}

#[test]
fn generated_points_reproduce_the_classical_golden() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(bin(d, &["--seed", "7029", "generate", "points", "--n", "20"]).status.success());
    let csv = std::fs::read_to_string(d.join("out/points.csv")).unwrap();
    assert!(csv.starts_with("# config_hash="));
    let out = bin(d, &["run", "--points", "out/points.csv", "--alpha", "0", "--epsilon", "0.15"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("p_inf=0.25 blocks=9"), "{stdout}");
}

#[test]
fn fiber_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = bin(d, &["generate", "fiber"]);
    assert!(out.status.success());
    let ingest = bin(d, &["ingest", "--edges", "out/fiber_edges.csv", "--nodes", "out/fiber_nodes.csv"]);
    assert!(ingest.status.success());
    let net: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("out/network.json")).unwrap()).unwrap();
    assert_eq!(net["nodes"].as_array().unwrap().len(), 692);
    assert_eq!(net["edges"].as_array().unwrap().len(), 733);
    let sweep = bin(d, &["sweep", "--fiber", "--d0-min", "100", "--d0-max", "20000", "--d0-points", "8"]);
    assert!(sweep.status.success(), "{}", String::from_utf8_lossy(&sweep.stderr));
    let curve = std::fs::read_to_string(d.join("out/curve.csv")).unwrap();
    assert_eq!(curve.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3 * 8);
}
