use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rsos_core::anyon::build_tci_hamiltonian;
use rsos_core::oracle::ground_state;
use rsos_core::{Boundary, ChainConfig};
use serde_json::Value;

fn rsos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsos")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn exact_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p4.toml", "p = 4\nsites = 6\nboundary = \"periodic\"\n");
    let out_dir = dir.path().join("out");
    let out = rsos(&["exact", "--config", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out_dir.join("exact/summary.json"));
    let lib = ground_state(&ChainConfig::new(4, 6, Boundary::Periodic).unwrap(), None).unwrap();
    assert_eq!(summary["energy"].as_f64().unwrap(), lib.energy);
    assert_eq!(summary["multiplicity"], 2);
    assert!((summary["yu"].as_f64().unwrap() - 1.618_033_988_749_895).abs() < 1e-9);
    let spectrum = fs::read_to_string(out_dir.join("exact/spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("index,energy\n0,"));
    let manifest = json(&out_dir.join("exact/manifest.json"));
    let config_text = fs::read_to_string(out_dir.join("exact/config.toml")).unwrap();
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert!(config_text.contains("p = 4"));
    assert_eq!(manifest["versions"]["rsos-core"], rsos_core::VERSION);
}

#[test]
fn optimize_measure_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "small.toml",
        "p = 4\nqubits = 6\nboundary = \"open\"\nseed = 4\n[optimizer]\nlr = 0.05\n",
    );
    let out_dir = dir.path().join("run");
    let base = ["--config", cfg.as_str(), "--output-dir", out_dir.to_str().unwrap()];
    let out = rsos(&[&["optimize"], &base[..]].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let opt = json(&out_dir.join("optimize/summary.json"));
    assert_eq!(opt["converged"], true);

    let iterations = fs::read_to_string(out_dir.join("optimize/iterations.csv")).unwrap();
    assert!(iterations.starts_with("stage,iteration,energy,rel_error,grad_norm\n"));
    let stages = fs::read_to_string(out_dir.join("optimize/stages.csv")).unwrap();
    assert!(stages.lines().last().unwrap().contains(",target,"));

    assert_eq!(code(&rsos(&[&["measure"], &base[..]].concat())), 0);
    let measured = json(&out_dir.join("measure/summary.json"));
    assert!((measured["energy"].as_f64().unwrap() - opt["energy"].as_f64().unwrap()).abs() <= 1e-12);
    let parity = fs::read_to_string(out_dir.join("measure/parity_profile.csv")).unwrap();
    assert_eq!(parity.lines().count(), 1 + 3);
    let probs = fs::read_to_string(out_dir.join("measure/site_probs.csv")).unwrap();
    assert!(probs.starts_with("site,a,prob\n0,1,"));
    assert_eq!(probs.lines().count(), 1 + 3 * 4);

    assert_eq!(code(&rsos(&[&["export-circuit"], &base[..]].concat())), 0);
    let qasm = fs::read_to_string(out_dir.join("circuit/circuit.qasm")).unwrap();
    assert!(qasm.starts_with("OPENQASM 2.0;"));
    let circuit = rsos_core::ansatz::Circuit::from_qasm(&qasm).unwrap();
    assert_eq!(json(&out_dir.join("circuit/summary.json"))["cx"], circuit.cx_count());

    // same config, same seed: bit-identical history
    let again = dir.path().join("again");
    let out = rsos(&["optimize", "--config", &cfg, "--output-dir", again.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    for file in ["iterations.csv", "stages.csv", "params.json", "summary.json", "manifest.json"] {
        assert_eq!(
            fs::read(out_dir.join("optimize").join(file)).unwrap(),
            fs::read(again.join("optimize").join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "p = 4\nqubits = 7\nboundary = \"open\"\n");
    assert_eq!(code(&rsos(&["exact", "--config", &bad, "--output-dir", o])), 1);
    assert_eq!(code(&rsos(&["exact", "--config", "/nonexistent.toml", "--output-dir", o])), 1);

    let capped = write_config(
        dir.path(),
        "capped.toml",
        "p = 4\nqubits = 8\nboundary = \"open\"\n[ansatz]\nlayers_start = 1\nlayers_max = 1\n\
         [optimizer]\nmax_iters_per_stage = 3\n",
    );
    let out = rsos(&["optimize", "--config", &capped, "--output-dir", o]);
    assert_eq!(code(&out), 3);
    assert!(out_dir.join("optimize/params.json").exists());
    assert_eq!(json(&out_dir.join("optimize/summary.json"))["converged"], false);

    // measure without a params file
    let fresh = dir.path().join("fresh");
    assert_eq!(code(&rsos(&["measure", "--config", &capped, "--output-dir", fresh.to_str().unwrap()])), 1);
}

#[test]
fn batch_with_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.toml", "p = 3\nsites = 4\nboundary = \"open\"\n");
    let b = write_config(dir.path(), "b.toml", "p = 5\nsites = 4\nboundary = \"periodic\"\n");
    let out_dir = dir.path().join("batch");
    let out = rsos(&["verify-algebra", "--config", &a, "--config", &b, "--jobs", "2", "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["a", "b"] {
        let s = json(&out_dir.join(name).join("verify-algebra/summary.json"));
        assert!(s["max_deviation"].as_f64().unwrap() <= 1e-12);
        assert_eq!(s["encoding"], "generic");
    }
}

#[test]
fn tci_encoding() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "tci.toml",
        "p = 4\nsites = 6\nboundary = \"open\"\nencoding = \"tci-appendix\"\n",
    );
    let out_dir = dir.path().join("tci");
    let o = out_dir.to_str().unwrap();
    assert_eq!(code(&rsos(&["verify-algebra", "--config", &cfg, "--output-dir", o])), 0);
    assert!(json(&out_dir.join("verify-algebra/summary.json"))["max_deviation"].as_f64().unwrap() <= 1e-12);
    assert_eq!(code(&rsos(&["exact", "--config", &cfg, "--output-dir", o])), 0);
    let s = json(&out_dir.join("exact/summary.json"));
    let (e, g) = (s["energy"].as_f64().unwrap(), s["generic_energy"].as_f64().unwrap());
    assert!((e - g).abs() <= 1e-9, "{e} vs {g}");
    assert_eq!(s["dimension"], 21);
    let chain = rsos_core::anyon::TciChain::new(6, Boundary::Open).unwrap();
    assert_eq!(build_tci_hamiltonian(&chain).unwrap().len(), 4);
}

#[test]
fn reproduce_small_recipe() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("fig3");
    let out = rsos(&["reproduce", "fig3", "--p", "4", "--qubits", "8", "--output-dir", root.to_str().unwrap()]);
    assert!(matches!(code(&out), 0 | 3), "{}", String::from_utf8_lossy(&out.stderr));
    let yu = fs::read_to_string(root.join("fig3_yu.csv")).unwrap();
    let mut lines = yu.lines();
    assert_eq!(lines.next(), Some("p,yu_exact,yu_vqe,yu_vqe_imag,yu_expected"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[1] - row[4]).abs() < 1e-9);
    assert!(root.join("p4/optimize/params.json").exists());
    assert!(root.join("p4/measure/parity_profile.csv").exists());
    let manifest = json(&root.join("manifest.json"));
    assert_eq!(manifest["command"], "reproduce fig3");
    assert!(fs::read_to_string(root.join("config.toml")).unwrap().contains("[[run]]"));
}
