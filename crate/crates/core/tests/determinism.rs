mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_squeezebeam"))
        .args(args)
        .arg("--quiet")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap()
}

#[test]
fn repeated_runs_write_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, common::small_config("run", &[], 3e-4)).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&["run", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    run(&["run", cfg.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    for name in ["densities.csv", "timeseries.csv", "config.json"] {
        assert_eq!(read(&a, name), read(&b, name), "{name} differs");
    }
}

#[test]
fn sweep_table_does_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    fs::write(&cfg, common::small_config("sweep-rabi", &[1.8e12, 2.2e12, 2.6e12, 3.0e12], 4e-4)).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&["sweep", cfg.to_str().unwrap(), "--workers", "1", "--out", a.to_str().unwrap()]);
    run(&["sweep", cfg.to_str().unwrap(), "--workers", "3", "--out", b.to_str().unwrap()]);
    assert_eq!(read(&a, "sweep.csv"), read(&b, "sweep.csv"));
}
