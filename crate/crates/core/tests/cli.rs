//! The `goose` binary: exit codes and CSV outputs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn goose(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goose"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_BO: &str = "experiment = safe-bo-1d\nalgorithms = goose, safeopt\nseeds = 2\nbudget = 25\npoints = 80\n";

#[test]
fn run_writes_bo_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bo.cfg", SMALL_BO);
    let out = dir.path().join("out");
    let o = goose(&["run", &cfg, "--strict", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    // header plus two algorithms times two seeds
    assert_eq!(runs.lines().count(), 5);
    let regret = fs::read_to_string(out.join("regret.csv")).unwrap();
    assert!(regret.starts_with("algorithm,seed,step,regret,running_average\n"));
    assert_eq!(regret.lines().count(), 1 + 2 * 2 * 25);
    assert!(out.join("regret_summary.csv").exists());
    assert!(!out.join("paths.csv").exists());
}

#[test]
fn run_writes_path_tables_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "path.cfg",
        "experiment = safe-path-synthetic\nsizes = 6\nseeds = 5\nbudget = 300\n",
    );
    let out = dir.path().join("out");
    let o = goose(&["run", &cfg, "--seeds", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["runs.csv", "paths.csv", "path_steps.csv", "paths_summary.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 2 * 2);
    assert!(!out.join("regret.csv").exists());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    let cases = [
        write(dir.path(), "unknown.cfg", "experiment = safe-bo-1d\ncolour = blue\n"),
        write(dir.path(), "kind.cfg", "experiment = safe-bo-3d\n"),
        write(dir.path(), "budget.cfg", "experiment = safe-bo-1d\nbudget = 0\n"),
        write(dir.path(), "algo.cfg", "experiment = safe-path-synthetic\nalgorithms = safeopt\n"),
        missing.to_str().unwrap().to_string(),
    ];
    for cfg in &cases {
        let o = goose(&["run", cfg, "--out", dir.path().join("out").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{cfg}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("config error"));
    }
    let cfg = write(dir.path(), "ok.cfg", SMALL_BO);
    let o = goose(&["run", &cfg, "--seeds", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn strict_mode_flags_unsafe_runs() {
    // a tiny confidence multiplier lets SafeOpt wander outside the safe set
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.cfg",
        "experiment = safe-bo-1d\nalgorithms = safeopt\nseeds = 4\nbudget = 40\nbeta = 0.05\n",
    );
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let strict = goose(&["run", &cfg, "--strict", "--out", out]);
    assert_eq!(strict.status.code(), Some(1));
    let lenient = goose(&["run", &cfg, "--out", out]);
    assert_eq!(lenient.status.code(), Some(0));
}

#[test]
fn bench_reports_timings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bo.cfg", SMALL_BO);
    let out = dir.path().join("out");
    let o = goose(&["bench", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("speedup"));
    assert!(out.join("timing.csv").exists());
}

#[test]
fn bundled_configs_parse() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["safe-bo-1d", "safe-bo-2d", "safe-path-synthetic", "safe-path-heightmap"] {
        let cfg = goose_core::harness::read_config(&configs.join(format!("{name}.cfg"))).unwrap();
        assert_eq!(cfg.experiment.to_string(), name);
    }
}
