use std::path::Path;
use std::time::Instant;

use assim_harness::{cli_main, render_csv, run_experiment, ExperimentConfig, Method};

fn run_cli(dir: &Path, tag: &str, extra: &[&str]) -> (i32, String, String) {
    let csv = dir.join(format!("{tag}.csv"));
    let metrics = dir.join(format!("{tag}.txt"));
    let mut argv: Vec<String> = vec!["assim".into(), "run".into()];
    argv.extend(extra.iter().map(|s| s.to_string()));
    argv.extend([
        "--out-csv".into(),
        csv.display().to_string(),
        "--out-metrics".into(),
        metrics.display().to_string(),
    ]);
    let code = cli_main(argv);
    let read = |p: &Path| std::fs::read_to_string(p).unwrap_or_default();
    (code, read(&csv), read(&metrics))
}

fn metric(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("missing {key}"))
        .parse()
        .unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let flags = ["--steps", "500", "--seed", "3", "--solver", "gd"];
    let a = run_cli(dir.path(), "a", &flags);
    let b = run_cli(dir.path(), "b", &flags);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
}

#[test]
fn different_seeds_differ() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_cli(dir.path(), "a", &["--steps", "50", "--seed", "1"]);
    let b = run_cli(dir.path(), "b", &["--steps", "50", "--seed", "2"]);
    assert_ne!(a.1, b.1);
}

#[test]
fn row_count_is_steps_plus_header() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv, _) = run_cli(dir.path(), "rows", &["--steps", "123"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().count(), 123 + 1 + 1);
    assert!(csv.ends_with('\n'));
}

#[test]
fn no_methods_writes_truth_and_observations() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv, metrics) = run_cli(dir.path(), "none", &["--methods", "none", "--steps", "30"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().next().unwrap(), "step,t,truth_x1,truth_x2,obs_z");
    assert!(metrics.contains("openloop_rmse_x1="));
    assert!(!metrics.contains("kf_"));
}

#[test]
fn stride_leaves_empty_observation_fields() {
    let dir = tempfile::tempdir().unwrap();
    let (code, csv, _) = run_cli(dir.path(), "stride", &["--methods", "kf", "--steps", "20", "--obs-stride", "5"]);
    assert_eq!(code, 0);
    for (k, line) in csv.lines().skip(1).enumerate() {
        let obs = line.split(',').nth(4).unwrap();
        assert_eq!(obs.is_empty(), k % 5 != 0, "step {k}: {line}");
    }
}

#[test]
fn default_config_is_fast_and_filters_beat_baselines() {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let result = run_experiment(&cfg).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    let kf = result.metric("kf").unwrap().rmse_x1_second_half;
    let open = result.metric("openloop").unwrap().rmse_x1_second_half;
    assert!(kf < cfg.r_var.sqrt(), "kf {kf}");
    assert!(kf < open, "kf {kf} open loop {open}");
}

#[test]
fn csv_matches_library_rendering() {
    let dir = tempfile::tempdir().unwrap();
    let (_, csv, metrics) = run_cli(dir.path(), "lib", &["--steps", "40", "--methods", "kf,var3d"]);
    let cfg = ExperimentConfig {
        steps: 40,
        methods: [Method::Kf, Method::Var3d].into_iter().collect(),
        ..Default::default()
    };
    let result = run_experiment(&cfg).unwrap();
    assert_eq!(csv, render_csv(&result));
    assert_eq!(metric(&metrics, "kf_rmse_x1"), result.metric("kf").unwrap().rmse_x1);
    assert_eq!(metric(&metrics, "steps"), 40.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_cli(dir.path(), "bad", &["--steps", "0"]).0, 2);
    assert_eq!(run_cli(dir.path(), "bad", &["--r-var", "0"]).0, 2);
    assert_eq!(run_cli(dir.path(), "bad", &["--solver", "newton"]).0, 2);
    assert_eq!(run_cli(dir.path(), "bad", &["--unknown-flag"]).0, 2);
    let blocked = dir.path().join("missing").join("out.csv");
    assert_eq!(cli_main(["assim", "run", "--steps", "5", "--out-csv", blocked.to_str().unwrap()]), 1);
}
