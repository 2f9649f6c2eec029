use std::fs;
use std::process::{Command, Output};

fn storeflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_storeflow")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn equilibrium_prints_the_threshold() {
    let o = storeflow(&["equilibrium"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("threshold_delta_s: 41.8149"), "{text}");
    assert!(text.contains("optimal_shopping_time_s: 1496.56"), "{text}");
}

#[test]
fn infeasible_interval_is_data_not_an_error() {
    let o = storeflow(&["equilibrium", "--delta-seconds", "30"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("regime: no equilibrium"));
}

#[test]
fn analytic_commands_write_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = storeflow(&["discrete", "--delta-seconds", "60", "--out-dir", out]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("occupancy 19"));
    let indices = fs::read_to_string(dir.path().join("discrete_indices.csv")).unwrap();
    assert!(indices.starts_with("r,J_r,K_r,L_r,g_r\n"));
    let o = storeflow(&["continuous", "--horizon-seconds", "600", "--out-dir", out]);
    assert!(o.status.success());
    let series = fs::read_to_string(dir.path().join("continuous.csv")).unwrap();
    assert!(series.starts_with("t_seconds,occupancy,completions,avg_shop_time_s,total_spend_rate\n"));
    assert_eq!(series.lines().count(), 602);
}

#[test]
fn simulate_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = storeflow(&["simulate", "--horizon-seconds", "300", "--trace", "--seed", "4", "--out-dir", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("tick,customer_id,x,y,state\n"));
    assert!(trace.lines().count() > 300);
    let naive = tempfile::tempdir().unwrap();
    let o = storeflow(&[
        "simulate",
        "--horizon-seconds",
        "300",
        "--naive-collisions",
        "--seed",
        "4",
        "--out-dir",
        naive.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    for name in ["sim_summary.csv", "sim_series.csv"] {
        assert_eq!(fs::read(dir.path().join(name)).unwrap(), fs::read(naive.path().join(name)).unwrap());
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "delta_seconds = 45\nm = 0.137\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let text = stdout(&storeflow(&["equilibrium", "--config", cfg]));
    assert!(text.contains("delta_s: 45\n"), "{text}");
    let text = stdout(&storeflow(&["equilibrium", "--config", cfg, "--delta-seconds", "50"]));
    assert!(text.contains("delta_s: 50\n"), "{text}");
}

#[test]
fn bad_config_and_paths_fail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "speed = 3\n").unwrap();
    let o = storeflow(&["equilibrium", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.conf"));

    assert!(!storeflow(&["equilibrium", "--config", "/nonexistent/x.conf"]).status.success());
    assert!(!storeflow(&["equilibrium", "--c", "-1"]).status.success());

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = storeflow(&["continuous", "--out-dir", blocker.join("sub").to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("file"));
}

#[test]
fn sweep_and_compare_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let common = ["--deltas", "45,60", "--replicates", "2", "--horizon-seconds", "900", "--out-dir", out];
    let o = storeflow(&[&["sweep"], &common[..]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["freeze_rate.csv", "occupancy.csv", "completions.csv", "shoptime.csv", "spendrate.csv", "comparison.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let first = fs::read(dir.path().join("comparison.csv")).unwrap();
    let o = storeflow(&[&["compare"], &common[..]].concat());
    assert!(o.status.success());
    assert!(stdout(&o).contains("equilibrium/equilibrium/equilibrium"));
    assert_eq!(fs::read(dir.path().join("comparison.csv")).unwrap(), first);
}
