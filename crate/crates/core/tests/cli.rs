use std::path::Path;
use std::process::{Command, Output};

use plaque_channel::config::RunManifest;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plaque-channel"))
        .args(args)
        .env_remove("MC_PLAQUE_THREADS")
        .output()
        .expect("launch CLI")
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn profile_table() {
    let out = cli(&["profile", "--points", "11"]);
    assert!(out.status.success());
    let t = rows(&out);
    assert_eq!(t[0], ["rho_m", "u_newtonian_m_s", "u_power_law_m_s", "u_herschel_bulkley_m_s"]);
    assert_eq!(t.len(), 12);
    assert_eq!(num(&t[1][0]), -3e-3);
    assert_eq!(num(&t[6][1]), 0.684);
    assert!(t[1][1..].iter().all(|v| num(v) == 0.0));
}

#[test]
fn analytic_cir_starts_at_first_arrival() {
    let out = cli(&["cir", "analytic"]);
    assert!(out.status.success());
    let t = rows(&out);
    assert_eq!(t[0], ["t_s", "h_newtonian", "h_power_law", "h_herschel_bulkley"]);
    let t_min = 0.05 / 0.684;
    let first_nonzero = t[1..].iter().find(|r| num(&r[1]) > 0.0).unwrap();
    assert!(num(&first_nonzero[0]) > t_min && num(&first_nonzero[0]) - t_min < 1.01e-3);
    let exact = t[1..].iter().find(|r| (num(&r[0]) - t_min).abs() < 1e-9).unwrap();
    assert_eq!(num(&exact[1]), 0.0);
    assert!(t[1..].iter().all(|r| num(&r[0]) >= t_min || num(&r[1]) == 0.0));
}

#[test]
fn venturi_row() {
    let out = cli(&["venturi", "--lc", "50e-3"]);
    assert!(out.status.success());
    let t = rows(&out);
    assert_eq!(t[0], ["l_c_m", "r_p_rel", "reduction", "speed_increase"]);
    assert_eq!(t.len(), 21);
    let row = t.iter().find(|r| r[1] == "0.75").unwrap();
    assert!((num(&row[3]) - 0.43).abs() < 5e-3);
    assert!((num(&row[2]) - 0.3).abs() < 1e-9);
    let out = cli(&["venturi", "--lc", "10e-3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn waveform_table() {
    let out = cli(&["waveform", "--resolution", "0.01"]);
    assert!(out.status.success());
    let t = rows(&out);
    assert_eq!(t[0], ["t_s", "flow_rate_ml_per_s", "u_avg_m_s"]);
    assert_eq!(t.len(), 92);
    assert_eq!(t[1][1], t[91][1]);
    let mean: f64 = t[1..91].iter().map(|r| num(&r[2])).sum::<f64>() / 90.0;
    assert!((mean - 0.342).abs() < 1e-6, "{mean}");
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["bogus"]).status.code(), Some(1));
    assert_eq!(cli(&["simulate", "--particles", "many"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[sim]\ndt = -1e-4\n").unwrap();
    assert_eq!(cli(&["simulate", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "[sim]\nwhat = 1\n").unwrap();
    let out = cli(&["simulate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let missing = dir.path().join("nope.toml");
    assert_eq!(cli(&["simulate", "--config", missing.to_str().unwrap()]).status.code(), Some(3));
}

fn simulate_into(dir: &Path, extra: &[&str]) -> Vec<u8> {
    let mut args = vec!["simulate", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = cli(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(dir.join("cir.csv")).unwrap()
}

#[test]
fn simulate_defaults_and_manifest_reproduction() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let csv = simulate_into(&first, &["--rp-rel", "0", "--seed", "11"]);
    let text = String::from_utf8(csv.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t_release_s,n_received"));
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "1");
    let n: u64 = last[1].parse().unwrap();
    assert!(n > 0 && n <= 1000);

    let manifest = RunManifest::from_json(&std::fs::read_to_string(first.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.seed, 11);
    assert_eq!(manifest.outputs, vec![first.join("cir.csv")]);
    let replay_cfg = dir.path().join("replay.toml");
    std::fs::write(&replay_cfg, &manifest.config).unwrap();
    let replay = dir.path().join("replay");
    let again = simulate_into(&replay, &["--config", replay_cfg.to_str().unwrap(), "--threads", "3"]);
    assert_eq!(again, csv);
    let replayed = RunManifest::from_json(&std::fs::read_to_string(replay.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(replayed.config_hash, manifest.config_hash);
}

#[test]
fn stdout_run_writes_no_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_plaque-channel"))
        .args(["simulate", "--particles", "50", "--release", "ld"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("t_release_s,n_received\n"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn seed_outside_file_range_is_a_config_error() {
    let out = cli(&["simulate", "--particles", "1", "--seed", "18446744073709551615"]);
    assert_eq!(out.status.code(), Some(2));
}
