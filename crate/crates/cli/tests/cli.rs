use std::fs;
use std::path::Path;

use proxnet_cli::{main_with, EXIT_OK, EXIT_VALIDATION};

fn run(args: &[&str]) -> i32 {
    main_with(std::iter::once("proxnet").chain(args.iter().copied()), None)
}

fn synth(dir: &Path, users: &str, days: &str) {
    let out = dir.to_str().unwrap();
    assert_eq!(run(&["synth", "--out", out, "--n-users", users, "--n-days", days]), EXIT_OK);
}

#[test]
fn synth_then_btnet_has_edges() {
    let tmp = tempfile::tempdir().unwrap();
    let (ds, res) = (tmp.path().join("ds"), tmp.path().join("res"));
    synth(&ds, "8", "2");
    assert_eq!(
        run(&["btnet", "--data", ds.to_str().unwrap(), "--out", res.to_str().unwrap(), "--window-s", "3600,86400"]),
        EXIT_OK
    );
    let edges = fs::read_to_string(res.join("bt_edges.csv")).unwrap();
    assert!(edges.lines().count() > 1);
    for f in ["bt_degree_rescaled_w3600.csv", "bt_weight_w86400.csv", "btnet_summary.json"] {
        assert!(res.join(f).is_file(), "{f}");
    }
}

#[test]
fn planted_proximity_is_recovered_by_strongest_ap() {
    let tmp = tempfile::tempdir().unwrap();
    let (ds, res) = (tmp.path().join("ds"), tmp.path().join("res"));
    synth(&ds, "8", "2");
    let args = [
        "wifieval",
        "--data",
        ds.to_str().unwrap(),
        "--out",
        res.to_str().unwrap(),
        "--measure",
        "strongest_ap",
    ];
    assert_eq!(run(&args), EXIT_OK);
    let csv = fs::read_to_string(res.join("wifi_eval.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "strongest_ap");
    assert_eq!((row[5], row[6]), ("1", "1"));
}

#[test]
fn bad_flags_and_inputs_exit_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing");
    let m = missing.to_str().unwrap();
    assert_eq!(run(&["btnet", "--data", m]), EXIT_VALIDATION);
    assert_eq!(run(&["frobnicate"]), EXIT_VALIDATION);
    assert_eq!(run(&["btnet", "--bin-width-s", "abc"]), EXIT_VALIDATION);
    assert_eq!(run(&["wifieval", "--data", m, "--thresholds", "1,2"]), EXIT_VALIDATION);
    assert_eq!(run(&["comms", "--data", m, "--tz", "Nowhere/City"]), EXIT_VALIDATION);

    let ds = tmp.path().join("ds");
    synth(&ds, "4", "1");
    fs::remove_file(ds.join("roster.csv")).unwrap();
    assert_eq!(run(&["ingest", "--data", ds.to_str().unwrap(), "--out", m]), EXIT_VALIDATION);
}

#[test]
fn ingest_reports_rows_but_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let (ds, res) = (tmp.path().join("ds"), tmp.path().join("res"));
    synth(&ds, "4", "1");
    let mut loc = fs::read_to_string(ds.join("location.csv")).unwrap();
    loc.push_str("u000,100,95.0,12.0,10\nu000,101,55.0\n");
    fs::write(ds.join("location.csv"), loc).unwrap();
    assert_eq!(run(&["ingest", "--data", ds.to_str().unwrap(), "--out", res.to_str().unwrap()]), EXIT_OK);
    let issues = fs::read_to_string(res.join("ingest_issues.csv")).unwrap();
    assert_eq!(issues.lines().count(), 3, "{issues}");
    assert!(issues.lines().skip(1).all(|l| l.starts_with("location,")));

    // A broken header is fatal.
    fs::write(ds.join("comm.csv"), "who,when\n").unwrap();
    assert_eq!(run(&["ingest", "--data", ds.to_str().unwrap(), "--out", res.to_str().unwrap()]), EXIT_VALIDATION);
}

#[test]
fn config_file_and_env_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "seed = 3\n[synth]\nn_users = 5\nn_days = 1\n").unwrap();
    let env_out = tmp.path().join("env-out");
    let code = main_with(["proxnet", "--config", cfg.to_str().unwrap(), "synth"], Some(env_out.clone()));
    assert_eq!(code, EXIT_OK);
    let manifest = fs::read_to_string(env_out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 3"));
    assert!(manifest.contains("\"n_users\": 5"));

    // Flags beat the file.
    let flag_out = tmp.path().join("flag-out");
    let code = main_with(
        ["proxnet", "--config", cfg.to_str().unwrap(), "synth", "--seed", "4", "--out", flag_out.to_str().unwrap()],
        Some(env_out),
    );
    assert_eq!(code, EXIT_OK);
    assert!(fs::read_to_string(flag_out.join("manifest.json")).unwrap().contains("\"seed\": 4"));

    fs::write(&cfg, "sed = 3\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "synth"]), EXIT_VALIDATION);
}

#[test]
fn every_analysis_runs_on_synthetic_data() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = tmp.path().join("ds");
    synth(&ds, "10", "3");
    for cmd in ["ingest", "btnet", "wifieval", "mobility", "comms", "netstats", "survey"] {
        let res = tmp.path().join(cmd);
        assert_eq!(run(&[cmd, "--data", ds.to_str().unwrap(), "--out", res.to_str().unwrap()]), EXIT_OK, "{cmd}");
        assert!(fs::read_dir(&res).unwrap().count() >= 2, "{cmd}");
    }
    let summary = fs::read_to_string(tmp.path().join("netstats/netstats_summary.json")).unwrap();
    assert!(summary.contains("\"calls\""));
}
