//! Result files and the command-line front end.

use std::fs;
use std::path::Path;
use std::process::Command;

use cdatc::output::{emit_results, Formats, OutputError};
use cdatc::sim::{monte_carlo, Scheme};
use cdatc::Scenario;

const SMALL: &str = r#"
[network]
nodes = 3
edges = [[1, 2], [2, 3]]

[signal]
taps = 4
noise_variances = [0.001, 0.01, 0.1]

[energy]
harvest_prob = 0.6

[sim]
schemes = ["cd-atc", "nsd-atc"]
steps = 50
runs = 3
seed = 9
"#;

fn simulate(scenario: &Scenario) -> Vec<cdatc::MonteCarloResult> {
    scenario
        .configs()
        .map(|c| monte_carlo(&c).unwrap())
        .collect()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn empty_results_are_rejected() {
    let scenario = Scenario::parse(SMALL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let err = emit_results(&scenario, &[], dir.path(), Formats::default()).unwrap_err();
    assert!(matches!(err, OutputError::NoData));
}

#[test]
fn files_cover_every_scheme_and_step() {
    let scenario = Scenario::parse(SMALL).unwrap();
    let results = simulate(&scenario);
    let dir = tempfile::tempdir().unwrap();
    emit_results(&scenario, &results, dir.path(), Formats::default()).unwrap();

    let nmsd = read(dir.path(), "nmsd.csv");
    let mut lines = nmsd.lines();
    assert_eq!(lines.next(), Some("step,scheme,nmsd_db"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 100);
    assert!(rows[0].starts_with("1,cd-atc,"));
    assert!(rows[50].starts_with("1,nsd-atc,"));

    let tau = read(dir.path(), "thresholds.csv");
    assert_eq!(tau.lines().count(), 1 + 50 * 3);

    let rates = read(dir.path(), "transmit_rates.csv");
    assert_eq!(rates.lines().count(), 1 + 2 * 3);

    let summary: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    assert_eq!(summary["results"].as_array().unwrap().len(), 2);
    assert_eq!(summary["steady_window_steps"], serde_json::json!([46, 50]));
    assert_eq!(summary["results"][0]["invariant_violations"], 0);

    let reparsed = Scenario::parse(&read(dir.path(), "effective_config.toml")).unwrap();
    assert_eq!(reparsed, scenario);
}

#[test]
fn thresholds_skipped_without_censoring_scheme() {
    let text = SMALL.replace(r#"["cd-atc", "nsd-atc"]"#, r#"["unconstrained"]"#);
    let scenario = Scenario::parse(&text).unwrap();
    let results = simulate(&scenario);
    let dir = tempfile::tempdir().unwrap();
    let written = emit_results(&scenario, &results, dir.path(), Formats::default()).unwrap();
    assert!(!dir.path().join("thresholds.csv").exists());
    assert_eq!(written.len(), 4);
    assert_eq!(results[0].scheme, Scheme::Unconstrained);
}

#[test]
fn repeated_runs_write_identical_bytes() {
    let scenario = Scenario::parse(SMALL).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    emit_results(
        &scenario,
        &simulate(&scenario),
        a.path(),
        Formats::default(),
    )
    .unwrap();
    emit_results(
        &scenario,
        &simulate(&scenario),
        b.path(),
        Formats::default(),
    )
    .unwrap();
    for name in [
        "nmsd.csv",
        "thresholds.csv",
        "transmit_rates.csv",
        "summary.json",
        "effective_config.toml",
    ] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cdatc"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn cli_simulate_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.toml");
    fs::write(&path, SMALL).unwrap();
    let out = dir.path().join("out");
    let status = cli(&[
        "simulate",
        path.to_str().unwrap(),
        "--runs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert!(out.join("nmsd.csv").exists());
    assert!(read(&out, "effective_config.toml").contains("runs = 2"));
}

#[test]
fn cli_exit_codes_follow_error_category() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (SMALL.replace("[energy]", "[energy]\nbogus = 1"), 3),
        (SMALL.replace("harvest_prob = 0.6", "harvest_prob = 1.6"), 4),
        (SMALL.replace("nodes = 3\n", ""), 4),
    ];
    for (i, (text, code)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("case{i}.toml"));
        fs::write(&path, text).unwrap();
        let out = cli(&["validate", path.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(*code),
            "case {i}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(cli(&["preset", "fig9"]).status.code(), Some(5));
    assert_eq!(
        cli(&["validate", "/nonexistent/x.toml"]).status.code(),
        Some(6)
    );
}

#[test]
fn cli_validate_prints_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.toml");
    fs::write(&path, SMALL).unwrap();
    let out = cli(&["validate", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        Scenario::parse(&text).unwrap(),
        Scenario::parse(SMALL).unwrap()
    );
}
