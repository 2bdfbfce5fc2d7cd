//! CSV and JSON result files for external plotting.
//!
//! Floats are written with Rust's shortest round-trip formatting, and rows
//! follow scheme order, then step, then node, so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use crate::scenario::Scenario;
use crate::sim::{MonteCarloResult, Scheme};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("no results to write")]
    NoData,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Which files to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub nmsd: bool,
    pub thresholds: bool,
    pub transmit_rates: bool,
    pub summary: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self {
            nmsd: true,
            thresholds: true,
            transmit_rates: true,
            summary: true,
        }
    }
}

fn write(
    dir: &Path,
    name: &str,
    contents: &str,
    written: &mut Vec<PathBuf>,
) -> Result<(), OutputError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| OutputError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(())
}

pub fn nmsd_csv(results: &[MonteCarloResult]) -> String {
    let mut out = String::from("step,scheme,nmsd_db\n");
    for r in results {
        for (i, db) in r.nmsd_db().iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i + 1, r.scheme, db);
        }
    }
    out
}

/// Mean threshold trajectories of the censored scheme, if present.
pub fn thresholds_csv(results: &[MonteCarloResult]) -> Option<String> {
    let r = results.iter().find(|r| r.scheme == Scheme::CdAtc)?;
    let mut out = String::from("step,node,tau\n");
    for step in 0..r.steps {
        for node in 0..r.n_nodes {
            let _ = writeln!(out, "{},{},{}", step + 1, node + 1, r.tau(step, node));
        }
    }
    Some(out)
}

pub fn transmit_rates_csv(results: &[MonteCarloResult]) -> String {
    let mut out = String::from("scheme,node,transmit_rate,steady_transmit_rate,stall_rate\n");
    for r in results {
        for node in 0..r.n_nodes {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.scheme,
                node + 1,
                r.transmit_rate[node],
                r.steady_transmit_rate[node],
                r.stall_rate[node]
            );
        }
    }
    out
}

pub fn summary_json(scenario: &Scenario, results: &[MonteCarloResult]) -> serde_json::Value {
    let window = results
        .first()
        .map(|r| [r.steady_window.start + 1, r.steady_window.end])
        .unwrap_or([0, 0]);
    let schemes: Vec<_> = results
        .iter()
        .map(|r| {
            json!({
                "scheme": r.scheme.label(),
                "steady_state_nmsd": r.steady_nmsd(),
                "steady_state_nmsd_db": r.steady_nmsd_db(),
                "transmit_rates": r.transmit_rate,
                "steady_transmit_rates": r.steady_transmit_rate,
                "stall_rates": r.stall_rate,
                "steady_tau": r.steady_tau(),
                "invariant_violations": r.invariants.total_violations(),
            })
        })
        .collect();
    json!({
        "effective_config": scenario.to_json(),
        "steady_window_steps": window,
        "results": schemes,
    })
}

/// Writes the selected result files plus `effective_config.toml` into
/// `out_dir`, creating it if needed. Returns the written paths.
pub fn emit_results(
    scenario: &Scenario,
    results: &[MonteCarloResult],
    out_dir: &Path,
    formats: Formats,
) -> Result<Vec<PathBuf>, OutputError> {
    if results.is_empty() {
        return Err(OutputError::NoData);
    }
    fs::create_dir_all(out_dir).map_err(|source| OutputError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    write(
        out_dir,
        "effective_config.toml",
        &scenario.to_toml(),
        &mut written,
    )?;
    if formats.nmsd {
        write(out_dir, "nmsd.csv", &nmsd_csv(results), &mut written)?;
    }
    if formats.thresholds {
        if let Some(csv) = thresholds_csv(results) {
            write(out_dir, "thresholds.csv", &csv, &mut written)?;
        }
    }
    if formats.transmit_rates {
        write(
            out_dir,
            "transmit_rates.csv",
            &transmit_rates_csv(results),
            &mut written,
        )?;
    }
    if formats.summary {
        let mut text = serde_json::to_string_pretty(&summary_json(scenario, results))
            .expect("summary serializes");
        text.push('\n');
        write(out_dir, "summary.json", &text, &mut written)?;
    }
    Ok(written)
}
