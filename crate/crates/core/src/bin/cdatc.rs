use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use cdatc::output::{emit_results, Formats, OutputError};
use cdatc::scenario::{Scenario, ScenarioError};
use cdatc::sim::{monte_carlo, SimError};

#[derive(Parser)]
#[command(
    name = "cdatc",
    version,
    about = "Censored diffusion over energy-harvesting sensor networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scheme listed in a scenario file.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        /// Output directory [default: ./results/<scenario file stem>/]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in experiment: fig2a, fig2b, fig3a, fig3b or unconstrained.
    Preset {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory [default: ./results/<name>/]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario file and print its effective configuration.
    Validate { scenario: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (category, code) = categorize(&err);
            eprintln!("error[{category}]: {err:#}");
            ExitCode::from(code)
        }
    }
}

fn categorize(err: &anyhow::Error) -> (&'static str, u8) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ScenarioError>() {
            return match e {
                ScenarioError::Parse { .. } => ("parse", 3),
                ScenarioError::Validation { .. } => ("validation", 4),
                ScenarioError::UnknownPreset(_) => ("unknown-preset", 5),
                ScenarioError::Io(_) => ("io", 6),
            };
        }
        if cause.downcast_ref::<OutputError>().is_some() {
            return ("output", 6);
        }
        if cause.downcast_ref::<SimError>().is_some() {
            return ("simulation", 7);
        }
    }
    ("error", 1)
}

fn execute(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Simulate {
            scenario: path,
            seed,
            runs,
            out,
        } => {
            let mut scenario = Scenario::from_path(&path)
                .with_context(|| format!("loading {}", path.display()))?;
            if let Some(seed) = seed {
                scenario.config.seed = seed;
            }
            if let Some(runs) = runs {
                scenario.config.runs = runs;
            }
            let scenario = Scenario::new(scenario.config, scenario.schemes)?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".to_string());
            let out = out.unwrap_or_else(|| Path::new("results").join(stem));
            simulate(&scenario, &out, Formats::default())
        }
        Command::Preset { name, seed, out } => {
            let mut scenario = Scenario::preset(&name)?;
            if let Some(seed) = seed {
                scenario.config.seed = seed;
            }
            let formats = Formats {
                thresholds: name.starts_with("fig3"),
                ..Formats::default()
            };
            let out = out.unwrap_or_else(|| Path::new("results").join(&name));
            simulate(&scenario, &out, formats)
        }
        Command::Validate { scenario: path } => {
            let scenario = Scenario::from_path(&path)
                .with_context(|| format!("loading {}", path.display()))?;
            print!("{}", scenario.to_toml());
            Ok(())
        }
    }
}

fn simulate(scenario: &Scenario, out: &Path, formats: Formats) -> anyhow::Result<()> {
    let mut results = Vec::new();
    for config in scenario.configs() {
        let result = monte_carlo(&config)?;
        println!(
            "{:<14} steady-state NMSD {:>8.3} dB  ({} runs x {} steps)",
            config.scheme,
            result.steady_nmsd_db(),
            result.runs,
            result.steps
        );
        results.push(result);
    }
    for path in emit_results(scenario, &results, out, formats)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
