//! Scenario files and preset experiments.
//!
//! A scenario is a TOML document with the sections `[network]`, `[signal]`,
//! `[diffusion]`, `[energy]`, `[censoring]` and `[sim]`. Unknown keys are
//! rejected. Only `nodes`, `edges`, `noise_variances` and `harvest_prob` are
//! required; everything else falls back to the seven-node experiment values.
//!
//! ```toml
//! [network]
//! nodes = 2
//! edges = [[1, 2]]
//!
//! [signal]
//! noise_variances = [0.01, 0.5]
//!
//! [energy]
//! harvest_prob = 0.4
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::censoring::CensorParams;
use crate::diffusion::{CombinerPolicy, DiffusionParams};
use crate::energy::EnergyParams;
use crate::network::Topology;
use crate::sim::{Scheme, SignalConfig, SimConfig, SimError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid `{key}`: {reason}")]
    Validation { key: String, reason: String },
    #[error("unknown preset `{0}` (expected fig2a, fig2b, fig3a, fig3b or unconstrained)")]
    UnknownPreset(String),
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
}

fn validation(key: &str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    network: Option<NetworkSection>,
    signal: Option<SignalSection>,
    diffusion: Option<DiffusionSection>,
    energy: Option<EnergySection>,
    censoring: Option<CensoringSection>,
    sim: Option<SimSection>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkSection {
    nodes: Option<usize>,
    edges: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalSection {
    taps: Option<usize>,
    signal_power: Option<f64>,
    noise_variances: Option<Vec<f64>>,
    truth_jump_step: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffusionSection {
    mu: Option<f64>,
    delta: Option<f64>,
    combiner: Option<String>,
    combiner_smoothing: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnergySection {
    battery: Option<f64>,
    sense_cost: Option<f64>,
    tx_cost: Option<f64>,
    harvest_prob: Option<f64>,
    harvest_range: Option<[f64; 2]>,
    initial_battery: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CensoringSection {
    censoring: Option<String>,
    alpha_x: Option<f64>,
    eta: Option<f64>,
    tau_init: Option<f64>,
    rho_smoothing: Option<f64>,
    rho_clamp: Option<[f64; 2]>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    schemes: Option<Vec<String>>,
    steps: Option<usize>,
    runs: Option<usize>,
    seed: Option<u64>,
}

/// A validated experiment: one configuration simulated under one or more
/// schemes with shared randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Configuration; its `scheme` field is the first entry of `schemes`.
    pub config: SimConfig,
    pub schemes: Vec<Scheme>,
}

impl Scenario {
    pub fn new(config: SimConfig, schemes: Vec<Scheme>) -> Result<Self, ScenarioError> {
        let first = *schemes
            .first()
            .ok_or_else(|| validation("schemes", "at least one scheme is required"))?;
        let config = config.with_scheme(first);
        config.validate().map_err(from_sim)?;
        Ok(Self { config, schemes })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.span().map_or(0, |s| {
                text[..s.start.min(text.len())].matches('\n').count() + 1
            }),
            message: e.message().to_string(),
        })?;
        Self::from_file(file)
    }

    fn from_file(file: ScenarioFile) -> Result<Self, ScenarioError> {
        let network = file.network.unwrap_or_default();
        let nodes = network
            .nodes
            .ok_or_else(|| validation("nodes", "required key missing"))?;
        let edges = network
            .edges
            .ok_or_else(|| validation("edges", "required key missing"))?;
        let topology =
            Topology::from_labels(nodes, &edges).map_err(|e| validation("edges", e.to_string()))?;

        let signal = file.signal.unwrap_or_default();
        let defaults = SignalConfig::default();
        let signal = SignalConfig {
            taps: signal.taps.unwrap_or(defaults.taps),
            signal_power: signal.signal_power.unwrap_or(defaults.signal_power),
            noise_variances: signal
                .noise_variances
                .ok_or_else(|| validation("noise_variances", "required key missing"))?,
            truth_jump_step: signal.truth_jump_step,
        };

        let diffusion = file.diffusion.unwrap_or_default();
        let defaults = DiffusionParams::default();
        let mut combiner = match diffusion.combiner {
            Some(name) => name
                .parse::<CombinerPolicy>()
                .map_err(|e| validation("combiner", e))?,
            None => defaults.combiner,
        };
        if let Some(s) = diffusion.combiner_smoothing {
            match &mut combiner {
                CombinerPolicy::AdaptiveLs { smoothing } => *smoothing = s,
                _ => {
                    return Err(validation(
                        "combiner_smoothing",
                        "only applies to the adaptive-ls combiner",
                    ))
                }
            }
        }
        let diffusion = DiffusionParams {
            mu: diffusion.mu.unwrap_or(defaults.mu),
            delta: diffusion.delta.unwrap_or(defaults.delta),
            combiner,
        };

        let energy = file.energy.unwrap_or_default();
        let harvest_prob = energy
            .harvest_prob
            .ok_or_else(|| validation("harvest_prob", "required key missing"))?;
        let defaults = EnergyParams::with_harvest_prob(harvest_prob);
        let capacity = energy.battery.unwrap_or(defaults.capacity);
        let energy = EnergyParams {
            capacity,
            sense_cost: energy.sense_cost.unwrap_or(defaults.sense_cost),
            tx_cost: energy.tx_cost.unwrap_or(defaults.tx_cost),
            harvest_prob,
            harvest_range: energy
                .harvest_range
                .map_or(defaults.harvest_range, |[lo, hi]| (lo, hi)),
            initial: energy.initial_battery.unwrap_or(capacity),
        };

        let censoring = file.censoring.unwrap_or_default();
        let defaults = CensorParams::default();
        let enabled = match censoring.censoring.as_deref() {
            None | Some("on") => true,
            Some("off") => false,
            Some(other) => {
                return Err(validation(
                    "censoring",
                    format!("expected `on` or `off`, got `{other}`"),
                ))
            }
        };
        let censoring = CensorParams {
            enabled,
            alpha_x: censoring.alpha_x.unwrap_or(defaults.alpha_x),
            eta: censoring.eta.unwrap_or(defaults.eta),
            tau_init: censoring.tau_init.unwrap_or(defaults.tau_init),
            rho_smoothing: censoring.rho_smoothing.unwrap_or(defaults.rho_smoothing),
            rho_clamp: censoring
                .rho_clamp
                .map_or(defaults.rho_clamp, |[lo, hi]| (lo, hi)),
        };

        let sim = file.sim.unwrap_or_default();
        let defaults = SimConfig::seven_node(0.0, Scheme::CdAtc);
        let schemes = match sim.schemes {
            Some(names) => names
                .iter()
                .map(|n| n.parse::<Scheme>().map_err(|e| validation("schemes", e)))
                .collect::<Result<Vec<_>, _>>()?,
            None => Scheme::ALL.to_vec(),
        };
        let config = SimConfig {
            topology,
            signal,
            diffusion,
            energy,
            censoring,
            scheme: Scheme::CdAtc,
            steps: sim.steps.unwrap_or(defaults.steps),
            runs: sim.runs.unwrap_or(defaults.runs),
            seed: sim.seed.unwrap_or(defaults.seed),
        };
        Self::new(config, schemes)
    }

    /// Built-in experiments on the seven-node network.
    pub fn preset(name: &str) -> Result<Self, ScenarioError> {
        let (harvest_prob, schemes) = match name {
            "fig2a" => (0.4, Scheme::ALL.to_vec()),
            "fig2b" => (0.8, Scheme::ALL.to_vec()),
            "fig3a" => (0.4, vec![Scheme::CdAtc]),
            "fig3b" => (0.8, vec![Scheme::CdAtc]),
            "unconstrained" => (0.4, vec![Scheme::Unconstrained]),
            other => return Err(ScenarioError::UnknownPreset(other.to_string())),
        };
        Self::new(SimConfig::seven_node(harvest_prob, Scheme::CdAtc), schemes)
    }

    pub const PRESETS: [&'static str; 5] = ["fig2a", "fig2b", "fig3a", "fig3b", "unconstrained"];

    /// Configuration for each scheme, in listed order.
    pub fn configs(&self) -> impl Iterator<Item = SimConfig> + '_ {
        self.schemes.iter().map(|&s| self.config.with_scheme(s))
    }

    /// Effective configuration with every default spelled out. Parsing the
    /// result yields an identical scenario.
    pub fn to_toml(&self) -> String {
        let c = &self.config;
        let (combiner, combiner_smoothing) = match c.diffusion.combiner {
            CombinerPolicy::AdaptiveLs { smoothing } => ("adaptive-ls", Some(smoothing)),
            other => (other.name(), None),
        };
        let file = ScenarioFile {
            network: Some(NetworkSection {
                nodes: Some(c.topology.n_nodes()),
                edges: Some(c.topology.edge_labels()),
            }),
            signal: Some(SignalSection {
                taps: Some(c.signal.taps),
                signal_power: Some(c.signal.signal_power),
                noise_variances: Some(c.signal.noise_variances.clone()),
                truth_jump_step: c.signal.truth_jump_step,
            }),
            diffusion: Some(DiffusionSection {
                mu: Some(c.diffusion.mu),
                delta: Some(c.diffusion.delta),
                combiner: Some(combiner.to_string()),
                combiner_smoothing,
            }),
            energy: Some(EnergySection {
                battery: Some(c.energy.capacity),
                sense_cost: Some(c.energy.sense_cost),
                tx_cost: Some(c.energy.tx_cost),
                harvest_prob: Some(c.energy.harvest_prob),
                harvest_range: Some([c.energy.harvest_range.0, c.energy.harvest_range.1]),
                initial_battery: Some(c.energy.initial),
            }),
            censoring: Some(CensoringSection {
                censoring: Some(if c.censoring.enabled { "on" } else { "off" }.to_string()),
                alpha_x: Some(c.censoring.alpha_x),
                eta: Some(c.censoring.eta),
                tau_init: Some(c.censoring.tau_init),
                rho_smoothing: Some(c.censoring.rho_smoothing),
                rho_clamp: Some([c.censoring.rho_clamp.0, c.censoring.rho_clamp.1]),
            }),
            sim: Some(SimSection {
                schemes: Some(self.schemes.iter().map(|s| s.label().to_string()).collect()),
                steps: Some(c.steps),
                runs: Some(c.runs),
                seed: Some(c.seed),
            }),
        };
        toml::to_string(&file).expect("scenario serializes")
    }

    /// Effective configuration as a JSON value, for result summaries.
    pub fn to_json(&self) -> serde_json::Value {
        let file: ScenarioFile = toml::from_str(&self.to_toml()).expect("round trip");
        serde_json::to_value(file).expect("scenario serializes")
    }
}

fn from_sim(e: SimError) -> ScenarioError {
    match e {
        SimError::ConfigInvalid { key, reason } => ScenarioError::Validation { key, reason },
        other => validation("config", other.to_string()),
    }
}
