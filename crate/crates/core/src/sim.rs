//! Synchronous network simulation of censored diffusion and its baselines.
//!
//! Every step, each node in turn senses, scores its estimate, decides whether
//! to broadcast, updates its threshold and then, if the battery allows,
//! adapts, re-weights, combines and broadcasts. Broadcasts made in step `n`
//! are delivered at the start of step `n + 1`.
//!
//! Steps are numbered from 1 in records and output files; trace storage is
//! indexed from 0.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::censoring::{importance, Action, CensorError, CensorParams, CensorState};
use crate::diffusion::{DiffusionError, DiffusionParams, NodeEstimator, WEIGHT_SUM_TOL};
use crate::energy::{draw_harvest, energy_cost, idle_cost, EnergyError, EnergyParams, EnergyState};
use crate::network::Topology;
use crate::rng::{node_stream, truth_stream, Purpose, SimRng};
use crate::signal::{
    default_noise_profile, dot, fill_regressor, observe, GroundTruth, NodeSignalProfile,
    SignalError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration `{key}`: {reason}")]
    ConfigInvalid { key: String, reason: String },
    #[error("window {start}..{end} outside horizon of {steps} steps")]
    WindowOutOfRange {
        start: usize,
        end: usize,
        steps: usize,
    },
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

impl SimError {
    fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::ConfigInvalid {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

impl From<EnergyError> for SimError {
    fn from(e: EnergyError) -> Self {
        let EnergyError::Invalid { key, reason } = e;
        SimError::config(key, reason)
    }
}

impl From<CensorError> for SimError {
    fn from(e: CensorError) -> Self {
        let CensorError::Invalid { key, reason } = e;
        SimError::config(key, reason)
    }
}

/// Which protocol the network runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Censored diffusion on harvesting batteries.
    CdAtc,
    /// Diffusion on harvesting batteries, broadcasting whenever alive.
    NsdAtc,
    /// Diffusion with unlimited energy and no censoring.
    Unconstrained,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::CdAtc, Scheme::NsdAtc, Scheme::Unconstrained];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::CdAtc => "cd-atc",
            Scheme::NsdAtc => "nsd-atc",
            Scheme::Unconstrained => "unconstrained",
        }
    }

    fn uses_energy(self) -> bool {
        self != Scheme::Unconstrained
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.label() == s)
            .ok_or_else(|| {
                format!("unknown scheme `{s}` (expected cd-atc, nsd-atc or unconstrained)")
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalConfig {
    pub taps: usize,
    pub signal_power: f64,
    /// One variance per node, in node order.
    pub noise_variances: Vec<f64>,
    /// Step at which `w_o` is redrawn, if any.
    pub truth_jump_step: Option<usize>,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            taps: 50,
            signal_power: 1.0,
            noise_variances: default_noise_profile(),
            truth_jump_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub topology: Topology,
    pub signal: SignalConfig,
    pub diffusion: DiffusionParams,
    pub energy: EnergyParams,
    pub censoring: CensorParams,
    pub scheme: Scheme,
    pub steps: usize,
    pub runs: usize,
    pub seed: u64,
}

impl SimConfig {
    /// The seven-node bridge network with the given harvest probability.
    pub fn seven_node(harvest_prob: f64, scheme: Scheme) -> Self {
        Self {
            topology: Topology::default_seven_node(),
            signal: SignalConfig::default(),
            diffusion: DiffusionParams::default(),
            energy: EnergyParams::with_harvest_prob(harvest_prob),
            censoring: CensorParams::default(),
            scheme,
            steps: 10_000,
            runs: 50,
            seed: 1,
        }
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        Self {
            scheme,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.steps == 0 {
            return Err(SimError::config("steps", "must be >= 1"));
        }
        if self.runs == 0 {
            return Err(SimError::config("runs", "must be >= 1"));
        }
        if self.runs > u32::MAX as usize {
            return Err(SimError::config("runs", "too many runs"));
        }
        if self.signal.taps == 0 {
            return Err(SimError::config("taps", "must be >= 1"));
        }
        let n = self.topology.n_nodes();
        if self.signal.noise_variances.len() != n {
            return Err(SimError::config(
                "noise_variances",
                format!(
                    "expected {n} values (one per node), got {}",
                    self.signal.noise_variances.len()
                ),
            ));
        }
        for &v in &self.signal.noise_variances {
            NodeSignalProfile::new(v, self.signal.signal_power).map_err(|e| match e {
                SignalError::InvalidSignalPower(_) => {
                    SimError::config("signal_power", e.to_string())
                }
                _ => SimError::config("noise_variances", e.to_string()),
            })?;
        }
        if !(self.diffusion.mu > 0.0 && self.diffusion.mu.is_finite()) {
            return Err(SimError::config("mu", "must be finite and > 0"));
        }
        if !(self.diffusion.delta > 0.0 && self.diffusion.delta.is_finite()) {
            return Err(SimError::config("delta", "must be finite and > 0"));
        }
        if let crate::diffusion::CombinerPolicy::AdaptiveLs { smoothing } = self.diffusion.combiner
        {
            if !(smoothing > 0.0 && smoothing <= 1.0) {
                return Err(SimError::config("combiner_smoothing", "must lie in (0, 1]"));
            }
        }
        self.energy.validate()?;
        self.censoring.validate()?;
        Ok(())
    }

    fn profiles(&self) -> Vec<NodeSignalProfile> {
        self.signal
            .noise_variances
            .iter()
            .map(|&v| NodeSignalProfile::new(v, self.signal.signal_power).expect("validated"))
            .collect()
    }
}

/// What one node did in one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRecord {
    /// Censoring decision; a stalled node never actually broadcasts.
    pub action: Action,
    pub stalled: bool,
    /// Battery level after the step.
    pub battery: f64,
    /// Threshold after the step's update.
    pub tau: f64,
    pub importance: f64,
    /// `‖w_o − w_k(n)‖²`.
    pub sq_dev: f64,
    pub weight_sum: f64,
    pub min_weight: f64,
}

impl NodeRecord {
    pub fn transmitted(&self) -> bool {
        self.action.is_transmit() && !self.stalled
    }
}

/// Counts of invariant violations found in recorded steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InvariantReport {
    pub records_checked: u64,
    pub battery_violations: u64,
    pub simplex_violations: u64,
    pub importance_violations: u64,
}

impl InvariantReport {
    pub fn total_violations(&self) -> u64 {
        self.battery_violations + self.simplex_violations + self.importance_violations
    }

    fn check(&mut self, r: &NodeRecord, capacity: f64) {
        self.records_checked += 1;
        if !(0.0..=capacity).contains(&r.battery) {
            self.battery_violations += 1;
        }
        if r.min_weight < 0.0 || (r.weight_sum - 1.0).abs() > WEIGHT_SUM_TOL {
            self.simplex_violations += 1;
        }
        if r.importance.is_nan() || r.importance < 0.0 {
            self.importance_violations += 1;
        }
    }

    fn merge(&mut self, other: &InvariantReport) {
        self.records_checked += other.records_checked;
        self.battery_violations += other.battery_violations;
        self.simplex_violations += other.simplex_violations;
        self.importance_violations += other.importance_violations;
    }
}

/// Full record of a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub scheme: Scheme,
    pub n_nodes: usize,
    pub steps: usize,
    capacity: f64,
    /// Step-major: record of node `k` at step index `i` is at `i * n_nodes + k`.
    records: Vec<NodeRecord>,
    /// Instantaneous network deviation `(1/N) Σ_k ‖w_o − w_k(n)‖²`.
    pub nmsd: Vec<f64>,
    /// Broadcasts actually sent, per node, over the whole run.
    pub transmit_counts: Vec<u64>,
    pub final_psi: Vec<Vec<f64>>,
    pub final_w: Vec<Vec<f64>>,
}

impl SimTrace {
    /// Record at 0-based step index `step`.
    pub fn record(&self, step: usize, node: usize) -> &NodeRecord {
        &self.records[step * self.n_nodes + node]
    }

    pub fn step_records(&self, step: usize) -> &[NodeRecord] {
        &self.records[step * self.n_nodes..(step + 1) * self.n_nodes]
    }

    pub fn records(&self) -> &[NodeRecord] {
        &self.records
    }

    pub fn invariants(&self) -> InvariantReport {
        let mut report = InvariantReport::default();
        for r in &self.records {
            report.check(r, self.capacity);
        }
        report
    }

    /// Equality of the simulated trajectory: estimates, batteries, actions,
    /// stalls, thresholds and deviations. The importance diagnostic is
    /// excluded since schemes without censoring never compute it.
    pub fn same_trajectory(&self, other: &SimTrace) -> bool {
        self.n_nodes == other.n_nodes
            && self.steps == other.steps
            && self.nmsd == other.nmsd
            && self.transmit_counts == other.transmit_counts
            && self.final_psi == other.final_psi
            && self.final_w == other.final_w
            && self.records.iter().zip(&other.records).all(|(a, b)| {
                a.action == b.action
                    && a.stalled == b.stalled
                    && a.battery == b.battery
                    && a.tau == b.tau
                    && a.sq_dev == b.sq_dev
                    && a.weight_sum == b.weight_sum
                    && a.min_weight == b.min_weight
            })
    }
}

/// Per-node fraction of non-stalled steps in `window` (0-based step indices)
/// on which the node broadcast. Nodes stalled throughout the window get 0.
pub fn transmit_rate(trace: &SimTrace, window: Range<usize>) -> Result<Vec<f64>, SimError> {
    if window.start >= window.end || window.end > trace.steps {
        return Err(SimError::WindowOutOfRange {
            start: window.start,
            end: window.end,
            steps: trace.steps,
        });
    }
    let mut sent = vec![0u64; trace.n_nodes];
    let mut active = vec![0u64; trace.n_nodes];
    for step in window {
        for (k, r) in trace.step_records(step).iter().enumerate() {
            if !r.stalled {
                active[k] += 1;
                sent[k] += r.transmitted() as u64;
            }
        }
    }
    Ok(sent
        .iter()
        .zip(&active)
        .map(|(&s, &a)| if a == 0 { 0.0 } else { s as f64 / a as f64 })
        .collect())
}

/// The last tenth of the horizon (at least one step).
pub fn steady_window(steps: usize) -> Range<usize> {
    let len = (steps / 10).max(1).min(steps);
    steps - len..steps
}

struct NodeStreams {
    regressor: SimRng,
    noise: SimRng,
    harvest: SimRng,
}

struct NodeState {
    est: NodeEstimator,
    censor: CensorState,
    energy: EnergyState,
    profile: NodeSignalProfile,
    streams: NodeStreams,
}

struct Broadcast {
    w: Vec<f64>,
    j: f64,
}

/// Joint state of every node in one run.
pub struct Network<'a> {
    config: &'a SimConfig,
    run: u32,
    truth: GroundTruth,
    truth_rng: SimRng,
    nodes: Vec<NodeState>,
    outbox: Vec<Option<Broadcast>>,
    u: Vec<f64>,
    step: usize,
}

impl<'a> Network<'a> {
    pub fn new(config: &'a SimConfig, run: u32) -> Result<Self, SimError> {
        config.validate()?;
        let taps = config.signal.taps;
        let mut truth_rng = truth_stream(config.seed, run);
        let truth = GroundTruth::random(taps, &mut truth_rng)?;
        let nodes = config
            .profiles()
            .into_iter()
            .enumerate()
            .map(|(k, profile)| NodeState {
                est: NodeEstimator::new(k, &config.topology, &config.diffusion, taps),
                censor: CensorState::new(config.censoring),
                energy: EnergyState::new(config.energy.initial),
                profile,
                streams: NodeStreams {
                    regressor: node_stream(config.seed, run, k, Purpose::Regressor),
                    noise: node_stream(config.seed, run, k, Purpose::Noise),
                    harvest: node_stream(config.seed, run, k, Purpose::Harvest),
                },
            })
            .collect();
        Ok(Self {
            config,
            run,
            truth,
            truth_rng,
            nodes,
            outbox: (0..config.topology.n_nodes()).map(|_| None).collect(),
            u: vec![0.0; taps],
            step: 0,
        })
    }

    pub fn run_index(&self) -> u32 {
        self.run
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    pub fn estimator(&self, k: usize) -> &NodeEstimator {
        &self.nodes[k].est
    }

    pub fn censor_state(&self, k: usize) -> &CensorState {
        &self.nodes[k].censor
    }

    pub fn battery(&self, k: usize) -> f64 {
        self.nodes[k].energy.level()
    }

    /// Overrides a node's battery level, clipped to `[0, B]`.
    pub fn set_battery(&mut self, k: usize, level: f64) {
        self.nodes[k].energy = EnergyState::new(level.clamp(0.0, self.config.energy.capacity));
    }

    /// Advances the network by one step, appending one record per node.
    pub fn step(&mut self, out: &mut Vec<NodeRecord>) -> Result<(), SimError> {
        self.step += 1;
        let cfg = self.config;
        let scheme = cfg.scheme;
        if cfg.signal.truth_jump_step == Some(self.step) {
            self.truth = GroundTruth::random(cfg.signal.taps, &mut self.truth_rng)?;
        }

        // Deliver last step's broadcasts.
        let delivered = std::mem::take(&mut self.outbox);
        for k in 0..self.nodes.len() {
            for &l in cfg.topology.neighbors(k, false).expect("valid node") {
                if let Some(msg) = &delivered[l] {
                    self.nodes[k].est.receive(l, &msg.w, msg.j)?;
                }
            }
        }
        self.outbox = (0..self.nodes.len()).map(|_| None).collect();

        for k in 0..self.nodes.len() {
            let node = &mut self.nodes[k];
            fill_regressor(&node.profile, &mut self.u, &mut node.streams.regressor);
            let d = observe(
                self.truth.as_slice(),
                &self.u,
                &node.profile,
                &mut node.streams.noise,
            )?;
            let harvest = if scheme.uses_energy() {
                draw_harvest(&cfg.energy, &mut node.streams.harvest)
            } else {
                0.0
            };

            let (x, action) = if scheme == Scheme::CdAtc {
                let own = node.censor.local_mse();
                let mut js = vec![own];
                js.extend(
                    node.est
                        .neighborhood()
                        .iter()
                        .filter(|&&l| l != k)
                        .map(|&l| node.est.received(l).map_or(0.0, |r| r.j)),
                );
                let x = importance(own, &js);
                let action = node.censor.decide(x);
                node.censor.update_threshold(action);
                (x, action)
            } else {
                (0.0, Action::Transmit)
            };

            let stalled = scheme.uses_energy()
                && node
                    .energy
                    .would_stall(&cfg.energy, action.is_transmit(), harvest);

            if stalled {
                node.energy.apply(idle_cost(harvest), cfg.energy.capacity);
            } else {
                let xi = node.est.nlms_adapt(&self.u, d)?;
                node.est.update_combiners(&self.u, d, xi)?;
                if scheme == Scheme::CdAtc {
                    let check = d - dot(node.est.w(), &self.u);
                    node.censor.update_local_mse(check);
                }
                node.est.combine()?;
                if action.is_transmit() {
                    self.outbox[k] = Some(Broadcast {
                        w: node.est.w().to_vec(),
                        j: node.censor.local_mse(),
                    });
                }
                if scheme.uses_energy() {
                    let cost = energy_cost(
                        cfg.energy.sense_cost,
                        action.is_transmit(),
                        cfg.energy.tx_cost,
                        harvest,
                    );
                    node.energy.apply(cost, cfg.energy.capacity);
                    if scheme == Scheme::CdAtc {
                        node.censor.update_cost_estimates(action, cost);
                    }
                }
            }

            let weights = node.est.weights();
            out.push(NodeRecord {
                action,
                stalled,
                battery: if scheme.uses_energy() {
                    node.energy.level()
                } else {
                    cfg.energy.capacity
                },
                tau: node.censor.tau(),
                importance: x,
                sq_dev: self.truth.squared_deviation(node.est.w()),
                weight_sum: weights.iter().sum(),
                min_weight: weights.iter().cloned().fold(f64::INFINITY, f64::min),
            });
        }
        Ok(())
    }
}

/// Simulates run `run` of `config` from scratch.
pub fn run_indexed(config: &SimConfig, run: u32) -> Result<SimTrace, SimError> {
    let mut net = Network::new(config, run)?;
    let n = config.topology.n_nodes();
    let mut records = Vec::with_capacity(config.steps * n);
    let mut nmsd = Vec::with_capacity(config.steps);
    for _ in 0..config.steps {
        let start = records.len();
        net.step(&mut records)?;
        nmsd.push(records[start..].iter().map(|r| r.sq_dev).sum::<f64>() / n as f64);
    }
    let mut transmit_counts = vec![0u64; n];
    for (i, r) in records.iter().enumerate() {
        transmit_counts[i % n] += r.transmitted() as u64;
    }
    Ok(SimTrace {
        scheme: config.scheme,
        n_nodes: n,
        steps: config.steps,
        capacity: config.energy.capacity,
        nmsd,
        transmit_counts,
        final_psi: net.nodes.iter().map(|s| s.est.psi().to_vec()).collect(),
        final_w: net.nodes.iter().map(|s| s.est.w().to_vec()).collect(),
        records,
    })
}

/// Single run with index 0.
pub fn run(config: &SimConfig) -> Result<SimTrace, SimError> {
    run_indexed(config, 0)
}

/// Monte-Carlo averages over `config.runs` independent runs.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub scheme: Scheme,
    pub runs: usize,
    pub steps: usize,
    pub n_nodes: usize,
    /// Network mean-square deviation per step, linear scale.
    pub nmsd: Vec<f64>,
    /// Mean threshold per step, step-major like [`SimTrace`] records.
    pub mean_tau: Vec<f64>,
    /// Mean battery level per step and node, step-major.
    pub mean_battery: Vec<f64>,
    /// Window used for steady-state figures (0-based step indices).
    pub steady_window: Range<usize>,
    /// Per-node broadcast fraction of active steps within the steady window.
    pub steady_transmit_rate: Vec<f64>,
    /// Per-node broadcast fraction of active steps over the whole horizon.
    pub transmit_rate: Vec<f64>,
    /// Per-node fraction of stalled steps over the whole horizon.
    pub stall_rate: Vec<f64>,
    pub invariants: InvariantReport,
}

impl MonteCarloResult {
    pub fn nmsd_db(&self) -> Vec<f64> {
        self.nmsd.iter().map(|&v| to_db(v)).collect()
    }

    /// Mean linear NMSD over the steady window.
    pub fn steady_nmsd(&self) -> f64 {
        let w = &self.nmsd[self.steady_window.clone()];
        w.iter().sum::<f64>() / w.len() as f64
    }

    pub fn steady_nmsd_db(&self) -> f64 {
        to_db(self.steady_nmsd())
    }

    pub fn tau(&self, step: usize, node: usize) -> f64 {
        self.mean_tau[step * self.n_nodes + node]
    }

    /// Per-node mean threshold over the steady window.
    pub fn steady_tau(&self) -> Vec<f64> {
        let len = self.steady_window.len() as f64;
        (0..self.n_nodes)
            .map(|k| {
                self.steady_window
                    .clone()
                    .map(|s| self.tau(s, k))
                    .sum::<f64>()
                    / len
            })
            .collect()
    }
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

struct RunSummary {
    nmsd: Vec<f64>,
    tau: Vec<f64>,
    battery: Vec<f64>,
    steady_sent: Vec<u64>,
    steady_active: Vec<u64>,
    sent: Vec<u64>,
    active: Vec<u64>,
    stalled: Vec<u64>,
    invariants: InvariantReport,
}

fn summarize(trace: SimTrace, window: &Range<usize>) -> RunSummary {
    let n = trace.n_nodes;
    let mut s = RunSummary {
        tau: trace.records.iter().map(|r| r.tau).collect(),
        battery: trace.records.iter().map(|r| r.battery).collect(),
        steady_sent: vec![0; n],
        steady_active: vec![0; n],
        sent: vec![0; n],
        active: vec![0; n],
        stalled: vec![0; n],
        invariants: trace.invariants(),
        nmsd: Vec::new(),
    };
    for step in 0..trace.steps {
        let in_window = window.contains(&step);
        for (k, r) in trace.step_records(step).iter().enumerate() {
            if r.stalled {
                s.stalled[k] += 1;
                continue;
            }
            s.active[k] += 1;
            s.sent[k] += r.transmitted() as u64;
            if in_window {
                s.steady_active[k] += 1;
                s.steady_sent[k] += r.transmitted() as u64;
            }
        }
    }
    s.nmsd = trace.nmsd;
    s
}

fn ratio(num: &[u64], den: &[u64]) -> Vec<f64> {
    num.iter()
        .zip(den)
        .map(|(&a, &b)| if b == 0 { 0.0 } else { a as f64 / b as f64 })
        .collect()
}

/// Runs every Monte-Carlo realization (in parallel) and averages them in run
/// order, so results do not depend on scheduling.
pub fn monte_carlo(config: &SimConfig) -> Result<MonteCarloResult, SimError> {
    config.validate()?;
    let window = steady_window(config.steps);
    let summaries: Vec<RunSummary> = (0..config.runs as u32)
        .into_par_iter()
        .map(|r| run_indexed(config, r).map(|t| summarize(t, &window)))
        .collect::<Result<_, _>>()?;

    let n = config.topology.n_nodes();
    let runs = summaries.len() as f64;
    let mut nmsd = vec![0.0; config.steps];
    let mut tau = vec![0.0; config.steps * n];
    let mut battery = vec![0.0; config.steps * n];
    let mut counts = [
        vec![0u64; n],
        vec![0u64; n],
        vec![0u64; n],
        vec![0u64; n],
        vec![0u64; n],
    ];
    let mut invariants = InvariantReport::default();
    for s in &summaries {
        for (acc, v) in nmsd.iter_mut().zip(&s.nmsd) {
            *acc += v;
        }
        for (acc, v) in tau.iter_mut().zip(&s.tau) {
            *acc += v;
        }
        for (acc, v) in battery.iter_mut().zip(&s.battery) {
            *acc += v;
        }
        for (acc, v) in counts.iter_mut().zip([
            &s.steady_sent,
            &s.steady_active,
            &s.sent,
            &s.active,
            &s.stalled,
        ]) {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
        }
        invariants.merge(&s.invariants);
    }
    for v in nmsd
        .iter_mut()
        .chain(tau.iter_mut())
        .chain(battery.iter_mut())
    {
        *v /= runs;
    }
    let total_steps = vec![(config.steps * summaries.len()) as u64; n];
    Ok(MonteCarloResult {
        scheme: config.scheme,
        runs: summaries.len(),
        steps: config.steps,
        n_nodes: n,
        nmsd,
        mean_tau: tau,
        mean_battery: battery,
        steady_window: window,
        steady_transmit_rate: ratio(&counts[0], &counts[1]),
        transmit_rate: ratio(&counts[2], &counts[3]),
        stall_rate: ratio(&counts[4], &total_steps),
        invariants,
    })
}
