//! Decoupled adapt-then-combine diffusion.
//!
//! Each node keeps a purely local NLMS estimate `ψ_k` and a combined estimate
//! `w_k = c_kk ψ_k + Σ_{ℓ≠k} c_ℓk w_ℓ(n-1)`. The local estimate never sees the
//! combined one, so neighbors that go quiet only affect `w_k`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::network::Topology;
use crate::signal::dot;

/// Absolute tolerance on the unit-sum constraint of combination weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffusionError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no estimate has ever been received from node {0}")]
    MissingNeighborEstimate(usize),
    #[error("combination weights violate the simplex constraint (min {min}, sum {sum})")]
    WeightConstraintViolated { min: f64, sum: f64 },
    #[error("non-finite value in weight vector")]
    NonFiniteInput,
    #[error("empty weight vector")]
    EmptyInput,
    #[error("node {from} is not a neighbor of node {to}")]
    NotANeighbor { from: usize, to: usize },
}

/// Rule used to set the combination weights `c_ℓk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CombinerPolicy {
    /// `c_ℓk = 1/|N_k|`.
    Uniform,
    /// Metropolis-Hastings weights `1/max(|N_k|, |N_ℓ|)`, remainder on self.
    Metropolis,
    /// Inverse smoothed one-step prediction error of every estimate in the
    /// neighborhood, evaluated on local data and normalized onto the simplex.
    /// The self weight uses `ψ_k` in place of a received estimate.
    AdaptiveLs { smoothing: f64 },
}

impl CombinerPolicy {
    pub const DEFAULT_SMOOTHING: f64 = 0.1;

    pub fn name(&self) -> &'static str {
        match self {
            CombinerPolicy::Uniform => "uniform",
            CombinerPolicy::Metropolis => "metropolis",
            CombinerPolicy::AdaptiveLs { .. } => "adaptive-ls",
        }
    }
}

impl Default for CombinerPolicy {
    fn default() -> Self {
        CombinerPolicy::AdaptiveLs {
            smoothing: Self::DEFAULT_SMOOTHING,
        }
    }
}

impl fmt::Display for CombinerPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CombinerPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(CombinerPolicy::Uniform),
            "metropolis" => Ok(CombinerPolicy::Metropolis),
            "adaptive-ls" => Ok(CombinerPolicy::default()),
            other => Err(format!(
                "unknown combiner `{other}` (expected uniform, metropolis or adaptive-ls)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    pub mu: f64,
    pub delta: f64,
    pub combiner: CombinerPolicy,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        Self {
            mu: 0.1,
            delta: 1e-5,
            combiner: CombinerPolicy::default(),
        }
    }
}

/// Last message received from a neighbor: its combined estimate and its
/// smoothed local error.
#[derive(Debug, Clone, PartialEq)]
pub struct Received {
    pub w: Vec<f64>,
    pub j: f64,
}

/// Diffusion state of one node.
#[derive(Debug, Clone)]
pub struct NodeEstimator {
    node: usize,
    /// Closed neighborhood, ascending. All per-neighbor vectors are aligned
    /// with it.
    neighborhood: Vec<usize>,
    self_slot: usize,
    psi: Vec<f64>,
    w: Vec<f64>,
    mu: f64,
    delta: f64,
    policy: CombinerPolicy,
    weights: Vec<f64>,
    /// Entry at `self_slot` is always `None`.
    inbox: Vec<Option<Received>>,
    /// Smoothed squared prediction errors for the adaptive combiner.
    pred_err: Vec<Option<f64>>,
}

impl NodeEstimator {
    /// Cold start: `ψ = w = 0` and every neighbor assumed to hold a zero
    /// estimate with zero error.
    pub fn new(node: usize, topology: &Topology, params: &DiffusionParams, taps: usize) -> Self {
        let neighborhood = topology
            .neighbors(node, true)
            .expect("node index within topology")
            .to_vec();
        let self_slot = neighborhood.binary_search(&node).unwrap();
        let size = neighborhood.len();
        let weights = match params.combiner {
            CombinerPolicy::Uniform | CombinerPolicy::AdaptiveLs { .. } => {
                vec![1.0 / size as f64; size]
            }
            CombinerPolicy::Metropolis => {
                let own = topology.degree(node) + 1;
                let mut c: Vec<f64> = neighborhood
                    .iter()
                    .map(|&l| {
                        if l == node {
                            0.0
                        } else {
                            1.0 / own.max(topology.degree(l) + 1) as f64
                        }
                    })
                    .collect();
                c[self_slot] = 1.0 - c.iter().sum::<f64>();
                c
            }
        };
        let inbox = neighborhood
            .iter()
            .map(|&l| {
                (l != node).then(|| Received {
                    w: vec![0.0; taps],
                    j: 0.0,
                })
            })
            .collect();
        Self {
            node,
            self_slot,
            psi: vec![0.0; taps],
            w: vec![0.0; taps],
            mu: params.mu,
            delta: params.delta,
            policy: params.combiner,
            weights,
            inbox,
            pred_err: vec![None; size],
            neighborhood,
        }
    }

    /// Drops every received estimate, as if no neighbor had ever spoken.
    pub fn with_empty_inbox(mut self) -> Self {
        for slot in &mut self.inbox {
            *slot = None;
        }
        self
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn taps(&self) -> usize {
        self.psi.len()
    }

    pub fn neighborhood(&self) -> &[usize] {
        &self.neighborhood
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn policy(&self) -> CombinerPolicy {
        self.policy
    }

    /// Combination weights aligned with [`Self::neighborhood`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_of(&self, l: usize) -> f64 {
        self.slot(l).map_or(0.0, |s| self.weights[s])
    }

    pub fn received(&self, l: usize) -> Option<&Received> {
        self.slot(l).and_then(|s| self.inbox[s].as_ref())
    }

    fn slot(&self, l: usize) -> Option<usize> {
        self.neighborhood.binary_search(&l).ok()
    }

    pub fn set_psi(&mut self, psi: &[f64]) -> Result<(), DiffusionError> {
        self.check_len(psi.len())?;
        self.psi.copy_from_slice(psi);
        Ok(())
    }

    /// Replaces the weights with the simplex projection of `raw`.
    pub fn set_weights(&mut self, raw: &[f64]) -> Result<(), DiffusionError> {
        if raw.len() != self.weights.len() {
            return Err(DiffusionError::DimensionMismatch {
                expected: self.weights.len(),
                got: raw.len(),
            });
        }
        self.weights = project_simplex(raw)?;
        Ok(())
    }

    fn check_len(&self, got: usize) -> Result<(), DiffusionError> {
        if got != self.psi.len() {
            return Err(DiffusionError::DimensionMismatch {
                expected: self.psi.len(),
                got,
            });
        }
        Ok(())
    }

    /// Stores a neighbor's broadcast. Entries are only ever overwritten by
    /// fresh messages; silence leaves the previous value in place.
    pub fn receive(&mut self, from: usize, w: &[f64], j: f64) -> Result<(), DiffusionError> {
        self.check_len(w.len())?;
        let slot = match self.slot(from) {
            Some(s) if s != self.self_slot => s,
            _ => {
                return Err(DiffusionError::NotANeighbor {
                    from,
                    to: self.node,
                })
            }
        };
        match &mut self.inbox[slot] {
            Some(entry) => {
                entry.w.copy_from_slice(w);
                entry.j = j;
            }
            empty => {
                *empty = Some(Received { w: w.to_vec(), j });
            }
        }
        Ok(())
    }

    /// NLMS step on the local estimate. Returns the a-priori error
    /// `ξ = d − ψᵀu` computed before the update.
    pub fn nlms_adapt(&mut self, u: &[f64], d: f64) -> Result<f64, DiffusionError> {
        self.check_len(u.len())?;
        let xi = d - dot(&self.psi, u);
        let energy = dot(u, u);
        let gain = self.mu * xi / (self.delta + energy);
        if gain.is_finite() {
            for (p, x) in self.psi.iter_mut().zip(u) {
                *p += gain * x;
            }
        }
        Ok(xi)
    }

    /// Updates the combination weights from local data `(u, d)`.
    ///
    /// `self_error` is the a-priori error of `ψ_k(n-1)`, i.e. the value
    /// returned by [`Self::nlms_adapt`] for the same data. Neighbor errors use
    /// the latest received (possibly stale) estimates. Static policies keep
    /// their weights.
    pub fn update_combiners(
        &mut self,
        u: &[f64],
        d: f64,
        self_error: f64,
    ) -> Result<(), DiffusionError> {
        self.check_len(u.len())?;
        let smoothing = match self.policy {
            CombinerPolicy::Uniform | CombinerPolicy::Metropolis => return Ok(()),
            CombinerPolicy::AdaptiveLs { smoothing } => smoothing,
        };
        let mut errors = Vec::with_capacity(self.neighborhood.len());
        for slot in 0..self.neighborhood.len() {
            errors.push(if slot == self.self_slot {
                self_error
            } else {
                let entry =
                    self.inbox[slot]
                        .as_ref()
                        .ok_or(DiffusionError::MissingNeighborEstimate(
                            self.neighborhood[slot],
                        ))?;
                d - dot(&entry.w, u)
            });
        }
        for (smoothed, err) in self.pred_err.iter_mut().zip(&errors) {
            let sq = err * err;
            *smoothed = Some(match *smoothed {
                Some(prev) => (1.0 - smoothing) * prev + smoothing * sq,
                None => sq,
            });
        }
        let inv: Vec<f64> = self
            .pred_err
            .iter()
            .map(|e| 1.0 / e.unwrap_or(1.0).max(1e-300))
            .collect();
        let total: f64 = inv.iter().sum();
        let raw: Vec<f64> = inv.iter().map(|x| x / total).collect();
        self.weights = project_simplex(&raw)?;
        Ok(())
    }

    /// Computes `w_k = c_kk ψ_k + Σ c_ℓk w_ℓ` and stores it.
    pub fn combine(&mut self) -> Result<&[f64], DiffusionError> {
        check_simplex(&self.weights)?;
        for (slot, entry) in self.inbox.iter().enumerate() {
            if slot != self.self_slot && entry.is_none() {
                return Err(DiffusionError::MissingNeighborEstimate(
                    self.neighborhood[slot],
                ));
            }
        }
        let c_self = self.weights[self.self_slot];
        for (out, p) in self.w.iter_mut().zip(&self.psi) {
            *out = c_self * p;
        }
        for (slot, entry) in self.inbox.iter().enumerate() {
            let Some(entry) = entry else { continue };
            let c = self.weights[slot];
            for (out, x) in self.w.iter_mut().zip(&entry.w) {
                *out += c * x;
            }
        }
        Ok(&self.w)
    }
}

fn check_simplex(weights: &[f64]) -> Result<(), DiffusionError> {
    let min = weights.iter().cloned().fold(f64::INFINITY, f64::min);
    let sum: f64 = weights.iter().sum();
    if min < 0.0 || (sum - 1.0).abs() > WEIGHT_SUM_TOL || !sum.is_finite() {
        return Err(DiffusionError::WeightConstraintViolated { min, sum });
    }
    Ok(())
}

/// Euclidean projection onto the probability simplex `{c ≥ 0, Σc = 1}`.
///
/// Sort-and-threshold method: find the largest `r` such that
/// `v_(r) − (Σ_{i≤r} v_(i) − 1)/r > 0` on the descending sort, then clip
/// `v − θ` at zero.
pub fn project_simplex(v: &[f64]) -> Result<Vec<f64>, DiffusionError> {
    if v.is_empty() {
        return Err(DiffusionError::EmptyInput);
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(DiffusionError::NonFiniteInput);
    }
    // Valid inputs pass through untouched so projection is exactly idempotent.
    if check_simplex(v).is_ok() {
        return Ok(v.to_vec());
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    // Absorb rounding so the sum is 1 to working precision.
    let sum: f64 = out.iter().sum();
    if sum > 0.0 {
        for x in &mut out {
            *x /= sum;
        }
    }
    Ok(out)
}
