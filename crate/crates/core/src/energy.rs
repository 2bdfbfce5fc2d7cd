//! Finite batteries with stochastic energy harvesting.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

fn invalid(key: &'static str, reason: impl Into<String>) -> EnergyError {
    EnergyError::Invalid {
        key,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    /// Battery capacity `B`.
    pub capacity: f64,
    /// Cost `b₀` of sensing and adapting for one step.
    pub sense_cost: f64,
    /// Extra cost `Δ` of one broadcast.
    pub tx_cost: f64,
    /// Probability `p_h` of a harvest in any step.
    pub harvest_prob: f64,
    /// Harvest amount range `[h_min, h_max]`.
    pub harvest_range: (f64, f64),
    /// Level at step 0.
    pub initial: f64,
}

impl EnergyParams {
    pub fn with_harvest_prob(harvest_prob: f64) -> Self {
        Self {
            capacity: 500.0,
            sense_cost: 1.0,
            tx_cost: 2.0,
            harvest_prob,
            harvest_range: (2.0, 4.0),
            initial: 500.0,
        }
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        let finite = |key, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(key, format!("must be finite, got {v}")))
            }
        };
        finite("battery", self.capacity)?;
        finite("sense_cost", self.sense_cost)?;
        finite("tx_cost", self.tx_cost)?;
        finite("harvest_prob", self.harvest_prob)?;
        finite("harvest_range", self.harvest_range.0)?;
        finite("harvest_range", self.harvest_range.1)?;
        finite("initial_battery", self.initial)?;
        if self.capacity <= 0.0 {
            return Err(invalid("battery", "must be > 0"));
        }
        if self.sense_cost < 0.0 {
            return Err(invalid("sense_cost", "must be >= 0"));
        }
        if self.tx_cost < 0.0 {
            return Err(invalid("tx_cost", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.harvest_prob) {
            return Err(invalid(
                "harvest_prob",
                format!("must lie in [0, 1], got {}", self.harvest_prob),
            ));
        }
        let (lo, hi) = self.harvest_range;
        if lo < 0.0 || hi < lo {
            return Err(invalid("harvest_range", "need 0 <= lo <= hi"));
        }
        if !(0.0..=self.capacity).contains(&self.initial) {
            return Err(invalid("initial_battery", "must lie in [0, battery]"));
        }
        Ok(())
    }

    /// Expected harvest per step, `p_h (h_min + h_max) / 2`.
    pub fn mean_harvest(&self) -> f64 {
        self.harvest_prob * 0.5 * (self.harvest_range.0 + self.harvest_range.1)
    }
}

/// Energy stored in one node's battery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyState {
    level: f64,
}

impl EnergyState {
    pub fn new(level: f64) -> Self {
        Self { level }
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    /// Whether the node cannot afford the tentative action this step, i.e.
    /// whether `e − (b₀ + aΔ) + h ≤ 0`.
    pub fn would_stall(&self, params: &EnergyParams, transmit: bool, harvest: f64) -> bool {
        let spend = params.sense_cost + if transmit { params.tx_cost } else { 0.0 };
        self.level - spend + harvest <= 0.0
    }

    pub fn apply(&mut self, cost: f64, capacity: f64) {
        self.level = step_battery(self.level, cost, capacity);
    }
}

/// Harvested energy for one step: `U[h_min, h_max]` with probability `p_h`,
/// otherwise zero.
pub fn draw_harvest<R: Rng + ?Sized>(params: &EnergyParams, rng: &mut R) -> f64 {
    let coin: f64 = rng.random();
    if coin < params.harvest_prob {
        let (lo, hi) = params.harvest_range;
        lo + (hi - lo) * rng.random::<f64>()
    } else {
        0.0
    }
}

/// Net energy spent in a step: `b₀ + aΔ − h`. Negative means net refill.
pub fn energy_cost(sense_cost: f64, transmit: bool, tx_cost: f64, harvest: f64) -> f64 {
    sense_cost + if transmit { tx_cost } else { 0.0 } - harvest
}

/// A stalled node spends nothing but still harvests.
pub fn idle_cost(harvest: f64) -> f64 {
    -harvest
}

/// `max(min(e − b, B), 0)`.
pub fn step_battery(level: f64, cost: f64, capacity: f64) -> f64 {
    (level - cost).min(capacity).max(0.0)
}
