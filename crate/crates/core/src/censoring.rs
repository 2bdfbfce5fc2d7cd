//! Importance of a node's estimate and the adaptive balanced transmitter.
//!
//! The importance `x_k` is how much lower the node's smoothed squared error
//! `J_k` is than the neighborhood average. A node broadcasts when `x_k`
//! exceeds its threshold `τ_k`, and `τ_k` follows a stochastic-gradient
//! recursion whose only fixed point is a transmit fraction of `1 − ρ`, the
//! fraction at which expected consumption equals expected harvest.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CensorError {
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

/// Transmission decision of one node in one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Censor,
    Transmit,
}

impl Action {
    pub fn is_transmit(self) -> bool {
        self == Action::Transmit
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Action::Censor => 0.0,
            Action::Transmit => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensorParams {
    /// When false the transmitter always broadcasts and `τ` stays frozen.
    pub enabled: bool,
    pub alpha_x: f64,
    pub eta: f64,
    pub tau_init: f64,
    pub rho_smoothing: f64,
    pub rho_clamp: (f64, f64),
}

impl Default for CensorParams {
    fn default() -> Self {
        Self {
            enabled: true,
            alpha_x: 0.1,
            eta: 0.01,
            tau_init: 0.0,
            rho_smoothing: 0.05,
            rho_clamp: (0.01, 0.99),
        }
    }
}

impl CensorParams {
    pub fn validate(&self) -> Result<(), CensorError> {
        let bad = |key, reason: &str| {
            Err(CensorError::Invalid {
                key,
                reason: reason.to_string(),
            })
        };
        if !(0.0..=1.0).contains(&self.alpha_x) {
            return bad("alpha_x", "must lie in [0, 1]");
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad("eta", "must be finite and >= 0");
        }
        if !self.tau_init.is_finite() {
            return bad("tau_init", "must be finite");
        }
        if !(self.rho_smoothing > 0.0 && self.rho_smoothing <= 1.0) {
            return bad("rho_smoothing", "must lie in (0, 1]");
        }
        let (lo, hi) = self.rho_clamp;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return bad("rho_clamp", "need 0 <= lo <= hi <= 1");
        }
        Ok(())
    }
}

/// Per-node censoring state.
#[derive(Debug, Clone, PartialEq)]
pub struct CensorState {
    params: CensorParams,
    tau: f64,
    j: f64,
    b0_est: f64,
    b1_est: f64,
    /// Cost samples seen after censoring and after transmitting.
    counts: [u64; 2],
}

impl CensorState {
    pub fn new(params: CensorParams) -> Self {
        Self {
            params,
            tau: params.tau_init,
            j: 0.0,
            b0_est: 0.0,
            b1_est: 0.0,
            counts: [0, 0],
        }
    }

    pub fn params(&self) -> &CensorParams {
        &self.params
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Smoothed squared error `J_k`.
    pub fn local_mse(&self) -> f64 {
        self.j
    }

    pub fn cost_estimates(&self) -> (f64, f64) {
        (self.b0_est, self.b1_est)
    }

    pub fn sample_counts(&self) -> [u64; 2] {
        self.counts
    }

    /// `J ← (1 − α_x) J + α_x ξ̌²`, where `ξ̌` is the error of the combined
    /// estimate on local data.
    pub fn update_local_mse(&mut self, check_error: f64) {
        let a = self.params.alpha_x;
        self.j = (1.0 - a) * self.j + a * check_error * check_error;
    }

    /// Decision against the current threshold. A disabled censor always
    /// transmits.
    pub fn decide(&self, importance: f64) -> Action {
        if self.params.enabled {
            decide(importance, self.tau)
        } else {
            Action::Transmit
        }
    }

    /// `τ ← τ + η [ρ a − (1 − ρ)(1 − a)]`. No-op when censoring is disabled.
    pub fn update_threshold(&mut self, action: Action) {
        if !self.params.enabled {
            return;
        }
        self.tau = threshold_step(self.tau, self.params.eta, self.rho(), action);
    }

    /// Folds the realized net cost of a step into the running mean for the
    /// action taken. Early samples are averaged uniformly; the smoothing
    /// factor takes over once it exceeds `1/count`.
    pub fn update_cost_estimates(&mut self, action: Action, observed_cost: f64) {
        let idx = action.is_transmit() as usize;
        self.counts[idx] += 1;
        let gain = (1.0 / self.counts[idx] as f64).max(self.params.rho_smoothing);
        let est = if action.is_transmit() {
            &mut self.b1_est
        } else {
            &mut self.b0_est
        };
        *est += gain * (observed_cost - *est);
    }

    /// `ρ = b̄₁ / (b̄₁ − b̄₀)`, clamped. Defaults to 0.5 until both actions
    /// have been sampled, and whenever the denominator is not positive.
    pub fn rho(&self) -> f64 {
        if self.counts.contains(&0) {
            return 0.5;
        }
        rho_from_costs(self.b0_est, self.b1_est, self.params.rho_clamp)
    }
}

/// Clamped cost ratio `b̄₁ / (b̄₁ − b̄₀)`.
pub fn rho_from_costs(b0: f64, b1: f64, clamp: (f64, f64)) -> f64 {
    let denom = b1 - b0;
    if denom.is_nan() || denom <= 1e-12 {
        return 0.5;
    }
    (b1 / denom).clamp(clamp.0, clamp.1)
}

/// One step of the threshold recursion.
pub fn threshold_step(tau: f64, eta: f64, rho: f64, action: Action) -> f64 {
    let a = action.as_f64();
    tau + eta * (rho * a - (1.0 - rho) * (1.0 - a))
}

/// `max{mean(J over the closed neighborhood) − J_k, 0}`.
///
/// `neighborhood_j` must include the node's own value.
pub fn importance(own_j: f64, neighborhood_j: &[f64]) -> f64 {
    if neighborhood_j.is_empty() {
        return 0.0;
    }
    let mean = neighborhood_j.iter().sum::<f64>() / neighborhood_j.len() as f64;
    (mean - own_j).max(0.0)
}

/// Transmit iff `x > τ`; ties censor.
pub fn decide(importance: f64, tau: f64) -> Action {
    if importance > tau {
        Action::Transmit
    } else {
        Action::Censor
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn state(alpha_x: f64, eta: f64) -> CensorState {
        CensorState::new(CensorParams {
            alpha_x,
            eta,
            ..Default::default()
        })
    }

    #[test]
    fn local_mse_examples() {
        let mut s = state(1.0, 0.01);
        s.update_local_mse(3.0);
        assert_eq!(s.local_mse(), 9.0);

        let mut s = state(0.0, 0.01);
        s.update_local_mse(3.0);
        assert_eq!(s.local_mse(), 0.0);

        let mut s = state(1.0, 0.01);
        s.update_local_mse(1.0);
        s.params.alpha_x = 0.1;
        s.update_local_mse(0.0);
        assert!((s.local_mse() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn importance_examples() {
        assert_eq!(importance(0.3, &[0.3, 0.3, 0.3]), 0.0);
        let x = importance(0.1, &[0.1, 0.5, 0.6]);
        assert!((x - 0.3).abs() < 1e-15);
        assert_eq!(importance(0.9, &[0.9, 0.1]), 0.0);
    }

    #[test]
    fn decision_examples() {
        assert_eq!(decide(0.5, 0.2), Action::Transmit);
        assert_eq!(decide(0.2, 0.2), Action::Censor);
        assert_eq!(decide(0.0, -1e-9), Action::Transmit);
    }

    #[test]
    fn threshold_examples() {
        let up = threshold_step(0.0, 0.01, 0.9, Action::Transmit);
        assert!((up - 0.009).abs() < 1e-15);
        let down = threshold_step(0.0, 0.01, 0.9, Action::Censor);
        assert!((down + 0.001).abs() < 1e-15);
        assert_eq!(threshold_step(0.7, 0.0, 0.9, Action::Censor), 0.7);
    }

    #[test]
    fn rho_defaults_and_guards() {
        let mut s = state(0.1, 0.01);
        assert_eq!(s.rho(), 0.5);
        s.update_cost_estimates(Action::Transmit, 1.8);
        assert_eq!(s.rho(), 0.5);
        s.update_cost_estimates(Action::Censor, -0.2);
        assert!((s.rho() - 0.9).abs() < 1e-12);
        // Equal costs: degenerate denominator.
        assert_eq!(rho_from_costs(1.0, 1.0, (0.01, 0.99)), 0.5);
        // Ratios outside the clamp.
        assert_eq!(rho_from_costs(0.5, 1.0, (0.01, 0.99)), 0.99);
        assert_eq!(rho_from_costs(-2.0, -1.0, (0.01, 0.99)), 0.01);
    }

    #[test]
    fn disabled_censor_always_transmits() {
        let mut s = CensorState::new(CensorParams {
            enabled: false,
            ..Default::default()
        });
        assert_eq!(s.decide(0.0), Action::Transmit);
        s.update_threshold(Action::Transmit);
        assert_eq!(s.tau(), 0.0);
    }

    #[test]
    fn low_threshold_with_zero_step_never_censors() {
        let mut s = CensorState::new(CensorParams {
            eta: 0.0,
            tau_init: -1.0,
            ..Default::default()
        });
        for i in 0..100 {
            let x = (i as f64 * 0.37).sin().abs();
            let a = s.decide(x);
            assert_eq!(a, Action::Transmit);
            s.update_threshold(a);
        }
    }

    proptest! {
        #[test]
        fn importance_nonnegative(own in 0.0f64..10.0, others in prop::collection::vec(0.0f64..10.0, 0..6)) {
            let mut all = others.clone();
            all.push(own);
            prop_assert!(importance(own, &all) >= 0.0);
        }

        #[test]
        fn decide_monotone_in_threshold(x in 0.0f64..2.0, t1 in -1.0f64..2.0, dt in 0.0f64..1.0) {
            let low = decide(x, t1).as_f64();
            let high = decide(x, t1 + dt).as_f64();
            prop_assert!(high <= low);
        }

        #[test]
        fn rho_in_clamp(b0 in -5.0f64..5.0, b1 in -5.0f64..5.0) {
            let r = rho_from_costs(b0, b1, (0.01, 0.99));
            prop_assert!((0.01..=0.99).contains(&r));
        }
    }
}
