//! Linear observation model `d = uᵀw_o + v` with white Gaussian regressors
//! and noise.

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("noise variance must be finite and >= 0, got {0}")]
    InvalidNoiseVariance(f64),
    #[error("signal power must be finite and > 0, got {0}")]
    InvalidSignalPower(f64),
    #[error("tap count must be >= 1")]
    ZeroTaps,
}

/// Per-node regressor power and measurement-noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSignalProfile {
    noise_variance: f64,
    signal_power: f64,
}

impl NodeSignalProfile {
    pub fn new(noise_variance: f64, signal_power: f64) -> Result<Self, SignalError> {
        if !noise_variance.is_finite() || noise_variance < 0.0 {
            return Err(SignalError::InvalidNoiseVariance(noise_variance));
        }
        if !signal_power.is_finite() || signal_power <= 0.0 {
            return Err(SignalError::InvalidSignalPower(signal_power));
        }
        Ok(Self {
            noise_variance,
            signal_power,
        })
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn signal_power(&self) -> f64 {
        self.signal_power
    }
}

/// The unknown parameter vector shared by all nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    w_o: Vec<f64>,
}

impl GroundTruth {
    pub fn new(w_o: Vec<f64>) -> Result<Self, SignalError> {
        if w_o.is_empty() {
            return Err(SignalError::ZeroTaps);
        }
        Ok(Self { w_o })
    }

    /// Draws i.i.d. `N(0, 1/M)` taps, so that `E‖w_o‖² = 1`.
    pub fn random<R: Rng + ?Sized>(taps: usize, rng: &mut R) -> Result<Self, SignalError> {
        if taps == 0 {
            return Err(SignalError::ZeroTaps);
        }
        let scale = (1.0 / taps as f64).sqrt();
        let w_o = (0..taps)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Ok(Self { w_o })
    }

    pub fn taps(&self) -> usize {
        self.w_o.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w_o
    }

    /// Squared Euclidean distance to an estimate.
    pub fn squared_deviation(&self, w: &[f64]) -> f64 {
        self.w_o.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

/// Fills `out` with i.i.d. zero-mean Gaussian components of variance
/// `signal_power`.
pub fn fill_regressor<R: Rng + ?Sized>(profile: &NodeSignalProfile, out: &mut [f64], rng: &mut R) {
    let std = profile.signal_power.sqrt();
    for x in out.iter_mut() {
        *x = std * rng.sample::<f64, _>(StandardNormal);
    }
}

pub fn sample_regressor<R: Rng + ?Sized>(
    profile: &NodeSignalProfile,
    taps: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut u = vec![0.0; taps];
    fill_regressor(profile, &mut u, rng);
    u
}

/// Noisy scalar measurement of `uᵀw_o`.
///
/// One standard normal is consumed per call, even when the noise variance is
/// zero, so noise streams stay aligned across profiles.
pub fn observe<R: Rng + ?Sized>(
    w_o: &[f64],
    u: &[f64],
    profile: &NodeSignalProfile,
    rng: &mut R,
) -> Result<f64, SignalError> {
    if u.len() != w_o.len() {
        return Err(SignalError::DimensionMismatch {
            expected: w_o.len(),
            got: u.len(),
        });
    }
    let clean = dot(u, w_o);
    let v: f64 = rng.sample(StandardNormal);
    Ok(clean + profile.noise_variance.sqrt() * v)
}

/// Noise variances of the seven-node scenario, node labels 1 through 7.
pub fn default_noise_profile() -> Vec<f64> {
    vec![1e-4, 1e-4, 1e-4, 0.01, 0.5, 0.5, 0.5]
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
