//! Censored diffusion adaptation over energy-harvesting sensor networks.
//!
//! Nodes of a wireless sensor network cooperatively estimate a parameter
//! vector with a decoupled adapt-then-combine diffusion of NLMS filters.
//! Each node runs on a finite battery refilled by random harvests and decides
//! step by step whether its estimate is worth broadcasting, using an
//! adaptive balanced threshold that matches long-run consumption to harvest.
//!
//! The [`sim`] module runs the censored scheme next to two baselines (the
//! same diffusion broadcasting whenever alive, and unconstrained diffusion),
//! [`scenario`] reads scenario files and presets, and [`output`] writes
//! learning curves and summaries.

pub mod censoring;
pub mod diffusion;
pub mod energy;
pub mod network;
pub mod output;
pub mod rng;
pub mod scenario;
pub mod signal;
pub mod sim;

pub use censoring::{Action, CensorParams, CensorState};
pub use diffusion::{project_simplex, CombinerPolicy, DiffusionParams, NodeEstimator};
pub use energy::{EnergyParams, EnergyState};
pub use network::Topology;
pub use scenario::Scenario;
pub use sim::{monte_carlo, run, MonteCarloResult, Scheme, SimConfig, SimTrace};
