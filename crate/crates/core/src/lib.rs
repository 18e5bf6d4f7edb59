//! Link-level simulator and joint optimizer for a dual-aerial-RIS network:
//! a terrestrial base station and a satellite serve separate user sets,
//! assisted by RIS panels on a UAV and a high-altitude platform whose
//! trajectories are optimized together with precoders and phase shifts.
//!
//! The crate is organized around the alternating optimizer:
//! - [`scenario`]: geometry, configuration, user placement
//! - [`channel`]: per-slot channel synthesis and RIS composition
//! - [`metrics`]: SINR, rates, weighted-MSE quantities
//! - [`wmmse`]: precoder optimization (alternating MMSE updates)
//! - [`ris`]: phase-shift optimization on the unit-modulus manifold
//! - [`trajectory`]: platform trajectory optimization via convex surrogates
//! - [`bcd`]: the outer loop, benchmark schemes, Monte Carlo harness
//! - [`config`] / [`experiment`]: file formats and experiment presets

pub mod bcd;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod frame;
pub mod metrics;
pub mod ris;
pub mod rng;
pub mod scenario;
pub mod trajectory;
pub mod wmmse;

pub use channel::{ChannelSet, CMat, CVec, EffectiveChannels};
pub use error::{Result, SimError};
pub use metrics::{Auxiliaries, PrecoderSet, RateReport, SinrSet};
pub use scenario::{Position3D, Scenario, SystemConfig, Trajectory};
