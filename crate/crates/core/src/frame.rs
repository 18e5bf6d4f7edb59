//! Frame-level helpers: one channel realization per slot and the average
//! sum-rate evaluation used by the outer optimizer and the trajectory
//! safeguard.
//!
//! A realization is synthesized once per trial at the initial trajectory
//! positions and kept immutable; evaluations at other positions rescale the
//! large-scale factors from the pristine realization, so the same positions
//! always reproduce identical channels.

use rand::Rng;

use crate::channel::{assemble_channel_set, compose_effective_channels, CVec, ChannelSet};
use crate::error::Result;
use crate::metrics::{average_sum_rate, compute_sinrs, PrecoderSet, RateReport};
use crate::scenario::{Position3D, Scenario};

/// Per-slot channel realizations drawn at the initial trajectories.
pub fn assemble_frame<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Result<Vec<ChannelSet>> {
    (0..scenario.config.slots)
        .map(|n| {
            assemble_channel_set(
                scenario,
                scenario.uav_init_traj.points[n],
                scenario.hap_init_traj.points[n],
                rng,
            )
        })
        .collect()
}

/// Average sum-rate of the frame for the given precoders, phases, and
/// trajectories, with large-scale gains rescaled to the trajectory positions.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_frame(
    scenario: &Scenario,
    frame: &[ChannelSet],
    precoders: &[PrecoderSet],
    uav_phases: &[CVec],
    hap_phases: &[CVec],
    uav_traj: &[Position3D],
    hap_traj: &[Position3D],
    include_cascade: bool,
) -> Result<RateReport> {
    let cfg = &scenario.config;
    let mut per_slot = Vec::with_capacity(frame.len());
    for n in 0..frame.len() {
        let cs = frame[n].rescaled(scenario, uav_traj[n], hap_traj[n]);
        let eff = compose_effective_channels(
            &cs,
            &uav_phases[n],
            &hap_phases[n],
            include_cascade,
            cfg.cross_tier_interference,
        )?;
        per_slot.push(compute_sinrs(&eff, &precoders[n], cfg.noise_w, cfg.noise_w));
    }
    Ok(average_sum_rate(&per_slot))
}
