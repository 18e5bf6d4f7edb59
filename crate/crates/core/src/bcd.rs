//! Outer alternating loop and the experiment harness.
//!
//! One iteration refreshes the effective channels at the current phases and
//! positions, then runs the precoder solver on every slot, the manifold
//! phase solver on both panels, and the trajectory solver, in that order.
//! The frame average sum-rate is non-decreasing across iterations: each
//! subsolver only improves it and trajectory steps are safeguarded.
//!
//! The benchmark schemes reuse the same loop with parts disabled, so a
//! scheme comparison on matched seeds shares the channel realization and
//! differs only in what is optimized.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use std::time::Instant;

use crate::channel::{compose_effective_channels, CVec, ChannelSet};
use crate::error::{Result, SimError};
use crate::frame::{assemble_frame, evaluate_frame};
use crate::metrics::{Auxiliaries, PrecoderSet, RateReport};
use crate::ris::{assemble_quadratic, rcg_minimize, AssemblyContext, PhaseVector, RisTier};
use crate::rng::{stream_rng, trial_seed, Stream};
use crate::scenario::{build_scenario, Scenario, SystemConfig, Trajectory};
use crate::trajectory::{sca_optimize, ScaOptions};
use crate::wmmse::{matched_filter_init, update_auxiliaries, wmmse_optimize, TierMask, WmmseOptions};

/// Optimization scheme selector: the proposed joint design plus the
/// benchmark ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Proposed,
    NoRis,
    RandomRis,
    FixedTrajectory,
    TbsOnly,
    SatOnly,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Proposed,
        SchemeId::NoRis,
        SchemeId::RandomRis,
        SchemeId::FixedTrajectory,
        SchemeId::TbsOnly,
        SchemeId::SatOnly,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::Proposed => "proposed",
            SchemeId::NoRis => "no_ris",
            SchemeId::RandomRis => "random_ris",
            SchemeId::FixedTrajectory => "fixed_trajectory",
            SchemeId::TbsOnly => "tbs_only",
            SchemeId::SatOnly => "sat_only",
        }
    }

    pub fn parse(s: &str) -> Result<SchemeId> {
        Self::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| SimError::invalid("scheme", format!("unknown scheme `{s}`")))
    }

    fn behavior(&self) -> Behavior {
        match self {
            SchemeId::Proposed => Behavior {
                include_cascade: true,
                optimize_phases: true,
                random_phases: false,
                optimize_trajectories: true,
                mask: TierMask::both(),
            },
            SchemeId::NoRis => Behavior {
                include_cascade: false,
                optimize_phases: false,
                random_phases: false,
                optimize_trajectories: false,
                mask: TierMask::both(),
            },
            SchemeId::RandomRis => Behavior {
                include_cascade: true,
                optimize_phases: false,
                random_phases: true,
                optimize_trajectories: false,
                mask: TierMask::both(),
            },
            SchemeId::FixedTrajectory => Behavior {
                include_cascade: true,
                optimize_phases: true,
                random_phases: false,
                optimize_trajectories: false,
                mask: TierMask::both(),
            },
            SchemeId::TbsOnly => Behavior {
                include_cascade: true,
                optimize_phases: true,
                random_phases: false,
                optimize_trajectories: true,
                mask: TierMask {
                    tbs: true,
                    sat: false,
                },
            },
            SchemeId::SatOnly => Behavior {
                include_cascade: true,
                optimize_phases: true,
                random_phases: false,
                optimize_trajectories: true,
                mask: TierMask {
                    tbs: false,
                    sat: true,
                },
            },
        }
    }
}

/// What parts of the joint design a scheme runs.
#[derive(Debug, Clone, Copy)]
struct Behavior {
    include_cascade: bool,
    optimize_phases: bool,
    random_phases: bool,
    optimize_trajectories: bool,
    mask: TierMask,
}

/// Total/TBS/SAT average sum-rate triple for one iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTriple {
    pub total: f64,
    pub tbs: f64,
    pub sat: f64,
}

impl From<&RateReport> for RateTriple {
    fn from(r: &RateReport) -> Self {
        Self {
            total: r.average,
            tbs: r.average_tbs,
            sat: r.average_sat,
        }
    }
}

/// Final iterate of one optimization run.
#[derive(Debug, Clone)]
pub struct BcdState {
    pub iterations: usize,
    /// Frame average sum-rate per iterate, index 0 = initialization.
    pub rate_history: Vec<RateTriple>,
    pub precoders: Vec<PrecoderSet>,
    pub uav_phases: Vec<CVec>,
    pub hap_phases: Vec<CVec>,
    pub uav_traj: Trajectory,
    pub hap_traj: Trajectory,
    pub reduced_precision: bool,
}

/// State plus the final per-user rate report.
#[derive(Debug, Clone)]
pub struct SchemeOutcome {
    pub state: BcdState,
    pub report: RateReport,
}

fn wmmse_options(cfg: &SystemConfig, mask: TierMask) -> WmmseOptions {
    WmmseOptions {
        tbs_power: cfg.tbs_power_w,
        sat_power: cfg.sat_power_w,
        noise_tbs: cfg.noise_w,
        noise_sat: cfg.noise_w,
        tol: cfg.wmmse_tol,
        max_iters: cfg.wmmse_max_iters,
        coordinated: cfg.coordinated,
        mask,
    }
}

/// Runs the alternating loop on a prepared channel realization.
///
/// `scheme_rng` feeds only scheme-internal randomness (random RIS phases),
/// so matched seeds share realizations across schemes.
pub fn optimize_realization<R: Rng + ?Sized>(
    scenario: &Scenario,
    frame: &[ChannelSet],
    scheme: SchemeId,
    scheme_rng: &mut R,
) -> Result<SchemeOutcome> {
    let cfg = &scenario.config;
    let b = scheme.behavior();
    let n_slots = cfg.slots;
    let n_u = cfg.uav_ris_elements();
    let n_h = cfg.hap_ris_elements();

    let draw_phases = |count: usize, rng: &mut R| -> Vec<CVec> {
        (0..n_slots)
            .map(|_| {
                CVec::from_iterator(
                    count,
                    (0..count).map(|_| {
                        Complex64::from_polar(
                            1.0,
                            rng.gen_range(0.0..2.0 * std::f64::consts::PI),
                        )
                    }),
                )
            })
            .collect()
    };
    let mut uav_phases: Vec<CVec> = if b.random_phases {
        draw_phases(n_u, scheme_rng)
    } else {
        vec![PhaseVector::all_ones(n_u).as_vec().clone(); n_slots]
    };
    let mut hap_phases: Vec<CVec> = if b.random_phases {
        draw_phases(n_h, scheme_rng)
    } else {
        vec![PhaseVector::all_ones(n_h).as_vec().clone(); n_slots]
    };

    let mut uav_traj = scenario.uav_init_traj.clone();
    let mut hap_traj = scenario.hap_init_traj.clone();
    let wopts = wmmse_options(cfg, b.mask);
    let mut precoders: Vec<PrecoderSet> = frame
        .iter()
        .map(|cs| matched_filter_init(&cs.tbs_to_user, &cs.sat_to_user, &wopts))
        .collect();

    let evaluate = |p: &[PrecoderSet],
                    vu: &[CVec],
                    vh: &[CVec],
                    tu: &Trajectory,
                    th: &Trajectory|
     -> Result<RateReport> {
        evaluate_frame(
            scenario,
            frame,
            p,
            vu,
            vh,
            &tu.points,
            &th.points,
            b.include_cascade,
        )
    };

    let mut report = evaluate(&precoders, &uav_phases, &hap_phases, &uav_traj, &hap_traj)?;
    let mut history = vec![RateTriple::from(&report)];
    let mut reduced_precision = false;
    let mut iterations = 0;

    for _ in 0..cfg.bcd_max_iters {
        let mut aux_per_slot: Vec<Auxiliaries> = Vec::with_capacity(n_slots);
        let mut slot_channels: Vec<ChannelSet> = Vec::with_capacity(n_slots);
        for n in 0..n_slots {
            let cs = frame[n].rescaled(scenario, uav_traj.points[n], hap_traj.points[n]);
            let eff = compose_effective_channels(
                &cs,
                &uav_phases[n],
                &hap_phases[n],
                b.include_cascade,
                cfg.cross_tier_interference,
            )?;
            let out = wmmse_optimize(&eff, precoders[n].clone(), &wopts)?;
            precoders[n] = out.precoders;
            aux_per_slot.push(out.aux);
            slot_channels.push(cs);
        }

        if b.optimize_phases {
            for n in 0..n_slots {
                let cs = &slot_channels[n];
                let ctx = AssemblyContext {
                    aux: &aux_per_slot[n],
                    frozen_uav: &uav_phases[n],
                    frozen_hap: &hap_phases[n],
                    noise_tbs: cfg.noise_w,
                    noise_sat: cfg.noise_w,
                    cross_tier: cfg.cross_tier_interference,
                };
                let qf = assemble_quadratic(RisTier::Uav, cs, &precoders[n], &ctx)?;
                let v0 = PhaseVector::new(uav_phases[n].clone())?;
                let (v, _) = rcg_minimize(&qf, &v0, cfg.rcg_tol, cfg.rcg_max_iters)?;
                uav_phases[n] = v.as_vec().clone();

                let refreshed;
                let aux = if cfg.refresh_aux_between_tiers {
                    let eff = compose_effective_channels(
                        cs,
                        &uav_phases[n],
                        &hap_phases[n],
                        true,
                        cfg.cross_tier_interference,
                    )?;
                    refreshed =
                        update_auxiliaries(&eff, &precoders[n], cfg.noise_w, cfg.noise_w)?;
                    &refreshed
                } else {
                    &aux_per_slot[n]
                };
                let ctx = AssemblyContext {
                    aux,
                    frozen_uav: &uav_phases[n],
                    frozen_hap: &hap_phases[n],
                    noise_tbs: cfg.noise_w,
                    noise_sat: cfg.noise_w,
                    cross_tier: cfg.cross_tier_interference,
                };
                let qf = assemble_quadratic(RisTier::Hap, cs, &precoders[n], &ctx)?;
                let v0 = PhaseVector::new(hap_phases[n].clone())?;
                let (v, _) = rcg_minimize(&qf, &v0, cfg.rcg_tol, cfg.rcg_max_iters)?;
                hap_phases[n] = v.as_vec().clone();
            }
        }

        if b.optimize_trajectories {
            let opts = ScaOptions::from_config(cfg);
            let (tu, th, rep) = sca_optimize(
                scenario,
                frame,
                &precoders,
                &uav_phases,
                &hap_phases,
                &uav_traj,
                &hap_traj,
                &opts,
            )?;
            uav_traj = tu;
            hap_traj = th;
            reduced_precision |= rep.reduced_precision;
        }

        report = evaluate(&precoders, &uav_phases, &hap_phases, &uav_traj, &hap_traj)?;
        let rate = RateTriple::from(&report);
        let gain = (rate.total - history.last().unwrap().total).abs();
        history.push(rate);
        iterations += 1;
        if gain <= cfg.bcd_tol {
            break;
        }
    }

    Ok(SchemeOutcome {
        state: BcdState {
            iterations,
            rate_history: history,
            precoders,
            uav_phases,
            hap_phases,
            uav_traj,
            hap_traj,
            reduced_precision,
        },
        report,
    })
}

/// Full joint optimization of one realization drawn from `seed`.
pub fn bcd_optimize(scenario: &Scenario, seed: u64) -> Result<SchemeOutcome> {
    run_scheme(SchemeId::Proposed, scenario, seed)
}

/// Runs one scheme on the realization drawn from `seed`.
pub fn run_scheme(scheme: SchemeId, scenario: &Scenario, seed: u64) -> Result<SchemeOutcome> {
    let mut channel_rng = stream_rng(seed, Stream::Channel);
    let frame = assemble_frame(scenario, &mut channel_rng)?;
    let mut scheme_rng = stream_rng(seed, Stream::Scheme);
    optimize_realization(scenario, &frame, scheme, &mut scheme_rng)
}

/// One Monte Carlo data point.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub scheme: SchemeId,
    pub rate: RateTriple,
    pub iterations: usize,
    pub rate_history: Vec<RateTriple>,
    pub wall_time_ms: f64,
    pub reduced_precision: bool,
}

/// Independent trials over derived seeds; each trial draws its own scenario
/// and realization, shared by every scheme for a matched comparison. Trials
/// run in parallel; outputs are ordered by (trial, scheme) and independent
/// of thread count.
pub fn monte_carlo(
    schemes: &[SchemeId],
    config: &SystemConfig,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<TrialResult>> {
    if trials == 0 {
        return Err(SimError::invalid("trials", "must be >= 1"));
    }
    let mut results: Vec<Vec<TrialResult>> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<TrialResult>> {
            let seed = trial_seed(base_seed, t as u64);
            let scenario = build_scenario(config, seed)?;
            let mut channel_rng = stream_rng(seed, Stream::Channel);
            let frame = assemble_frame(&scenario, &mut channel_rng)?;
            schemes
                .iter()
                .map(|&scheme| {
                    let started = Instant::now();
                    let mut scheme_rng = stream_rng(seed, Stream::Scheme);
                    let out = optimize_realization(&scenario, &frame, scheme, &mut scheme_rng)?;
                    Ok(TrialResult {
                        trial: t,
                        scheme,
                        rate: *out.state.rate_history.last().unwrap(),
                        iterations: out.state.iterations,
                        rate_history: out.state.rate_history.clone(),
                        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
                        reduced_precision: out.state.reduced_precision,
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(results.drain(..).flatten().collect())
}

/// Mean final rate of one scheme across trials.
pub fn mean_rate(results: &[TrialResult], scheme: SchemeId) -> f64 {
    let xs: Vec<f64> = results
        .iter()
        .filter(|r| r.scheme == scheme)
        .map(|r| r.rate.total)
        .collect();
    xs.iter().sum::<f64>() / xs.len() as f64
}
