//! Platform trajectory optimization by successive convex approximation.
//!
//! Only the cascaded RIS links depend on the platform positions, through two
//! hop distances with known exponents. Each outer iteration freezes the
//! distance-independent cascade constant and the interference-plus-noise
//! terms, takes a first-order expansion of `d1^-g1 d2^-g2` composed with
//! linearized hop distances, and maximizes the resulting concave surrogate
//! rate over the speed/altitude/endpoint constraint set with projected
//! gradient ascent (projections by Dykstra's alternating scheme).
//!
//! Because the combined linearization is not a guaranteed global lower
//! bound, a candidate is accepted only if the true rescaled-channel sum-rate
//! does not decrease; otherwise the step is damped toward the previous
//! trajectory and finally rejected.

use crate::channel::{cascade_row, CVec, ChannelSet};
use crate::error::{Result, SimError};
use crate::frame::evaluate_frame;
use crate::metrics::PrecoderSet;
use crate::ris::RisTier;
use crate::scenario::{Position3D, Scenario, Trajectory};

const LN2: f64 = std::f64::consts::LN_2;
/// Dykstra termination: worst constraint violation.
const PROJECTION_TOL: f64 = 1e-8;
const PROJECTION_MAX_SWEEPS: usize = 500;
/// Projected-gradient controls.
const ASCENT_SUFFICIENT_INCREASE: f64 = 1e-4;
const ASCENT_MAX_ITERS: usize = 300;
const ASCENT_REL_TOL: f64 = 1e-6;
/// The rate objective is metrically shallow, so tiny relative gains can
/// coexist with material motion; require the iterate itself to settle too.
const ASCENT_DISPLACEMENT_FLOOR: f64 = 1e-6;
const ASCENT_MAX_HALVINGS: usize = 60;
/// Safeguard damping attempts (averaging toward the previous trajectory).
const DAMPING_ATTEMPTS: usize = 5;

/// Speed/altitude limits of one platform.
#[derive(Debug, Clone, Copy)]
pub struct PlatformLimits {
    pub speed_max: f64,
    pub dt: f64,
    pub alt_min: f64,
    pub alt_max: f64,
}

impl PlatformLimits {
    pub fn uav(cfg: &crate::scenario::SystemConfig) -> Self {
        Self {
            speed_max: cfg.uav_speed_max,
            dt: cfg.slot_duration_s,
            alt_min: cfg.uav_alt_min,
            alt_max: cfg.uav_alt_max,
        }
    }

    pub fn hap(cfg: &crate::scenario::SystemConfig) -> Self {
        Self {
            speed_max: cfg.hap_speed_max,
            dt: cfg.slot_duration_s,
            alt_min: cfg.hap_alt_min,
            alt_max: cfg.hap_alt_max,
        }
    }
}

/// Affine model of one cascaded link's received power around an expansion
/// point: `p(q) ~= value + gradient . (q - expansion)`.
#[derive(Debug, Clone, Copy)]
pub struct SurrogateCoefficients {
    /// Distance-independent cascade constant.
    pub cascade_constant: f64,
    /// Exact received cascade power at the expansion point.
    pub value_at_expansion: f64,
    pub gradient: [f64; 3],
    pub expansion: Position3D,
}

impl SurrogateCoefficients {
    /// Affine surrogate power at `q`.
    pub fn power_at(&self, q: &Position3D) -> f64 {
        self.value_at_expansion
            + self.gradient[0] * (q.x - self.expansion.x)
            + self.gradient[1] * (q.y - self.expansion.y)
            + self.gradient[2] * (q.z - self.expansion.z)
    }
}

/// One (user, slot) term of the surrogate rate.
#[derive(Debug, Clone, Copy)]
pub struct SurrogateTerm {
    pub coeffs: SurrogateCoefficients,
    /// Desired power over the position-independent direct link (zero when
    /// the literal-paper ablation is on).
    pub direct_power: f64,
    /// Frozen interference-plus-noise.
    pub interference: f64,
}

/// All surrogate terms of one platform: `slots[n]` holds one term per served
/// user.
#[derive(Debug, Clone)]
pub struct PlatformSurrogates {
    pub slots: Vec<Vec<SurrogateTerm>>,
}

/// First-order pieces of `h(d1,d2) = d1^-g1 d2^-g2`.
pub fn taylor_pieces(d1: f64, d2: f64, g1: f64, g2: f64) -> (f64, f64, f64) {
    let h = d1.powf(-g1) * d2.powf(-g2);
    let h_d1 = -g1 * d1.powf(-g1 - 1.0) * d2.powf(-g2);
    let h_d2 = -g2 * d2.powf(-g2 - 1.0) * d1.powf(-g1);
    (h, h_d1, h_d2)
}

/// Cascade constant of each served user for one slot: received cascade power
/// divided by the current distance profile. The channel set must already be
/// rescaled to `platform_pos`.
pub fn extract_cascade_constant(
    tier: RisTier,
    cs: &ChannelSet,
    p: &PrecoderSet,
    phases: &CVec,
    scenario: &Scenario,
    platform_pos: &Position3D,
) -> Vec<f64> {
    let cfg = &scenario.config;
    match tier {
        RisTier::Uav => {
            let d1 = scenario.tbs_pos.distance_to(platform_pos);
            scenario
                .tbs_user_pos
                .iter()
                .enumerate()
                .map(|(k, user)| {
                    let row = cascade_row(&cs.uav_to_user[k], &cs.tbs_to_uav, phases);
                    let power = row.dot(&p.tbs[k]).norm_sqr();
                    let d2 = platform_pos.distance_to(user);
                    let profile =
                        d1.powf(-cfg.alpha_tbs_uav) * d2.powf(-cfg.alpha_uav_user);
                    if power == 0.0 {
                        0.0
                    } else {
                        power / profile
                    }
                })
                .collect()
        }
        RisTier::Hap => {
            let d1 = scenario.sat_pos.distance_to(platform_pos);
            scenario
                .sat_user_pos
                .iter()
                .enumerate()
                .map(|(l, user)| {
                    let row = cascade_row(&cs.hap_to_user[l], &cs.sat_to_hap, phases);
                    let power = row.dot(&p.sat[l]).norm_sqr();
                    let d2 = platform_pos.distance_to(user);
                    let profile = d1.powi(-2) * d2.powi(-2);
                    if power == 0.0 {
                        0.0
                    } else {
                        power / profile
                    }
                })
                .collect()
        }
    }
}

/// Builds the affine power surrogate for one link around `expansion`.
///
/// `station` and `user` anchor the two hops; the expansion must coincide
/// with neither.
pub fn build_surrogate(
    cascade_constant: f64,
    station: &Position3D,
    user: &Position3D,
    expansion: &Position3D,
    g1: f64,
    g2: f64,
) -> Result<SurrogateCoefficients> {
    let geo1 = crate::scenario::geometry(station, expansion)?;
    let geo2 = crate::scenario::geometry(user, expansion)?;
    let (d1, d2) = (geo1.distance, geo2.distance);
    let (h, h_d1, h_d2) = taylor_pieces(d1, d2, g1, g2);
    let u1 = [
        (expansion.x - station.x) / d1,
        (expansion.y - station.y) / d1,
        (expansion.z - station.z) / d1,
    ];
    let u2 = [
        (expansion.x - user.x) / d2,
        (expansion.y - user.y) / d2,
        (expansion.z - user.z) / d2,
    ];
    let gradient = [
        cascade_constant * (h_d1 * u1[0] + h_d2 * u2[0]),
        cascade_constant * (h_d1 * u1[1] + h_d2 * u2[1]),
        cascade_constant * (h_d1 * u1[2] + h_d2 * u2[2]),
    ];
    Ok(SurrogateCoefficients {
        cascade_constant,
        value_at_expansion: cascade_constant * h,
        gradient,
        expansion: *expansion,
    })
}

/// Surrogate frame rate and its gradient with respect to every slot position
/// (zero at the fixed endpoints).
pub fn surrogate_objective(
    ps: &PlatformSurrogates,
    traj: &[Position3D],
) -> (f64, Vec<[f64; 3]>) {
    let n = traj.len();
    let mut value = 0.0;
    let mut grad = vec![[0.0; 3]; n];
    for (slot, terms) in ps.slots.iter().enumerate() {
        for t in terms {
            let p_hat = t.coeffs.power_at(&traj[slot]).max(0.0);
            let num = t.direct_power + p_hat;
            value += (1.0 + num / t.interference).log2();
            if slot > 0 && slot + 1 < n && t.coeffs.power_at(&traj[slot]) > 0.0 {
                let scale = 1.0 / (LN2 * (t.interference + num));
                grad[slot][0] += scale * t.coeffs.gradient[0];
                grad[slot][1] += scale * t.coeffs.gradient[1];
                grad[slot][2] += scale * t.coeffs.gradient[2];
            }
        }
    }
    let inv_n = 1.0 / ps.slots.len() as f64;
    for g in &mut grad {
        g[0] *= inv_n;
        g[1] *= inv_n;
        g[2] *= inv_n;
    }
    (value * inv_n, grad)
}

/// Euclidean projection onto the speed/altitude/endpoint constraint set via
/// Dykstra's alternating projections. Returns `false` when the sweep cap is
/// hit before reaching tolerance (reduced precision).
pub fn project_trajectory(points: &mut [Position3D], limits: &PlatformLimits) -> bool {
    let n = points.len();
    if n < 3 {
        return true;
    }
    let cap = limits.speed_max * limits.dt;
    // Correction memories: one 6-vector per consecutive pair, one z-scalar
    // per free point.
    let mut pair_corr = vec![[0.0f64; 6]; n - 1];
    let mut box_corr = vec![0.0f64; n];

    let max_violation = |pts: &[Position3D]| -> f64 {
        let mut v: f64 = 0.0;
        for w in pts.windows(2) {
            v = v.max(w[0].distance_to(&w[1]) - cap);
        }
        for p in pts.iter().take(n - 1).skip(1) {
            v = v.max(limits.alt_min - p.z).max(p.z - limits.alt_max);
        }
        v
    };

    for _ in 0..PROJECTION_MAX_SWEEPS {
        if max_violation(points) <= PROJECTION_TOL {
            return true;
        }
        for i in 0..n - 1 {
            // Re-add the stored correction, project the pair, store the new
            // correction.
            let mut a = [
                points[i].x + pair_corr[i][0],
                points[i].y + pair_corr[i][1],
                points[i].z + pair_corr[i][2],
            ];
            let mut b = [
                points[i + 1].x + pair_corr[i][3],
                points[i + 1].y + pair_corr[i][4],
                points[i + 1].z + pair_corr[i][5],
            ];
            let a_free = i > 0;
            let b_free = i + 1 < n - 1;
            let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2))
                .sqrt();
            if d > cap {
                if a_free && b_free {
                    let mid = [
                        0.5 * (a[0] + b[0]),
                        0.5 * (a[1] + b[1]),
                        0.5 * (a[2] + b[2]),
                    ];
                    let half = 0.5 * cap / d;
                    let (aa, bb) = (a, b);
                    for c in 0..3 {
                        a[c] = mid[c] + (aa[c] - bb[c]) * half;
                        b[c] = mid[c] + (bb[c] - aa[c]) * half;
                    }
                } else if b_free {
                    let s = cap / d;
                    for c in 0..3 {
                        b[c] = a[c] + (b[c] - a[c]) * s;
                    }
                } else if a_free {
                    let s = cap / d;
                    for c in 0..3 {
                        a[c] = b[c] + (a[c] - b[c]) * s;
                    }
                }
                // else: both endpoints fixed; nothing to project.
            }
            pair_corr[i] = [
                points[i].x + pair_corr[i][0] - a[0],
                points[i].y + pair_corr[i][1] - a[1],
                points[i].z + pair_corr[i][2] - a[2],
                points[i + 1].x + pair_corr[i][3] - b[0],
                points[i + 1].y + pair_corr[i][4] - b[1],
                points[i + 1].z + pair_corr[i][5] - b[2],
            ];
            if a_free {
                points[i] = Position3D::new(a[0], a[1], a[2]);
            }
            if b_free {
                points[i + 1] = Position3D::new(b[0], b[1], b[2]);
            }
        }
        for i in 1..n - 1 {
            let z = points[i].z + box_corr[i];
            let clamped = z.clamp(limits.alt_min, limits.alt_max);
            box_corr[i] = z - clamped;
            points[i].z = clamped;
        }
    }
    max_violation(points) <= PROJECTION_TOL
}

/// Projected-gradient run summary.
#[derive(Debug, Clone)]
pub struct AscentReport {
    pub iterations: usize,
    pub objective_history: Vec<f64>,
    pub reduced_precision: bool,
}

/// Maximizes the surrogate objective over the feasible trajectory set with
/// projected gradient ascent and Armijo backtracking. The initial trial step
/// doubles after first-try successes so metric-scale moves are reachable
/// from rate-scale gradients.
pub fn solve_trajectory_subproblem(
    ps: &PlatformSurrogates,
    limits: &PlatformLimits,
    start: &[Position3D],
) -> (Vec<Position3D>, AscentReport) {
    let mut traj = start.to_vec();
    let (mut value, mut grad) = surrogate_objective(ps, &traj);
    let mut history = vec![value];
    let mut reduced_precision = false;
    let mut step = 1.0f64;
    let mut iterations = 0;

    for _ in 0..ASCENT_MAX_ITERS {
        let grad_sq: f64 = grad.iter().map(|g| g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sum();
        if grad_sq == 0.0 {
            break;
        }
        let try_step = |xi: f64, reduced: &mut bool| -> Option<(Vec<Position3D>, f64)> {
            let mut cand: Vec<Position3D> = traj
                .iter()
                .zip(&grad)
                .map(|(p, g)| {
                    Position3D::new(p.x + xi * g[0], p.y + xi * g[1], p.z + xi * g[2])
                })
                .collect();
            if !project_trajectory(&mut cand, limits) {
                // Projection did not reach tolerance; the candidate may be
                // infeasible, so refuse it.
                *reduced = true;
                return None;
            }
            let moved: f64 = traj
                .iter()
                .zip(&cand)
                .zip(&grad)
                .map(|((p, c), g)| {
                    g[0] * (c.x - p.x) + g[1] * (c.y - p.y) + g[2] * (c.z - p.z)
                })
                .sum();
            let (cand_value, _) = surrogate_objective(ps, &cand);
            if moved > 0.0 && cand_value >= value + ASCENT_SUFFICIENT_INCREASE * moved {
                Some((cand, cand_value))
            } else {
                None
            }
        };

        // Cap the trial so raw points stay within a few diameters of the
        // feasible set; beyond that the projection saturates anyway.
        let reach = limits.speed_max * limits.dt * traj.len() as f64;
        let grad_inf = grad
            .iter()
            .map(|g| (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt())
            .fold(0.0, f64::max);
        let step_cap = 20.0 * reach.max(1.0) / grad_inf.max(1e-300);
        step = step.min(step_cap);

        // Backtrack from the carried step; when the first trial already
        // succeeds, forward-track by doubling so metric-scale moves are
        // reachable from rate-scale gradients.
        let mut accepted = None;
        if let Some(first) = try_step(step, &mut reduced_precision) {
            let mut best = first;
            let mut xi = step;
            while xi * 2.0 <= step_cap {
                let xi2 = xi * 2.0;
                match try_step(xi2, &mut reduced_precision) {
                    Some(next) if next.1 > best.1 => {
                        best = next;
                        xi = xi2;
                    }
                    _ => break,
                }
            }
            step = xi;
            accepted = Some(best);
        } else {
            for _ in 0..ASCENT_MAX_HALVINGS {
                step *= 0.5;
                if step < 1e-16 {
                    break;
                }
                if let Some(hit) = try_step(step, &mut reduced_precision) {
                    accepted = Some(hit);
                    break;
                }
            }
        }
        let Some((cand, cand_value)) = accepted else {
            break;
        };
        let gain = cand_value - value;
        let moved = displacement(&traj, &cand);
        traj = cand;
        value = cand_value;
        grad = surrogate_objective(ps, &traj).1;
        history.push(value);
        iterations += 1;
        if gain <= ASCENT_REL_TOL * value.abs().max(1e-12) && moved <= ASCENT_DISPLACEMENT_FLOOR {
            break;
        }
    }

    (
        traj,
        AscentReport {
            iterations,
            objective_history: history,
            reduced_precision,
        },
    )
}

/// SCA loop controls.
#[derive(Debug, Clone, Copy)]
pub struct ScaOptions {
    pub tol_uav: f64,
    pub tol_hap: f64,
    pub max_iters: usize,
    pub surrogate_includes_direct: bool,
}

impl ScaOptions {
    pub fn from_config(cfg: &crate::scenario::SystemConfig) -> Self {
        Self {
            tol_uav: cfg.sca_tol_uav,
            tol_hap: cfg.sca_tol_hap,
            max_iters: cfg.sca_max_iters,
            surrogate_includes_direct: cfg.surrogate_includes_direct,
        }
    }
}

/// SCA run summary. `objective_history` holds the true rescaled-channel
/// average sum-rate at every accepted iterate.
#[derive(Debug, Clone)]
pub struct ScaReport {
    pub iterations: usize,
    pub objective_history: Vec<f64>,
    pub reduced_precision: bool,
}

fn displacement(a: &[Position3D], b: &[Position3D]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.distance_to(q).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Builds both platforms' surrogate terms at the current trajectories.
#[allow(clippy::too_many_arguments)]
fn build_platform_surrogates(
    scenario: &Scenario,
    frame: &[ChannelSet],
    precoders: &[PrecoderSet],
    uav_phases: &[CVec],
    hap_phases: &[CVec],
    uav_traj: &[Position3D],
    hap_traj: &[Position3D],
    include_direct: bool,
) -> Result<(PlatformSurrogates, PlatformSurrogates)> {
    let cfg = &scenario.config;
    let n = frame.len();
    let mut uav_slots = Vec::with_capacity(n);
    let mut hap_slots = Vec::with_capacity(n);
    for slot in 0..n {
        let cs = frame[slot].rescaled(scenario, uav_traj[slot], hap_traj[slot]);
        let eff = crate::channel::compose_effective_channels(
            &cs,
            &uav_phases[slot],
            &hap_phases[slot],
            true,
            cfg.cross_tier_interference,
        )?;
        let (t_tbs, t_sat) =
            crate::metrics::received_totals(&eff, &precoders[slot], cfg.noise_w, cfg.noise_w);

        let c_uav = extract_cascade_constant(
            RisTier::Uav,
            &cs,
            &precoders[slot],
            &uav_phases[slot],
            scenario,
            &uav_traj[slot],
        );
        let mut terms = Vec::with_capacity(cfg.tbs_users);
        for (k, user) in scenario.tbs_user_pos.iter().enumerate() {
            let desired = eff.tbs_user[k].dot(&precoders[slot].tbs[k]).norm_sqr();
            let interference = (t_tbs[k] - desired).max(cfg.noise_w * 1e-6);
            let direct_power = if include_direct {
                cs.tbs_to_user[k].dot(&precoders[slot].tbs[k]).norm_sqr()
            } else {
                0.0
            };
            terms.push(SurrogateTerm {
                coeffs: build_surrogate(
                    c_uav[k],
                    &scenario.tbs_pos,
                    user,
                    &uav_traj[slot],
                    cfg.alpha_tbs_uav,
                    cfg.alpha_uav_user,
                )?,
                direct_power,
                interference,
            });
        }
        uav_slots.push(terms);

        let c_hap = extract_cascade_constant(
            RisTier::Hap,
            &cs,
            &precoders[slot],
            &hap_phases[slot],
            scenario,
            &hap_traj[slot],
        );
        let mut terms = Vec::with_capacity(cfg.sat_users);
        for (l, user) in scenario.sat_user_pos.iter().enumerate() {
            let desired = eff.sat_user[l].dot(&precoders[slot].sat[l]).norm_sqr();
            let interference = (t_sat[l] - desired).max(cfg.noise_w * 1e-6);
            let direct_power = if include_direct {
                cs.sat_to_user[l].dot(&precoders[slot].sat[l]).norm_sqr()
            } else {
                0.0
            };
            terms.push(SurrogateTerm {
                coeffs: build_surrogate(
                    c_hap[l],
                    &scenario.sat_pos,
                    user,
                    &hap_traj[slot],
                    2.0,
                    2.0,
                )?,
                direct_power,
                interference,
            });
        }
        hap_slots.push(terms);
    }
    Ok((
        PlatformSurrogates { slots: uav_slots },
        PlatformSurrogates { slots: hap_slots },
    ))
}

/// Alternating surrogate construction and convex maximization for both
/// platforms, with the true-objective acceptance safeguard.
#[allow(clippy::too_many_arguments)]
pub fn sca_optimize(
    scenario: &Scenario,
    frame: &[ChannelSet],
    precoders: &[PrecoderSet],
    uav_phases: &[CVec],
    hap_phases: &[CVec],
    uav_init: &Trajectory,
    hap_init: &Trajectory,
    opts: &ScaOptions,
) -> Result<(Trajectory, Trajectory, ScaReport)> {
    let cfg = &scenario.config;
    let uav_limits = PlatformLimits::uav(cfg);
    let hap_limits = PlatformLimits::hap(cfg);
    let mut uav = uav_init.points.clone();
    let mut hap = hap_init.points.clone();
    let true_rate = |u: &[Position3D], h: &[Position3D]| -> Result<f64> {
        Ok(evaluate_frame(
            scenario, frame, precoders, uav_phases, hap_phases, u, h, true,
        )?
        .average)
    };
    let mut current = true_rate(&uav, &hap)?;
    let mut history = vec![current];
    let mut reduced_precision = false;
    let mut iterations = 0;

    for _ in 0..opts.max_iters {
        let (ps_uav, ps_hap) = build_platform_surrogates(
            scenario,
            frame,
            precoders,
            uav_phases,
            hap_phases,
            &uav,
            &hap,
            opts.surrogate_includes_direct,
        )?;
        let (mut cand_uav, rep_u) = solve_trajectory_subproblem(&ps_uav, &uav_limits, &uav);
        let (mut cand_hap, rep_h) = solve_trajectory_subproblem(&ps_hap, &hap_limits, &hap);
        reduced_precision |= rep_u.reduced_precision || rep_h.reduced_precision;

        // Safeguarded acceptance on the true objective.
        let mut cand_rate = true_rate(&cand_uav, &cand_hap)?;
        let mut attempts = 0;
        while cand_rate < current - 1e-12 && attempts < DAMPING_ATTEMPTS {
            for (c, p) in cand_uav.iter_mut().zip(&uav) {
                *c = Position3D::new(0.5 * (c.x + p.x), 0.5 * (c.y + p.y), 0.5 * (c.z + p.z));
            }
            for (c, p) in cand_hap.iter_mut().zip(&hap) {
                *c = Position3D::new(0.5 * (c.x + p.x), 0.5 * (c.y + p.y), 0.5 * (c.z + p.z));
            }
            cand_rate = true_rate(&cand_uav, &cand_hap)?;
            attempts += 1;
        }
        if cand_rate < current - 1e-12 {
            break; // no acceptable step from this expansion
        }
        let moved_uav = displacement(&uav, &cand_uav);
        let moved_hap = displacement(&hap, &cand_hap);
        uav = cand_uav;
        hap = cand_hap;
        current = cand_rate;
        history.push(current);
        iterations += 1;
        if moved_uav <= opts.tol_uav && moved_hap <= opts.tol_hap {
            break;
        }
    }

    let uav_traj = Trajectory { points: uav };
    let hap_traj = Trajectory { points: hap };
    if uav_traj.max_violation(
        uav_limits.speed_max,
        uav_limits.dt,
        uav_limits.alt_min,
        uav_limits.alt_max,
    ) > 1e-6
        || hap_traj.max_violation(
            hap_limits.speed_max,
            hap_limits.dt,
            hap_limits.alt_min,
            hap_limits.alt_max,
        ) > 1e-6
    {
        return Err(SimError::NumericalBreakdown(
            "trajectory left the feasible set".into(),
        ));
    }
    Ok((
        uav_traj,
        hap_traj,
        ScaReport {
            iterations,
            objective_history: history,
            reduced_precision,
        },
    ))
}
