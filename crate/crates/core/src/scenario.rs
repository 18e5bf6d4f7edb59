//! Geometric scenario: node placement, user regions, initial trajectories.
//!
//! Everything downstream (channel synthesis, the subsolvers, the benchmark
//! schemes) consumes the immutable [`Scenario`] built here. Construction is
//! bit-reproducible for a fixed `(config, seed)` pair.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::rng::{stream_rng, Stream};

/// Fraction of the maximum reachable path length used when auto-sizing the
/// initial straight-line paths. Leaves slack so the SCA solver starts strictly
/// inside the speed constraints.
const AUTO_PATH_FRACTION: f64 = 0.8;

/// A point in the 3D Cartesian frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn ground(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    pub fn distance_to(&self, other: &Position3D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn horizontal_distance_to(&self, other: &Position3D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Distance plus the azimuth/elevation of the ray `from -> to`.
///
/// Azimuth is measured from the +x axis in the xy-plane, elevation from the
/// horizontal plane; the same convention feeds every steering-vector
/// evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub distance: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

/// Euclidean distance and angles of the ray between two distinct points.
pub fn geometry(from: &Position3D, to: &Position3D) -> Result<Geometry> {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    let dz = to.z - from.z;
    let horiz = (dx * dx + dy * dy).sqrt();
    let distance = (horiz * horiz + dz * dz).sqrt();
    if distance == 0.0 {
        return Err(SimError::DegenerateGeometry(format!(
            "coincident points ({}, {}, {})",
            from.x, from.y, from.z
        )));
    }
    Ok(Geometry {
        distance,
        azimuth: dy.atan2(dx),
        elevation: dz.atan2(horiz),
    })
}

/// Axis-aligned ground rectangle, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn contains(&self, p: &Position3D) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

/// All scenario, antenna, power, mobility, and solver parameters.
///
/// Values are stored in linear units (watts, linear gains); the config loader
/// performs the dBm/dBi conversions. `Default` reproduces the baseline
/// simulation parameter table.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    // Antennas and RIS panels (UPA factorizations).
    pub tbs_antennas: usize,
    pub sat_antennas_x: usize,
    pub sat_antennas_y: usize,
    pub uav_ris_x: usize,
    pub uav_ris_y: usize,
    pub hap_ris_x: usize,
    pub hap_ris_y: usize,
    /// Element spacing over wavelength (d/lambda), shared by all arrays.
    pub element_spacing_ratio: f64,

    // Users.
    pub tbs_users: usize,
    pub sat_users: usize,

    // Carriers.
    pub tbs_carrier_hz: f64,
    pub sat_carrier_hz: f64,

    // Power budgets and noise, watts.
    pub tbs_power_w: f64,
    pub sat_power_w: f64,
    pub noise_w: f64,

    // Frame.
    pub slots: usize,
    pub slot_duration_s: f64,

    // Mobility.
    pub uav_speed_max: f64,
    pub hap_speed_max: f64,
    pub uav_alt_min: f64,
    pub uav_alt_max: f64,
    pub hap_alt_min: f64,
    pub hap_alt_max: f64,
    pub uav_init_altitude: f64,
    pub hap_init_altitude: f64,
    /// Horizontal offset of the UAV start point from the TBS.
    pub uav_start_offset: (f64, f64),
    /// Explicit initial UAV path length; `None` auto-sizes toward the user
    /// region centroid within the speed budget.
    pub uav_path_length: Option<f64>,
    /// Initial HAP displacement length (clamped to the speed budget).
    pub hap_displacement: f64,

    // Rician factors, linear.
    pub kappa_tbs_user: f64,
    pub kappa_tbs_uav: f64,
    pub kappa_uav_user: f64,
    pub kappa_sat_user: f64,
    pub kappa_sat_hap: f64,
    pub kappa_hap_user: f64,

    // Large-scale model.
    pub alpha_tbs_user: f64,
    pub alpha_tbs_uav: f64,
    pub alpha_uav_user: f64,
    /// Path-loss exponent of the TBS -> SAT-user cross link.
    pub alpha_tbs_sat_user: f64,
    /// Reference channel gain at 1 m, linear.
    pub beta_o: f64,
    pub gain_sat: f64,
    pub gain_hap: f64,
    pub gain_user: f64,
    /// Rain attenuation log-parameters: A_dB = exp(N(mu, sigma^2)),
    /// r = 10^(-A_dB/10).
    pub rain_mu: f64,
    pub rain_sigma_sq: f64,
    pub cross_tier_interference: bool,

    // Fixed node positions.
    pub tbs_pos: Position3D,
    pub sat_pos: Position3D,
    pub tbs_user_region: Rect,
    pub sat_user_region: Rect,

    // Solver controls.
    pub wmmse_tol: f64,
    pub wmmse_max_iters: usize,
    /// Include cross-tier terms in the precoder normal matrices.
    pub coordinated: bool,
    pub rcg_tol: f64,
    pub rcg_max_iters: usize,
    pub refresh_aux_between_tiers: bool,
    pub sca_tol_uav: f64,
    pub sca_tol_hap: f64,
    pub sca_max_iters: usize,
    pub surrogate_includes_direct: bool,
    pub bcd_tol: f64,
    pub bcd_max_iters: usize,
}

pub(crate) fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub(crate) fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            tbs_antennas: 8,
            sat_antennas_x: 8,
            sat_antennas_y: 4,
            uav_ris_x: 4,
            uav_ris_y: 4,
            hap_ris_x: 6,
            hap_ris_y: 6,
            element_spacing_ratio: 0.5,
            tbs_users: 3,
            sat_users: 4,
            tbs_carrier_hz: 3.5e9,
            sat_carrier_hz: 20.0e9,
            tbs_power_w: dbm_to_watts(44.77),
            sat_power_w: dbm_to_watts(54.8),
            noise_w: dbm_to_watts(-90.0),
            slots: 60,
            slot_duration_s: 1.0,
            uav_speed_max: 30.0,
            hap_speed_max: 5.0,
            uav_alt_min: 80.0,
            uav_alt_max: 250.0,
            hap_alt_min: 17_000.0,
            hap_alt_max: 25_000.0,
            uav_init_altitude: 165.0,
            hap_init_altitude: 21_000.0,
            uav_start_offset: (30.0, 30.0),
            uav_path_length: None,
            hap_displacement: 200.0,
            kappa_tbs_user: 5.0,
            kappa_tbs_uav: 8.0,
            kappa_uav_user: 5.0,
            kappa_sat_user: 3.0,
            kappa_sat_hap: 6.0,
            kappa_hap_user: 3.0,
            alpha_tbs_user: 3.5,
            alpha_tbs_uav: 2.2,
            alpha_uav_user: 2.2,
            alpha_tbs_sat_user: 3.5,
            beta_o: db_to_linear(-20.0),
            gain_sat: db_to_linear(30.0),
            gain_hap: db_to_linear(14.0),
            gain_user: db_to_linear(0.0),
            rain_mu: -2.6,
            rain_sigma_sq: 1.63,
            cross_tier_interference: true,
            tbs_pos: Position3D::new(0.0, 0.0, 0.0),
            sat_pos: Position3D::new(600.0, 800.0, 600_000.0),
            tbs_user_region: Rect {
                x_min: 150.0,
                x_max: 400.0,
                y_min: 130.0,
                y_max: 400.0,
            },
            sat_user_region: Rect {
                x_min: 1100.0,
                x_max: 1400.0,
                y_min: 600.0,
                y_max: 900.0,
            },
            wmmse_tol: 1e-4,
            wmmse_max_iters: 100,
            coordinated: true,
            rcg_tol: 1e-6,
            rcg_max_iters: 200,
            refresh_aux_between_tiers: false,
            sca_tol_uav: 1e-2,
            sca_tol_hap: 1e-1,
            sca_max_iters: 30,
            surrogate_includes_direct: true,
            bcd_tol: 1e-3,
            bcd_max_iters: 20,
        }
    }
}

impl SystemConfig {
    pub fn sat_antennas(&self) -> usize {
        self.sat_antennas_x * self.sat_antennas_y
    }

    pub fn uav_ris_elements(&self) -> usize {
        self.uav_ris_x * self.uav_ris_y
    }

    pub fn hap_ris_elements(&self) -> usize {
        self.hap_ris_x * self.hap_ris_y
    }

    pub fn tbs_wavelength(&self) -> f64 {
        crate::channel::SPEED_OF_LIGHT / self.tbs_carrier_hz
    }

    pub fn sat_wavelength(&self) -> f64 {
        crate::channel::SPEED_OF_LIGHT / self.sat_carrier_hz
    }

    /// Checks every structural invariant, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        fn positive_count(key: &str, v: usize) -> Result<()> {
            if v == 0 {
                Err(SimError::invalid(key, "must be >= 1"))
            } else {
                Ok(())
            }
        }
        fn positive(key: &str, v: f64) -> Result<()> {
            if !(v > 0.0) || !v.is_finite() {
                Err(SimError::invalid(key, format!("must be > 0, got {v}")))
            } else {
                Ok(())
            }
        }
        fn non_negative(key: &str, v: f64) -> Result<()> {
            if !(v >= 0.0) || !v.is_finite() {
                Err(SimError::invalid(key, format!("must be >= 0, got {v}")))
            } else {
                Ok(())
            }
        }

        positive_count("tbs_antennas", self.tbs_antennas)?;
        positive_count("sat_antennas_x", self.sat_antennas_x)?;
        positive_count("sat_antennas_y", self.sat_antennas_y)?;
        positive_count("uav_ris_x", self.uav_ris_x)?;
        positive_count("uav_ris_y", self.uav_ris_y)?;
        positive_count("hap_ris_x", self.hap_ris_x)?;
        positive_count("hap_ris_y", self.hap_ris_y)?;
        positive_count("tbs_users", self.tbs_users)?;
        positive_count("sat_users", self.sat_users)?;
        positive("element_spacing_ratio", self.element_spacing_ratio)?;
        positive("tbs_carrier_hz", self.tbs_carrier_hz)?;
        positive("sat_carrier_hz", self.sat_carrier_hz)?;
        positive("tbs_power_w", self.tbs_power_w)?;
        positive("sat_power_w", self.sat_power_w)?;
        positive("noise_w", self.noise_w)?;
        if self.slots < 2 {
            return Err(SimError::invalid("slots", "must be >= 2"));
        }
        positive("slot_duration_s", self.slot_duration_s)?;
        positive("uav_speed_max", self.uav_speed_max)?;
        positive("hap_speed_max", self.hap_speed_max)?;
        if self.uav_alt_min > self.uav_alt_max {
            return Err(SimError::invalid(
                "uav_alt_min",
                "altitude bounds must satisfy min <= max",
            ));
        }
        if self.hap_alt_min > self.hap_alt_max {
            return Err(SimError::invalid(
                "hap_alt_min",
                "altitude bounds must satisfy min <= max",
            ));
        }
        if self.uav_init_altitude < self.uav_alt_min || self.uav_init_altitude > self.uav_alt_max {
            return Err(SimError::invalid(
                "uav_init_altitude",
                "must lie within the UAV altitude bounds",
            ));
        }
        if self.hap_init_altitude < self.hap_alt_min || self.hap_init_altitude > self.hap_alt_max {
            return Err(SimError::invalid(
                "hap_init_altitude",
                "must lie within the HAP altitude bounds",
            ));
        }
        positive("hap_displacement", self.hap_displacement)?;
        for (key, v) in [
            ("kappa_tbs_user", self.kappa_tbs_user),
            ("kappa_tbs_uav", self.kappa_tbs_uav),
            ("kappa_uav_user", self.kappa_uav_user),
            ("kappa_sat_user", self.kappa_sat_user),
            ("kappa_sat_hap", self.kappa_sat_hap),
            ("kappa_hap_user", self.kappa_hap_user),
        ] {
            positive(key, v)?;
        }
        for (key, v) in [
            ("alpha_tbs_user", self.alpha_tbs_user),
            ("alpha_tbs_uav", self.alpha_tbs_uav),
            ("alpha_uav_user", self.alpha_uav_user),
            ("alpha_tbs_sat_user", self.alpha_tbs_sat_user),
        ] {
            positive(key, v)?;
        }
        positive("beta_o", self.beta_o)?;
        positive("gain_sat", self.gain_sat)?;
        positive("gain_hap", self.gain_hap)?;
        positive("gain_user", self.gain_user)?;
        non_negative("rain_sigma_sq", self.rain_sigma_sq)?;
        if !self.rain_mu.is_finite() {
            return Err(SimError::invalid("rain_mu", "must be finite"));
        }
        if self.tbs_user_region.x_min > self.tbs_user_region.x_max
            || self.tbs_user_region.y_min > self.tbs_user_region.y_max
        {
            return Err(SimError::invalid("tbs_user_region", "empty rectangle"));
        }
        if self.sat_user_region.x_min > self.sat_user_region.x_max
            || self.sat_user_region.y_min > self.sat_user_region.y_max
        {
            return Err(SimError::invalid("sat_user_region", "empty rectangle"));
        }
        // Tolerances may be +inf (a single-pass loop is legitimate).
        for (key, v) in [
            ("wmmse_tol", self.wmmse_tol),
            ("rcg_tol", self.rcg_tol),
            ("sca_tol_uav", self.sca_tol_uav),
            ("sca_tol_hap", self.sca_tol_hap),
            ("bcd_tol", self.bcd_tol),
        ] {
            if !(v > 0.0) {
                return Err(SimError::invalid(key, format!("must be > 0, got {v}")));
            }
        }
        positive_count("wmmse_max_iters", self.wmmse_max_iters)?;
        positive_count("rcg_max_iters", self.rcg_max_iters)?;
        positive_count("sca_max_iters", self.sca_max_iters)?;
        positive_count("bcd_max_iters", self.bcd_max_iters)?;
        Ok(())
    }
}

/// A per-slot position sequence for one aerial platform.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<Position3D>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest per-slot displacement.
    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].distance_to(&w[1]))
            .fold(0.0, f64::max)
    }

    /// Worst violation of speed/altitude constraints (0 when feasible).
    pub fn max_violation(&self, speed_max: f64, dt: f64, alt_min: f64, alt_max: f64) -> f64 {
        let mut v: f64 = 0.0;
        for w in self.points.windows(2) {
            v = v.max(w[0].distance_to(&w[1]) - speed_max * dt);
        }
        for p in &self.points {
            v = v.max(alt_min - p.z).max(p.z - alt_max);
        }
        v
    }
}

/// Immutable scenario: node placements, users, initial trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SystemConfig,
    pub tbs_pos: Position3D,
    pub sat_pos: Position3D,
    pub tbs_user_pos: Vec<Position3D>,
    pub sat_user_pos: Vec<Position3D>,
    pub uav_init_traj: Trajectory,
    pub hap_init_traj: Trajectory,
}

fn draw_users(rng: &mut ChaCha12Rng, region: &Rect, count: usize) -> Vec<Position3D> {
    (0..count)
        .map(|_| {
            let x = rng.gen_range(region.x_min..=region.x_max);
            let y = rng.gen_range(region.y_min..=region.y_max);
            Position3D::ground(x, y)
        })
        .collect()
}

fn straight_line(start: Position3D, end: Position3D, n: usize) -> Trajectory {
    let points = (0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            Position3D::new(
                start.x + t * (end.x - start.x),
                start.y + t * (end.y - start.y),
                start.z + t * (end.z - start.z),
            )
        })
        .collect();
    Trajectory { points }
}

/// Builds the scenario for one realization. Deterministic for fixed
/// `(config, seed)`.
pub fn build_scenario(config: &SystemConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let mut rng = stream_rng(seed, Stream::Scenario);

    let tbs_users = draw_users(&mut rng, &config.tbs_user_region, config.tbs_users);
    let sat_users = draw_users(&mut rng, &config.sat_user_region, config.sat_users);

    let n = config.slots;
    let reach_uav = config.uav_speed_max * config.slot_duration_s * (n - 1) as f64;

    // UAV: straight line at the initial altitude from near the TBS toward the
    // TBS-user region centroid.
    let (cx, cy) = config.tbs_user_region.center();
    let start = Position3D::new(
        config.tbs_pos.x + config.uav_start_offset.0,
        config.tbs_pos.y + config.uav_start_offset.1,
        config.uav_init_altitude,
    );
    let to_centroid = ((cx - start.x).powi(2) + (cy - start.y).powi(2)).sqrt();
    let length = match config.uav_path_length {
        Some(len) => {
            if len > reach_uav {
                return Err(SimError::InfeasibleInitialization(format!(
                    "uav_path_length {len} m exceeds reachable {reach_uav} m \
                     (V_max * delta * (N-1))"
                )));
            }
            len
        }
        None => to_centroid.min(AUTO_PATH_FRACTION * reach_uav),
    };
    let (dir_x, dir_y) = if to_centroid > 0.0 {
        ((cx - start.x) / to_centroid, (cy - start.y) / to_centroid)
    } else {
        (1.0, 0.0)
    };
    let uav_end = Position3D::new(
        start.x + dir_x * length,
        start.y + dir_y * length,
        config.uav_init_altitude,
    );
    let uav_traj = straight_line(start, uav_end, n);

    // HAP: short horizontal displacement centered on the SAT-user region
    // centroid, clamped to its speed budget.
    let reach_hap = config.hap_speed_max * config.slot_duration_s * (n - 1) as f64;
    let hap_len = config.hap_displacement.min(AUTO_PATH_FRACTION * reach_hap);
    let (hx, hy) = config.sat_user_region.center();
    let hap_start = Position3D::new(hx - 0.5 * hap_len, hy, config.hap_init_altitude);
    let hap_end = Position3D::new(hx + 0.5 * hap_len, hy, config.hap_init_altitude);
    let hap_traj = straight_line(hap_start, hap_end, n);

    let uav_step = uav_traj.max_step();
    let uav_cap = config.uav_speed_max * config.slot_duration_s;
    if uav_step > uav_cap {
        return Err(SimError::InfeasibleInitialization(format!(
            "initial UAV step {uav_step} m exceeds V_U_max*delta = {uav_cap} m"
        )));
    }

    Ok(Scenario {
        config: config.clone(),
        tbs_pos: config.tbs_pos,
        sat_pos: config.sat_pos,
        tbs_user_pos: tbs_users,
        sat_user_pos: sat_users,
        uav_init_traj: uav_traj,
        hap_init_traj: hap_traj,
    })
}
