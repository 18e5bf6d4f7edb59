//! Config file format: TOML with one section per subsystem.
//!
//! Every key is optional; missing keys take the baseline simulation defaults
//! (the same values `SystemConfig::default()` carries). Powers and gains are
//! configured in dBm/dB/dBi and converted to linear units on load. Unknown
//! keys are rejected with the offending path in the message.
//!
//! `resolved_toml` renders the fully-populated config (original units), so a
//! dumped `config_resolved.txt` re-ingests to the identical run.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::bcd::SchemeId;
use crate::error::{Result, SimError};
use crate::scenario::{dbm_to_watts, Position3D, Rect, SystemConfig};

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub tbs_antennas: usize,
    /// SAT planar array factorization [x, y].
    pub sat_antennas: [usize; 2],
    pub uav_ris: [usize; 2],
    pub hap_ris: [usize; 2],
    pub tbs_users: usize,
    pub sat_users: usize,
    pub slots: usize,
    pub slot_duration_s: f64,
    pub tbs_pos: [f64; 3],
    pub sat_pos: [f64; 3],
    /// [x_min, x_max, y_min, y_max], meters.
    pub tbs_user_region: [f64; 4],
    pub sat_user_region: [f64; 4],
    pub uav_speed_max: f64,
    pub hap_speed_max: f64,
    pub uav_altitude: [f64; 2],
    pub hap_altitude: [f64; 2],
    pub uav_init_altitude: f64,
    pub hap_init_altitude: f64,
    pub uav_start_offset: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uav_path_length: Option<f64>,
    pub hap_displacement: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let c = SystemConfig::default();
        Self {
            tbs_antennas: c.tbs_antennas,
            sat_antennas: [c.sat_antennas_x, c.sat_antennas_y],
            uav_ris: [c.uav_ris_x, c.uav_ris_y],
            hap_ris: [c.hap_ris_x, c.hap_ris_y],
            tbs_users: c.tbs_users,
            sat_users: c.sat_users,
            slots: c.slots,
            slot_duration_s: c.slot_duration_s,
            tbs_pos: [c.tbs_pos.x, c.tbs_pos.y, c.tbs_pos.z],
            sat_pos: [c.sat_pos.x, c.sat_pos.y, c.sat_pos.z],
            tbs_user_region: [
                c.tbs_user_region.x_min,
                c.tbs_user_region.x_max,
                c.tbs_user_region.y_min,
                c.tbs_user_region.y_max,
            ],
            sat_user_region: [
                c.sat_user_region.x_min,
                c.sat_user_region.x_max,
                c.sat_user_region.y_min,
                c.sat_user_region.y_max,
            ],
            uav_speed_max: c.uav_speed_max,
            hap_speed_max: c.hap_speed_max,
            uav_altitude: [c.uav_alt_min, c.uav_alt_max],
            hap_altitude: [c.hap_alt_min, c.hap_alt_max],
            uav_init_altitude: c.uav_init_altitude,
            hap_init_altitude: c.hap_init_altitude,
            uav_start_offset: [c.uav_start_offset.0, c.uav_start_offset.1],
            uav_path_length: None,
            hap_displacement: c.hap_displacement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub tbs_carrier_ghz: f64,
    pub sat_carrier_ghz: f64,
    pub element_spacing_ratio: f64,
    pub kappa_tbs_user: f64,
    pub kappa_tbs_uav: f64,
    pub kappa_uav_user: f64,
    pub kappa_sat_user: f64,
    pub kappa_sat_hap: f64,
    pub kappa_hap_user: f64,
    pub alpha_tbs_user: f64,
    pub alpha_tbs_uav: f64,
    pub alpha_uav_user: f64,
    pub alpha_tbs_sat_user: f64,
    /// Reference channel gain at 1 m, dB.
    pub beta_o_db: f64,
    pub gain_sat_dbi: f64,
    pub gain_hap_dbi: f64,
    pub gain_user_dbi: f64,
    pub rain_mu: f64,
    pub rain_sigma_sq: f64,
    pub cross_tier_interference: bool,
}

impl Default for ChannelSection {
    fn default() -> Self {
        let c = SystemConfig::default();
        Self {
            tbs_carrier_ghz: c.tbs_carrier_hz / 1e9,
            sat_carrier_ghz: c.sat_carrier_hz / 1e9,
            element_spacing_ratio: c.element_spacing_ratio,
            kappa_tbs_user: c.kappa_tbs_user,
            kappa_tbs_uav: c.kappa_tbs_uav,
            kappa_uav_user: c.kappa_uav_user,
            kappa_sat_user: c.kappa_sat_user,
            kappa_sat_hap: c.kappa_sat_hap,
            kappa_hap_user: c.kappa_hap_user,
            alpha_tbs_user: c.alpha_tbs_user,
            alpha_tbs_uav: c.alpha_tbs_uav,
            alpha_uav_user: c.alpha_uav_user,
            alpha_tbs_sat_user: c.alpha_tbs_sat_user,
            beta_o_db: 10.0 * c.beta_o.log10(),
            gain_sat_dbi: 10.0 * c.gain_sat.log10(),
            gain_hap_dbi: 10.0 * c.gain_hap.log10(),
            gain_user_dbi: 10.0 * c.gain_user.log10(),
            rain_mu: c.rain_mu,
            rain_sigma_sq: c.rain_sigma_sq,
            cross_tier_interference: c.cross_tier_interference,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerSection {
    pub tbs_dbm: f64,
    pub sat_dbm: f64,
    pub noise_dbm: f64,
}

impl Default for PowerSection {
    fn default() -> Self {
        Self {
            tbs_dbm: 44.77,
            sat_dbm: 54.8,
            noise_dbm: -90.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WmmseSection {
    pub tol: f64,
    pub max_iters: usize,
    pub coordinated: bool,
}

impl Default for WmmseSection {
    fn default() -> Self {
        let c = SystemConfig::default();
        Self {
            tol: c.wmmse_tol,
            max_iters: c.wmmse_max_iters,
            coordinated: c.coordinated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RisSection {
    pub tol: f64,
    pub max_iters: usize,
    pub refresh_aux_between_tiers: bool,
}

impl Default for RisSection {
    fn default() -> Self {
        let c = SystemConfig::default();
        Self {
            tol: c.rcg_tol,
            max_iters: c.rcg_max_iters,
            refresh_aux_between_tiers: c.refresh_aux_between_tiers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectorySection {
    pub tol_uav: f64,
    pub tol_hap: f64,
    pub max_iters: usize,
    pub surrogate_includes_direct: bool,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        let c = SystemConfig::default();
        Self {
            tol_uav: c.sca_tol_uav,
            tol_hap: c.sca_tol_hap,
            max_iters: c.sca_max_iters,
            surrogate_includes_direct: c.surrogate_includes_direct,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BcdSection {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for BcdSection {
    fn default() -> Self {
        let c = SystemConfig::default();
        Self {
            tol: c.bcd_tol,
            max_iters: c.bcd_max_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub name: String,
    /// Empty means the experiment's default scheme list.
    pub schemes: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    /// Numeric sweep values; interpretation depends on the experiment.
    /// Empty means the experiment's default sweep.
    pub sweep: Vec<f64>,
    /// (K, L) pairs for the user-scaling experiment.
    pub user_pairs: Vec<[usize; 2]>,
    /// (N_U, N_H) totals for the RIS-size sweep (perfect squares).
    pub ris_pairs: Vec<[usize; 2]>,
    pub out_dir: String,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            name: "convergence".into(),
            schemes: vec![],
            trials: 50,
            seed: 1,
            sweep: vec![],
            user_pairs: vec![],
            ris_pairs: vec![],
            out_dir: "results".into(),
        }
    }
}

/// Whole config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    pub scenario: ScenarioSection,
    pub channel: ChannelSection,
    pub power: PowerSection,
    pub wmmse: WmmseSection,
    pub ris: RisSection,
    pub trajectory: TrajectorySection,
    pub bcd: BcdSection,
    pub experiment: ExperimentSection,
}

/// The experiment presets, one per headline figure family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Convergence,
    TierConvergence,
    UserScaling,
    PbSweep,
    PsSweep,
    RisSizeSweep,
    TrajectoryDump,
    AltitudeProfiles,
    FlightPeriodSweep,
    NoiseSweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::Convergence,
        ExperimentKind::TierConvergence,
        ExperimentKind::UserScaling,
        ExperimentKind::PbSweep,
        ExperimentKind::PsSweep,
        ExperimentKind::RisSizeSweep,
        ExperimentKind::TrajectoryDump,
        ExperimentKind::AltitudeProfiles,
        ExperimentKind::FlightPeriodSweep,
        ExperimentKind::NoiseSweep,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::TierConvergence => "tier_convergence",
            ExperimentKind::UserScaling => "user_scaling",
            ExperimentKind::PbSweep => "pb_sweep",
            ExperimentKind::PsSweep => "ps_sweep",
            ExperimentKind::RisSizeSweep => "ris_size_sweep",
            ExperimentKind::TrajectoryDump => "trajectory_dump",
            ExperimentKind::AltitudeProfiles => "altitude_profiles",
            ExperimentKind::FlightPeriodSweep => "flight_period_sweep",
            ExperimentKind::NoiseSweep => "noise_sweep",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "average sum-rate vs outer iteration, all schemes",
            ExperimentKind::TierConvergence => "TBS and SAT tier sum-rates vs outer iteration",
            ExperimentKind::UserScaling => "convergence for different (K, L) user counts",
            ExperimentKind::PbSweep => "average sum-rate vs TBS transmit power",
            ExperimentKind::PsSweep => "average sum-rate vs SAT transmit power",
            ExperimentKind::RisSizeSweep => "average sum-rate vs (N_U, N_H) panel sizes",
            ExperimentKind::TrajectoryDump => "initial and optimized 3D platform paths",
            ExperimentKind::AltitudeProfiles => "altitude vs slot for both platforms",
            ExperimentKind::FlightPeriodSweep => "average sum-rate vs flight period",
            ExperimentKind::NoiseSweep => "average sum-rate vs noise power, tier ablations",
        }
    }

    pub fn parse(s: &str) -> Result<ExperimentKind> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                SimError::invalid("experiment.name", format!("unknown experiment `{s}`"))
            })
    }

    /// Scheme list used when the config leaves `schemes` empty.
    pub fn default_schemes(&self) -> Vec<SchemeId> {
        match self {
            ExperimentKind::Convergence => vec![
                SchemeId::Proposed,
                SchemeId::RandomRis,
                SchemeId::NoRis,
                SchemeId::FixedTrajectory,
            ],
            ExperimentKind::NoiseSweep => {
                vec![SchemeId::Proposed, SchemeId::TbsOnly, SchemeId::SatOnly]
            }
            ExperimentKind::TrajectoryDump | ExperimentKind::AltitudeProfiles => {
                vec![SchemeId::Proposed]
            }
            _ => vec![SchemeId::Proposed, SchemeId::RandomRis, SchemeId::NoRis],
        }
    }

    /// Numeric sweep used when the config leaves `sweep` empty.
    pub fn default_sweep(&self) -> Vec<f64> {
        match self {
            ExperimentKind::PbSweep => vec![40.0, 42.0, 44.0, 46.0, 47.0],
            ExperimentKind::PsSweep => vec![50.0, 52.0, 54.0, 56.0, 57.0],
            ExperimentKind::FlightPeriodSweep => vec![20.0, 40.0, 60.0, 80.0],
            ExperimentKind::NoiseSweep => vec![-110.0, -100.0, -90.0, -80.0, -70.0],
            _ => vec![],
        }
    }
}

/// Resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub schemes: Vec<SchemeId>,
    pub trials: usize,
    pub seed: u64,
    pub sweep: Vec<f64>,
    pub user_pairs: Vec<(usize, usize)>,
    pub ris_pairs: Vec<(usize, usize)>,
    pub out_dir: PathBuf,
}

impl RawConfig {
    /// Parses a config file, filling missing keys with defaults.
    pub fn from_path(path: &Path) -> Result<RawConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_toml(&text)
    }

    pub fn from_str_toml(text: &str) -> Result<RawConfig> {
        toml::from_str(text).map_err(|e| SimError::ConfigParse(e.to_string()))
    }

    /// Converts to internal linear units and validates every invariant.
    pub fn resolve(&self) -> Result<(SystemConfig, ExperimentSpec)> {
        let s = &self.scenario;
        let c = &self.channel;
        let cfg = SystemConfig {
            tbs_antennas: s.tbs_antennas,
            sat_antennas_x: s.sat_antennas[0],
            sat_antennas_y: s.sat_antennas[1],
            uav_ris_x: s.uav_ris[0],
            uav_ris_y: s.uav_ris[1],
            hap_ris_x: s.hap_ris[0],
            hap_ris_y: s.hap_ris[1],
            element_spacing_ratio: c.element_spacing_ratio,
            tbs_users: s.tbs_users,
            sat_users: s.sat_users,
            tbs_carrier_hz: c.tbs_carrier_ghz * 1e9,
            sat_carrier_hz: c.sat_carrier_ghz * 1e9,
            tbs_power_w: dbm_to_watts(self.power.tbs_dbm),
            sat_power_w: dbm_to_watts(self.power.sat_dbm),
            noise_w: dbm_to_watts(self.power.noise_dbm),
            slots: s.slots,
            slot_duration_s: s.slot_duration_s,
            uav_speed_max: s.uav_speed_max,
            hap_speed_max: s.hap_speed_max,
            uav_alt_min: s.uav_altitude[0],
            uav_alt_max: s.uav_altitude[1],
            hap_alt_min: s.hap_altitude[0],
            hap_alt_max: s.hap_altitude[1],
            uav_init_altitude: s.uav_init_altitude,
            hap_init_altitude: s.hap_init_altitude,
            uav_start_offset: (s.uav_start_offset[0], s.uav_start_offset[1]),
            uav_path_length: s.uav_path_length,
            hap_displacement: s.hap_displacement,
            kappa_tbs_user: c.kappa_tbs_user,
            kappa_tbs_uav: c.kappa_tbs_uav,
            kappa_uav_user: c.kappa_uav_user,
            kappa_sat_user: c.kappa_sat_user,
            kappa_sat_hap: c.kappa_sat_hap,
            kappa_hap_user: c.kappa_hap_user,
            alpha_tbs_user: c.alpha_tbs_user,
            alpha_tbs_uav: c.alpha_tbs_uav,
            alpha_uav_user: c.alpha_uav_user,
            alpha_tbs_sat_user: c.alpha_tbs_sat_user,
            beta_o: db_to_linear(c.beta_o_db),
            gain_sat: db_to_linear(c.gain_sat_dbi),
            gain_hap: db_to_linear(c.gain_hap_dbi),
            gain_user: db_to_linear(c.gain_user_dbi),
            rain_mu: c.rain_mu,
            rain_sigma_sq: c.rain_sigma_sq,
            cross_tier_interference: c.cross_tier_interference,
            tbs_pos: Position3D::new(s.tbs_pos[0], s.tbs_pos[1], s.tbs_pos[2]),
            sat_pos: Position3D::new(s.sat_pos[0], s.sat_pos[1], s.sat_pos[2]),
            tbs_user_region: Rect {
                x_min: s.tbs_user_region[0],
                x_max: s.tbs_user_region[1],
                y_min: s.tbs_user_region[2],
                y_max: s.tbs_user_region[3],
            },
            sat_user_region: Rect {
                x_min: s.sat_user_region[0],
                x_max: s.sat_user_region[1],
                y_min: s.sat_user_region[2],
                y_max: s.sat_user_region[3],
            },
            wmmse_tol: self.wmmse.tol,
            wmmse_max_iters: self.wmmse.max_iters,
            coordinated: self.wmmse.coordinated,
            rcg_tol: self.ris.tol,
            rcg_max_iters: self.ris.max_iters,
            refresh_aux_between_tiers: self.ris.refresh_aux_between_tiers,
            sca_tol_uav: self.trajectory.tol_uav,
            sca_tol_hap: self.trajectory.tol_hap,
            sca_max_iters: self.trajectory.max_iters,
            surrogate_includes_direct: self.trajectory.surrogate_includes_direct,
            bcd_tol: self.bcd.tol,
            bcd_max_iters: self.bcd.max_iters,
        };
        cfg.validate()?;

        let e = &self.experiment;
        let kind = ExperimentKind::parse(&e.name)?;
        let schemes = if e.schemes.is_empty() {
            kind.default_schemes()
        } else {
            e.schemes
                .iter()
                .map(|s| SchemeId::parse(s))
                .collect::<Result<Vec<_>>>()?
        };
        if schemes.is_empty() {
            return Err(SimError::invalid("experiment.schemes", "must be non-empty"));
        }
        if e.trials == 0 {
            return Err(SimError::invalid("experiment.trials", "must be >= 1"));
        }
        let sweep = if e.sweep.is_empty() {
            kind.default_sweep()
        } else {
            e.sweep.clone()
        };
        for w in sweep.windows(2) {
            if w[1] <= w[0] {
                return Err(SimError::invalid(
                    "experiment.sweep",
                    "values must be strictly increasing",
                ));
            }
        }
        let user_pairs: Vec<(usize, usize)> = if e.user_pairs.is_empty() {
            vec![(3, 4), (6, 4), (3, 8), (6, 8)]
        } else {
            e.user_pairs.iter().map(|p| (p[0], p[1])).collect()
        };
        let ris_pairs: Vec<(usize, usize)> = if e.ris_pairs.is_empty() {
            vec![(16, 36), (36, 64), (64, 100)]
        } else {
            e.ris_pairs.iter().map(|p| (p[0], p[1])).collect()
        };
        for &(nu, nh) in &ris_pairs {
            for (key, n) in [("experiment.ris_pairs (N_U)", nu), ("experiment.ris_pairs (N_H)", nh)]
            {
                let r = (n as f64).sqrt().round() as usize;
                if r * r != n {
                    return Err(SimError::invalid(
                        key,
                        format!("{n} is not a perfect square"),
                    ));
                }
            }
        }

        Ok((
            cfg,
            ExperimentSpec {
                kind,
                schemes,
                trials: e.trials,
                seed: e.seed,
                sweep,
                user_pairs,
                ris_pairs,
                out_dir: PathBuf::from(&e.out_dir),
            },
        ))
    }

    /// Fully-populated config (original units) whose re-ingestion reproduces
    /// this run exactly.
    pub fn resolved(&self, spec: &ExperimentSpec) -> RawConfig {
        let mut out = self.clone();
        out.experiment.name = spec.kind.name().into();
        out.experiment.schemes = spec.schemes.iter().map(|s| s.name().into()).collect();
        out.experiment.trials = spec.trials;
        out.experiment.seed = spec.seed;
        out.experiment.sweep = spec.sweep.clone();
        out.experiment.user_pairs = spec.user_pairs.iter().map(|&(a, b)| [a, b]).collect();
        out.experiment.ris_pairs = spec.ris_pairs.iter().map(|&(a, b)| [a, b]).collect();
        out.experiment.out_dir = spec.out_dir.to_string_lossy().into_owned();
        out
    }

    pub fn resolved_toml(&self, spec: &ExperimentSpec) -> Result<String> {
        toml::to_string_pretty(&self.resolved(spec))
            .map_err(|e| SimError::ConfigParse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_table_defaults() {
        let raw = RawConfig::from_str_toml("").unwrap();
        let (cfg, spec) = raw.resolve().unwrap();
        assert_eq!(cfg.tbs_antennas, 8);
        assert_eq!(cfg.sat_antennas(), 32);
        assert_eq!(cfg.tbs_users, 3);
        assert_eq!(cfg.sat_users, 4);
        assert_eq!(cfg.uav_ris_elements(), 16);
        assert_eq!(cfg.hap_ris_elements(), 36);
        assert_eq!(cfg.slots, 60);
        assert_eq!(cfg.slot_duration_s, 1.0);
        assert_eq!(spec.kind, ExperimentKind::Convergence);
        assert_eq!(spec.trials, 50);
    }

    #[test]
    fn dbm_conversion() {
        let raw = RawConfig::from_str_toml("[power]\ntbs_dbm = 44.77\n").unwrap();
        let (cfg, _) = raw.resolve().unwrap();
        assert!((cfg.tbs_power_w - 29.99).abs() / 29.99 < 1e-3, "{}", cfg.tbs_power_w);
        assert!((cfg.noise_w - 1e-12).abs() / 1e-12 < 1e-12);
    }

    #[test]
    fn negative_count_is_rejected_by_key() {
        // usize cannot be negative in TOML; a zero count is the analogous
        // invalid value and must carry the key name.
        let raw = RawConfig::from_str_toml("[scenario]\ntbs_users = 0\n").unwrap();
        match raw.resolve() {
            Err(SimError::InvalidParameter { key, .. }) => assert_eq!(key, "tbs_users"),
            other => panic!("expected key-named error, got {other:?}"),
        }
        // A negative value fails at parse time with the key path.
        let err = RawConfig::from_str_toml("[scenario]\ntbs_users = -3\n").unwrap_err();
        assert!(err.to_string().contains("tbs_users"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RawConfig::from_str_toml("[scenario]\nnot_a_key = 1\n").unwrap_err();
        assert!(err.to_string().contains("not_a_key"), "{err}");
    }

    #[test]
    fn resolved_round_trips() {
        let raw = RawConfig::from_str_toml(
            "[power]\ntbs_dbm = 41.5\n[experiment]\nname = \"pb_sweep\"\ntrials = 7\n",
        )
        .unwrap();
        let (cfg, spec) = raw.resolve().unwrap();
        let text = raw.resolved_toml(&spec).unwrap();
        let again = RawConfig::from_str_toml(&text).unwrap();
        let (cfg2, spec2) = again.resolve().unwrap();
        assert_eq!(cfg, cfg2);
        assert_eq!(spec, spec2);
        assert_eq!(spec2.sweep, vec![40.0, 42.0, 44.0, 46.0, 47.0]);
    }

    #[test]
    fn bad_ris_pair_is_rejected() {
        let raw = RawConfig::from_str_toml(
            "[experiment]\nname = \"ris_size_sweep\"\nris_pairs = [[15, 36]]\n",
        )
        .unwrap();
        assert!(raw.resolve().is_err());
    }
}
