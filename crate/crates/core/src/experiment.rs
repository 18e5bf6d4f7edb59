//! Experiment presets and the batch runner.
//!
//! `run_experiment` executes one preset over its sweep and writes plot-ready
//! CSV files:
//!
//! - `results.csv` — one row per (sweep value, scheme, trial):
//!   `experiment,scheme,sweep_param,sweep_value,trial,R_total,R_tbs,R_sat,iterations`
//! - `timings.csv` — wall-clock per run (kept out of `results.csv` so that
//!   identical invocations produce byte-identical results)
//! - `config_resolved.txt` — every parameter actually used, re-ingestable
//! - `convergence.csv` — per-iteration mean rates (convergence presets)
//! - `trajectory.csv` / `altitude.csv` — path dumps (trajectory presets)
//!
//! All rates are printed with 17 significant digits.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::bcd::{monte_carlo, run_scheme, SchemeId, TrialResult};
use crate::config::{ExperimentKind, ExperimentSpec, RawConfig};
use crate::error::{Result, SimError};
use crate::rng::trial_seed;
use crate::scenario::{build_scenario, dbm_to_watts, SystemConfig};

/// Scale presets: `desk` shrinks the frame and halves the inner solver caps
/// for laptop-speed runs; `paper` keeps the full frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Paper,
}

impl Scale {
    pub fn parse(s: &str) -> Result<Scale> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(SimError::invalid("scale", format!("unknown scale `{other}`"))),
        }
    }
}

/// Builds the config for a named preset at the given scale.
pub fn preset(kind: ExperimentKind, scale: Scale) -> RawConfig {
    let mut raw = RawConfig::default();
    raw.experiment.name = kind.name().into();
    if scale == Scale::Desk {
        raw.scenario.slots = 10;
        raw.experiment.trials = 20;
        raw.ris.max_iters /= 2;
        raw.trajectory.max_iters /= 2;
        if kind == ExperimentKind::FlightPeriodSweep {
            raw.experiment.sweep = vec![6.0, 10.0, 14.0, 18.0];
        }
    }
    raw
}

/// Outcome summary of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub out_dir: PathBuf,
    pub rows: usize,
    pub reduced_precision_runs: usize,
    pub files: Vec<PathBuf>,
}

fn fmt(v: f64) -> String {
    format!("{:.16e}", v)
}

struct SweepPoint {
    label: String,
    config: SystemConfig,
}

fn sweep_points(spec: &ExperimentSpec, base: &SystemConfig) -> Result<(String, Vec<SweepPoint>)> {
    let mk = |label: String, config: SystemConfig| SweepPoint { label, config };
    Ok(match spec.kind {
        ExperimentKind::Convergence
        | ExperimentKind::TierConvergence
        | ExperimentKind::TrajectoryDump
        | ExperimentKind::AltitudeProfiles => (
            "none".to_string(),
            vec![mk("0".into(), base.clone())],
        ),
        ExperimentKind::PbSweep => (
            "pb_dbm".to_string(),
            spec.sweep
                .iter()
                .map(|&dbm| {
                    let mut c = base.clone();
                    c.tbs_power_w = dbm_to_watts(dbm);
                    mk(format!("{dbm}"), c)
                })
                .collect(),
        ),
        ExperimentKind::PsSweep => (
            "ps_dbm".to_string(),
            spec.sweep
                .iter()
                .map(|&dbm| {
                    let mut c = base.clone();
                    c.sat_power_w = dbm_to_watts(dbm);
                    mk(format!("{dbm}"), c)
                })
                .collect(),
        ),
        ExperimentKind::NoiseSweep => (
            "noise_dbm".to_string(),
            spec.sweep
                .iter()
                .map(|&dbm| {
                    let mut c = base.clone();
                    c.noise_w = dbm_to_watts(dbm);
                    mk(format!("{dbm}"), c)
                })
                .collect(),
        ),
        ExperimentKind::FlightPeriodSweep => (
            "slots".to_string(),
            spec.sweep
                .iter()
                .map(|&n| {
                    let mut c = base.clone();
                    c.slots = n as usize;
                    mk(format!("{}", n as usize), c)
                })
                .collect(),
        ),
        ExperimentKind::UserScaling => (
            "users".to_string(),
            spec.user_pairs
                .iter()
                .map(|&(k, l)| {
                    let mut c = base.clone();
                    c.tbs_users = k;
                    c.sat_users = l;
                    mk(format!("K{k}L{l}"), c)
                })
                .collect(),
        ),
        ExperimentKind::RisSizeSweep => (
            "nu_nh".to_string(),
            spec.ris_pairs
                .iter()
                .map(|&(nu, nh)| {
                    let mut c = base.clone();
                    let ru = (nu as f64).sqrt().round() as usize;
                    let rh = (nh as f64).sqrt().round() as usize;
                    c.uav_ris_x = ru;
                    c.uav_ris_y = ru;
                    c.hap_ris_x = rh;
                    c.hap_ris_y = rh;
                    mk(format!("{nu}x{nh}"), c)
                })
                .collect(),
        ),
    })
}

/// Runs the experiment and writes every output file into `spec.out_dir`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    config: &SystemConfig,
    raw: &RawConfig,
) -> Result<ExperimentSummary> {
    fs::create_dir_all(&spec.out_dir)?;
    let results_path = spec.out_dir.join("results.csv");
    let mut results = fs::File::create(&results_path)?;
    writeln!(
        results,
        "experiment,scheme,sweep_param,sweep_value,trial,R_total,R_tbs,R_sat,iterations"
    )?;
    let mut files = vec![results_path.clone()];

    let resolved_path = spec.out_dir.join("config_resolved.txt");
    fs::write(&resolved_path, raw.resolved_toml(spec)?)?;
    files.push(resolved_path);

    let (sweep_param, points) = sweep_points(spec, config)?;
    let mut all_rows: Vec<(String, TrialResult)> = Vec::new();
    for point in &points {
        let rows = monte_carlo(&spec.schemes, &point.config, spec.trials, spec.seed)?;
        for r in rows {
            all_rows.push((point.label.clone(), r));
        }
    }

    let mut reduced = 0usize;
    for (label, r) in &all_rows {
        if r.reduced_precision {
            reduced += 1;
        }
        writeln!(
            results,
            "{},{},{},{},{},{},{},{},{}",
            spec.kind.name(),
            r.scheme.name(),
            sweep_param,
            label,
            r.trial,
            fmt(r.rate.total),
            fmt(r.rate.tbs),
            fmt(r.rate.sat),
            r.iterations
        )?;
    }
    drop(results);

    // Wall-clock sidecar (not covered by the determinism guarantee).
    let timings_path = spec.out_dir.join("timings.csv");
    let mut timings = fs::File::create(&timings_path)?;
    writeln!(timings, "experiment,scheme,sweep_param,sweep_value,trial,wall_time_ms")?;
    for (label, r) in &all_rows {
        writeln!(
            timings,
            "{},{},{},{},{},{:.3}",
            spec.kind.name(),
            r.scheme.name(),
            sweep_param,
            label,
            r.trial,
            r.wall_time_ms
        )?;
    }
    drop(timings);
    files.push(timings_path);

    if matches!(
        spec.kind,
        ExperimentKind::Convergence | ExperimentKind::TierConvergence | ExperimentKind::UserScaling
    ) {
        let path = spec.out_dir.join("convergence.csv");
        let mut f = fs::File::create(&path)?;
        writeln!(f, "sweep_value,scheme,iteration,R_total,R_tbs,R_sat")?;
        for point in &points {
            for &scheme in &spec.schemes {
                let histories: Vec<&Vec<crate::bcd::RateTriple>> = all_rows
                    .iter()
                    .filter(|(l, r)| *l == point.label && r.scheme == scheme)
                    .map(|(_, r)| &r.rate_history)
                    .collect();
                let longest = histories.iter().map(|h| h.len()).max().unwrap_or(0);
                for i in 0..longest {
                    // A converged trial holds its final value.
                    let (mut t, mut b, mut s) = (0.0, 0.0, 0.0);
                    for h in &histories {
                        let x = h[i.min(h.len() - 1)];
                        t += x.total;
                        b += x.tbs;
                        s += x.sat;
                    }
                    let n = histories.len() as f64;
                    writeln!(
                        f,
                        "{},{},{},{},{},{}",
                        point.label,
                        scheme.name(),
                        i,
                        fmt(t / n),
                        fmt(b / n),
                        fmt(s / n)
                    )?;
                }
            }
        }
        files.push(path);
    }

    if matches!(
        spec.kind,
        ExperimentKind::TrajectoryDump | ExperimentKind::AltitudeProfiles
    ) {
        // Dump the first trial's paths under the proposed scheme.
        let seed = trial_seed(spec.seed, 0);
        let scenario = build_scenario(config, seed)?;
        let out = run_scheme(SchemeId::Proposed, &scenario, seed)?;
        if spec.kind == ExperimentKind::TrajectoryDump {
            let path = spec.out_dir.join("trajectory.csv");
            let mut f = fs::File::create(&path)?;
            writeln!(f, "slot,platform,x,y,z")?;
            let dump = |f: &mut fs::File,
                        name: &str,
                        points: &[crate::scenario::Position3D]|
             -> std::io::Result<()> {
                for (n, p) in points.iter().enumerate() {
                    writeln!(f, "{},{},{},{},{}", n, name, fmt(p.x), fmt(p.y), fmt(p.z))?;
                }
                Ok(())
            };
            dump(&mut f, "uav_initial", &scenario.uav_init_traj.points)?;
            dump(&mut f, "uav_optimized", &out.state.uav_traj.points)?;
            dump(&mut f, "hap_initial", &scenario.hap_init_traj.points)?;
            dump(&mut f, "hap_optimized", &out.state.hap_traj.points)?;
            files.push(path);
        } else {
            let path = spec.out_dir.join("altitude.csv");
            let mut f = fs::File::create(&path)?;
            writeln!(f, "slot,platform,z_initial,z_optimized")?;
            for (n, (a, b)) in scenario
                .uav_init_traj
                .points
                .iter()
                .zip(&out.state.uav_traj.points)
                .enumerate()
            {
                writeln!(f, "{},uav,{},{}", n, fmt(a.z), fmt(b.z))?;
            }
            for (n, (a, b)) in scenario
                .hap_init_traj
                .points
                .iter()
                .zip(&out.state.hap_traj.points)
                .enumerate()
            {
                writeln!(f, "{},hap,{},{}", n, fmt(a.z), fmt(b.z))?;
            }
            files.push(path);
        }
    }

    Ok(ExperimentSummary {
        out_dir: spec.out_dir.clone(),
        rows: all_rows.len(),
        reduced_precision_runs: reduced,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk_raw(kind: ExperimentKind, trials: usize, out: &std::path::Path) -> RawConfig {
        let mut raw = preset(kind, Scale::Desk);
        raw.scenario.slots = 4;
        raw.scenario.tbs_users = 2;
        raw.scenario.sat_users = 2;
        raw.scenario.tbs_antennas = 4;
        raw.scenario.sat_antennas = [2, 2];
        raw.scenario.uav_ris = [2, 2];
        raw.scenario.hap_ris = [2, 2];
        raw.bcd.max_iters = 4;
        raw.experiment.trials = trials;
        raw.experiment.out_dir = out.to_string_lossy().into_owned();
        raw
    }

    #[test]
    fn pb_sweep_emits_expected_rows() {
        let dir = tempfile::tempdir().unwrap();
        let raw = desk_raw(ExperimentKind::PbSweep, 2, dir.path());
        let (cfg, spec) = raw.resolve().unwrap();
        let summary = run_experiment(&spec, &cfg, &raw).unwrap();
        // 5 sweep values x 3 schemes x 2 trials.
        assert_eq!(summary.rows, 5 * 3 * 2);
        let text = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
        assert!(text.starts_with(
            "experiment,scheme,sweep_param,sweep_value,trial,R_total,R_tbs,R_sat,iterations"
        ));
        assert_eq!(text.lines().count(), 1 + 30);
    }

    #[test]
    fn identical_invocations_are_byte_identical() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let mut raw1 = desk_raw(ExperimentKind::Convergence, 2, d1.path());
        raw1.experiment.schemes = vec!["proposed".into(), "no_ris".into()];
        let mut raw2 = raw1.clone();
        raw2.experiment.out_dir = d2.path().to_string_lossy().into_owned();
        let (c1, s1) = raw1.resolve().unwrap();
        let (c2, s2) = raw2.resolve().unwrap();
        run_experiment(&s1, &c1, &raw1).unwrap();
        run_experiment(&s2, &c2, &raw2).unwrap();
        let a = std::fs::read(d1.path().join("results.csv")).unwrap();
        let b = std::fs::read(d2.path().join("results.csv")).unwrap();
        assert_eq!(a, b);
        let a = std::fs::read_to_string(d1.path().join("convergence.csv")).unwrap();
        let b = std::fs::read_to_string(d2.path().join("convergence.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn resolved_config_reingests_identically() {
        let dir = tempfile::tempdir().unwrap();
        let raw = desk_raw(ExperimentKind::Convergence, 1, dir.path());
        let (cfg, spec) = raw.resolve().unwrap();
        run_experiment(&spec, &cfg, &raw).unwrap();
        let text = std::fs::read_to_string(dir.path().join("config_resolved.txt")).unwrap();
        let again = RawConfig::from_str_toml(&text).unwrap();
        let (cfg2, spec2) = again.resolve().unwrap();
        assert_eq!(cfg, cfg2);
        assert_eq!(spec.kind, spec2.kind);
        assert_eq!(spec.schemes, spec2.schemes);
    }

    #[test]
    fn trajectory_dump_writes_paths() {
        let dir = tempfile::tempdir().unwrap();
        let raw = desk_raw(ExperimentKind::TrajectoryDump, 1, dir.path());
        let (cfg, spec) = raw.resolve().unwrap();
        run_experiment(&spec, &cfg, &raw).unwrap();
        let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
        assert!(text.lines().count() > 4 * 4);
        assert!(text.contains("uav_optimized"));
        assert!(text.contains("hap_initial"));
    }
}
