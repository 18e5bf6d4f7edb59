//! Channel synthesis for every link in the network.
//!
//! One [`ChannelSet`] holds all per-slot channel matrices for a single
//! realization: direct terrestrial and satellite links, the RIS cascades
//! through the UAV and HAP panels, and the four cross-tier interference
//! links. Large-scale gains follow a distance power law on the TBS side and
//! free-space-with-antenna-gains on the SAT/HAP side; small-scale fading is
//! Rician around geometry-derived steering vectors.
//!
//! Rain attenuation is drawn once per (user, slot) and shared by that user's
//! SAT and HAP links. The documented rain model is `A_dB = exp(X)` with
//! `X ~ N(mu_r, sigma_r^2)` and `r = 10^(-A_dB / 10)` as a linear power
//! attenuation below one.
//!
//! Trajectory updates do not redraw fading: [`ChannelSet::rescaled`] moves a
//! realization to new platform positions by scaling each position-dependent
//! link with its large-scale amplitude ratio, keeping the angular structure
//! and the diffuse components frozen.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SimError};
use crate::scenario::{geometry, Position3D, Scenario};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

/// ULA response: entry m is `exp(-i 2 pi m (d/lambda) cos(el) cos(az)) / sqrt(M)`.
pub fn steering_ula(m: usize, spacing_over_lambda: f64, azimuth: f64, elevation: f64) -> CVec {
    let phase_step = -2.0 * std::f64::consts::PI
        * spacing_over_lambda
        * elevation.cos()
        * azimuth.cos();
    let norm = 1.0 / (m as f64).sqrt();
    CVec::from_fn(m, |i, _| {
        Complex64::from_polar(norm, phase_step * i as f64)
    })
}

/// UPA response: Kronecker product of the per-axis factors scaled by the
/// outer `1/sqrt(Nx*Ny)` prefactor, so the result has norm `1/sqrt(Nx*Ny)`.
///
/// The x-axis phase is proportional to `cos(el) cos(az)`, the y-axis phase to
/// `cos(el) sin(az)`.
pub fn steering_upa(
    nx: usize,
    ny: usize,
    spacing_x_over_lambda: f64,
    spacing_y_over_lambda: f64,
    azimuth: f64,
    elevation: f64,
) -> CVec {
    let ax = steering_ula(nx, spacing_x_over_lambda, azimuth, elevation);
    let py = -2.0 * std::f64::consts::PI
        * spacing_y_over_lambda
        * elevation.cos()
        * azimuth.sin();
    let ny_norm = 1.0 / (ny as f64).sqrt();
    let ay = CVec::from_fn(ny, |j, _| Complex64::from_polar(ny_norm, py * j as f64));
    let outer = Complex64::new(1.0 / ((nx * ny) as f64).sqrt(), 0.0);
    let mut out = CVec::zeros(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            out[i * ny + j] = outer * ax[i] * ay[j];
        }
    }
    out
}

/// Terrestrial power-law gain `beta_o * d^(-alpha)` (a power, not an
/// amplitude).
pub fn link_gain_terrestrial(d: f64, alpha: f64, beta_o: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(SimError::DegenerateGeometry(format!(
            "nonpositive distance {d}"
        )));
    }
    Ok(beta_o * d.powf(-alpha))
}

/// Satellite-chain amplitude `sqrt((lambda/(4 pi d))^2 G_tx G_rx r)`.
///
/// Accumulated in the log domain; the result multiplies the channel directly
/// as an amplitude.
pub fn link_gain_satellite(
    d: f64,
    wavelength: f64,
    g_tx: f64,
    g_rx: f64,
    rain_linear: f64,
) -> Result<f64> {
    for (key, v) in [
        ("d", d),
        ("wavelength", wavelength),
        ("g_tx", g_tx),
        ("g_rx", g_rx),
        ("rain_linear", rain_linear),
    ] {
        if !(v > 0.0) {
            return Err(SimError::invalid(key, format!("must be > 0, got {v}")));
        }
    }
    let log_power = 2.0 * (wavelength.ln() - (4.0 * std::f64::consts::PI * d).ln())
        + g_tx.ln()
        + g_rx.ln()
        + rain_linear.ln();
    Ok((0.5 * log_power).exp())
}

/// One rain attenuation draw: `A_dB = exp(N(mu, sigma^2))`, returned as the
/// linear power factor `10^(-A_dB/10)`.
pub fn sample_rain<R: Rng + ?Sized>(rng: &mut R, mu: f64, sigma_sq: f64) -> f64 {
    let x: f64 = rng.sample(StandardNormal);
    let a_db = (mu + sigma_sq.sqrt() * x).exp();
    10f64.powf(-a_db / 10.0)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Rician mixture `scale * (sqrt(k/(k+1)) los + sqrt(1/(k+1)) W)` with `W`
/// i.i.d. standard circularly-symmetric complex Gaussian.
pub fn sample_rician<R: Rng + ?Sized>(los: &CMat, kappa: f64, scale: f64, rng: &mut R) -> CMat {
    let los_w = (kappa / (kappa + 1.0)).sqrt();
    let nlos_w = (1.0 / (kappa + 1.0)).sqrt();
    let mut out = CMat::zeros(los.nrows(), los.ncols());
    for j in 0..los.ncols() {
        for i in 0..los.nrows() {
            out[(i, j)] = (los_w * los[(i, j)] + nlos_w * complex_gaussian(rng)) * scale;
        }
    }
    out
}

/// Vector form of [`sample_rician`].
pub fn sample_rician_vec<R: Rng + ?Sized>(
    los: &CVec,
    kappa: f64,
    scale: f64,
    rng: &mut R,
) -> CVec {
    let los_w = (kappa / (kappa + 1.0)).sqrt();
    let nlos_w = (1.0 / (kappa + 1.0)).sqrt();
    CVec::from_iterator(
        los.len(),
        los.iter()
            .map(|&l| (los_w * l + nlos_w * complex_gaussian(rng)) * scale),
    )
}

/// Every channel of one slot, plus the platform positions it was built at.
///
/// Row-type channels (transmitter-side) store the row's entries, so
/// `h.dot(&w)` without conjugation is the scalar `h w`. Column-type channels
/// (RIS-element side) store the vector as drawn; compositions apply the
/// conjugate transpose explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Direct TBS -> TBS-user k, rows of length M_b.
    pub tbs_to_user: Vec<CVec>,
    /// TBS -> UAV-RIS, N_U x M_b.
    pub tbs_to_uav: CMat,
    /// UAV-RIS -> TBS-user k, columns of length N_U.
    pub uav_to_user: Vec<CVec>,
    /// Direct SAT -> SAT-user l, rows of length M_s.
    pub sat_to_user: Vec<CVec>,
    /// SAT -> HAP-RIS, N_H x M_s.
    pub sat_to_hap: CMat,
    /// HAP-RIS -> SAT-user l, columns of length N_H.
    pub hap_to_user: Vec<CVec>,
    /// Cross tier: SAT -> TBS-user k, rows of length M_s.
    pub sat_to_tbs_user: Vec<CVec>,
    /// Cross tier: HAP-RIS -> TBS-user k, columns of length N_H.
    pub hap_to_tbs_user: Vec<CVec>,
    /// Cross tier: TBS -> SAT-user l, rows of length M_b.
    pub tbs_to_sat_user: Vec<CVec>,
    /// Cross tier: UAV-RIS -> SAT-user l, columns of length N_U.
    pub uav_to_sat_user: Vec<CVec>,
    /// Rain power factors used this slot, one per user.
    pub rain_tbs_user: Vec<f64>,
    pub rain_sat_user: Vec<f64>,
    /// Positions the realization was synthesized at.
    pub uav_pos: Position3D,
    pub hap_pos: Position3D,
}

/// Builds every link of one slot from geometry, the configured Rician
/// factors, and the large-scale models. Deterministic given the RNG state.
pub fn assemble_channel_set<R: Rng + ?Sized>(
    scenario: &Scenario,
    uav_pos: Position3D,
    hap_pos: Position3D,
    rng: &mut R,
) -> Result<ChannelSet> {
    let cfg = &scenario.config;
    if uav_pos.z < cfg.uav_alt_min || uav_pos.z > cfg.uav_alt_max {
        return Err(SimError::invalid(
            "uav_pos.z",
            format!("altitude {} outside bounds", uav_pos.z),
        ));
    }
    if hap_pos.z < cfg.hap_alt_min || hap_pos.z > cfg.hap_alt_max {
        return Err(SimError::invalid(
            "hap_pos.z",
            format!("altitude {} outside bounds", hap_pos.z),
        ));
    }

    let sp = cfg.element_spacing_ratio;
    let m_b = cfg.tbs_antennas;
    let lam_sat = cfg.sat_wavelength();

    let rain_tbs_user: Vec<f64> = (0..cfg.tbs_users)
        .map(|_| sample_rain(rng, cfg.rain_mu, cfg.rain_sigma_sq))
        .collect();
    let rain_sat_user: Vec<f64> = (0..cfg.sat_users)
        .map(|_| sample_rain(rng, cfg.rain_mu, cfg.rain_sigma_sq))
        .collect();

    // Row channel from a multi-antenna transmitter at `tx` to a single-antenna
    // node at `rx`: conj of the array response toward the receiver.
    let tbs_row_los = |rx: &Position3D| -> Result<CVec> {
        let g = geometry(&scenario.tbs_pos, rx)?;
        Ok(steering_ula(m_b, sp, g.azimuth, g.elevation).map(|z| z.conj()))
    };
    let sat_row_los = |rx: &Position3D| -> Result<CVec> {
        let g = geometry(&scenario.sat_pos, rx)?;
        Ok(
            steering_upa(cfg.sat_antennas_x, cfg.sat_antennas_y, sp, sp, g.azimuth, g.elevation)
                .map(|z| z.conj()),
        )
    };
    // RIS panel response toward a point (departure or arrival direction).
    let uav_panel = |to: &Position3D| -> Result<CVec> {
        let g = geometry(&uav_pos, to)?;
        Ok(steering_upa(cfg.uav_ris_x, cfg.uav_ris_y, sp, sp, g.azimuth, g.elevation))
    };
    let hap_panel = |to: &Position3D| -> Result<CVec> {
        let g = geometry(&hap_pos, to)?;
        Ok(steering_upa(cfg.hap_ris_x, cfg.hap_ris_y, sp, sp, g.azimuth, g.elevation))
    };

    // --- TBS tier -----------------------------------------------------------
    let mut tbs_to_user = Vec::with_capacity(cfg.tbs_users);
    for user in &scenario.tbs_user_pos {
        let d = scenario.tbs_pos.distance_to(user);
        let amp = link_gain_terrestrial(d, cfg.alpha_tbs_user, cfg.beta_o)?.sqrt();
        let los = tbs_row_los(user)?;
        tbs_to_user.push(sample_rician_vec(&los, cfg.kappa_tbs_user, amp, rng));
    }

    let d_tbs_uav = scenario.tbs_pos.distance_to(&uav_pos);
    let amp = link_gain_terrestrial(d_tbs_uav, cfg.alpha_tbs_uav, cfg.beta_o)?.sqrt();
    let rx = uav_panel(&scenario.tbs_pos)?;
    let g = geometry(&scenario.tbs_pos, &uav_pos)?;
    let tx = steering_ula(m_b, sp, g.azimuth, g.elevation);
    let los = &rx * tx.adjoint();
    let tbs_to_uav = sample_rician(&los, cfg.kappa_tbs_uav, amp, rng);

    let mut uav_to_user = Vec::with_capacity(cfg.tbs_users);
    for user in &scenario.tbs_user_pos {
        let d = uav_pos.distance_to(user);
        let amp = link_gain_terrestrial(d, cfg.alpha_uav_user, cfg.beta_o)?.sqrt();
        let los = uav_panel(user)?;
        uav_to_user.push(sample_rician_vec(&los, cfg.kappa_uav_user, amp, rng));
    }

    // --- SAT tier -----------------------------------------------------------
    let mut sat_to_user = Vec::with_capacity(cfg.sat_users);
    for (l, user) in scenario.sat_user_pos.iter().enumerate() {
        let d = scenario.sat_pos.distance_to(user);
        let amp =
            link_gain_satellite(d, lam_sat, cfg.gain_sat, cfg.gain_user, rain_sat_user[l])?;
        let los = sat_row_los(user)?;
        sat_to_user.push(sample_rician_vec(&los, cfg.kappa_sat_user, amp, rng));
    }

    let d_sat_hap = scenario.sat_pos.distance_to(&hap_pos);
    let amp = link_gain_satellite(d_sat_hap, lam_sat, cfg.gain_sat, cfg.gain_hap, 1.0)?;
    let rx = hap_panel(&scenario.sat_pos)?;
    let g = geometry(&scenario.sat_pos, &hap_pos)?;
    let tx = steering_upa(cfg.sat_antennas_x, cfg.sat_antennas_y, sp, sp, g.azimuth, g.elevation);
    let los = &rx * tx.adjoint();
    let sat_to_hap = sample_rician(&los, cfg.kappa_sat_hap, amp, rng);

    let mut hap_to_user = Vec::with_capacity(cfg.sat_users);
    for (l, user) in scenario.sat_user_pos.iter().enumerate() {
        let d = hap_pos.distance_to(user);
        let amp =
            link_gain_satellite(d, lam_sat, cfg.gain_hap, cfg.gain_user, rain_sat_user[l])?;
        let los = hap_panel(user)?;
        hap_to_user.push(sample_rician_vec(&los, cfg.kappa_hap_user, amp, rng));
    }

    // --- Cross tier ---------------------------------------------------------
    let mut sat_to_tbs_user = Vec::with_capacity(cfg.tbs_users);
    let mut hap_to_tbs_user = Vec::with_capacity(cfg.tbs_users);
    for (k, user) in scenario.tbs_user_pos.iter().enumerate() {
        let d = scenario.sat_pos.distance_to(user);
        let amp =
            link_gain_satellite(d, lam_sat, cfg.gain_sat, cfg.gain_user, rain_tbs_user[k])?;
        let los = sat_row_los(user)?;
        sat_to_tbs_user.push(sample_rician_vec(&los, cfg.kappa_sat_user, amp, rng));

        let d = hap_pos.distance_to(user);
        let amp =
            link_gain_satellite(d, lam_sat, cfg.gain_hap, cfg.gain_user, rain_tbs_user[k])?;
        let los = hap_panel(user)?;
        hap_to_tbs_user.push(sample_rician_vec(&los, cfg.kappa_hap_user, amp, rng));
    }

    let mut tbs_to_sat_user = Vec::with_capacity(cfg.sat_users);
    let mut uav_to_sat_user = Vec::with_capacity(cfg.sat_users);
    for user in &scenario.sat_user_pos {
        let d = scenario.tbs_pos.distance_to(user);
        let amp = link_gain_terrestrial(d, cfg.alpha_tbs_sat_user, cfg.beta_o)?.sqrt();
        let los = tbs_row_los(user)?;
        tbs_to_sat_user.push(sample_rician_vec(&los, cfg.kappa_tbs_user, amp, rng));

        let d = uav_pos.distance_to(user);
        let amp = link_gain_terrestrial(d, cfg.alpha_uav_user, cfg.beta_o)?.sqrt();
        let los = uav_panel(user)?;
        uav_to_sat_user.push(sample_rician_vec(&los, cfg.kappa_uav_user, amp, rng));
    }

    Ok(ChannelSet {
        tbs_to_user,
        tbs_to_uav,
        uav_to_user,
        sat_to_user,
        sat_to_hap,
        hap_to_user,
        sat_to_tbs_user,
        hap_to_tbs_user,
        tbs_to_sat_user,
        uav_to_sat_user,
        rain_tbs_user,
        rain_sat_user,
        uav_pos,
        hap_pos,
    })
}

impl ChannelSet {
    /// Moves the realization to new platform positions by rescaling each
    /// position-dependent link with its large-scale amplitude ratio. Fading
    /// and steering structure stay frozen.
    pub fn rescaled(
        &self,
        scenario: &Scenario,
        new_uav: Position3D,
        new_hap: Position3D,
    ) -> ChannelSet {
        let cfg = &scenario.config;
        let power_ratio = |d_old: f64, d_new: f64, alpha: f64| (d_old / d_new).powf(0.5 * alpha);
        let fs_ratio = |d_old: f64, d_new: f64| d_old / d_new;
        let scale_vec = |v: &CVec, r: f64| v.map(|z| z * r);

        let mut out = self.clone();

        let r = power_ratio(
            scenario.tbs_pos.distance_to(&self.uav_pos),
            scenario.tbs_pos.distance_to(&new_uav),
            cfg.alpha_tbs_uav,
        );
        out.tbs_to_uav = self.tbs_to_uav.map(|z| z * r);

        for (k, user) in scenario.tbs_user_pos.iter().enumerate() {
            let r = power_ratio(
                self.uav_pos.distance_to(user),
                new_uav.distance_to(user),
                cfg.alpha_uav_user,
            );
            out.uav_to_user[k] = scale_vec(&self.uav_to_user[k], r);

            let r = fs_ratio(self.hap_pos.distance_to(user), new_hap.distance_to(user));
            out.hap_to_tbs_user[k] = scale_vec(&self.hap_to_tbs_user[k], r);
        }

        let r = fs_ratio(
            scenario.sat_pos.distance_to(&self.hap_pos),
            scenario.sat_pos.distance_to(&new_hap),
        );
        out.sat_to_hap = self.sat_to_hap.map(|z| z * r);

        for (l, user) in scenario.sat_user_pos.iter().enumerate() {
            let r = fs_ratio(self.hap_pos.distance_to(user), new_hap.distance_to(user));
            out.hap_to_user[l] = scale_vec(&self.hap_to_user[l], r);

            let r = power_ratio(
                self.uav_pos.distance_to(user),
                new_uav.distance_to(user),
                cfg.alpha_uav_user,
            );
            out.uav_to_sat_user[l] = scale_vec(&self.uav_to_sat_user[l], r);
        }

        out.uav_pos = new_uav;
        out.hap_pos = new_hap;
        out
    }

    /// Writes every matrix as one line of `re+imj` comma-separated entries
    /// (row-major), prefixed by a name and the dimensions.
    pub fn write_debug<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        fn line<W: std::io::Write>(
            w: &mut W,
            name: &str,
            nrows: usize,
            ncols: usize,
            entries: impl Iterator<Item = Complex64>,
        ) -> std::io::Result<()> {
            write!(w, "{name} {nrows} {ncols} ")?;
            let mut first = true;
            for z in entries {
                if !first {
                    write!(w, ",")?;
                }
                write!(w, "{}{:+}j", z.re, z.im)?;
                first = false;
            }
            writeln!(w)
        }
        let row_major = |m: &CMat| -> Vec<Complex64> {
            let mut v = Vec::with_capacity(m.len());
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    v.push(m[(i, j)]);
                }
            }
            v
        };
        for (k, h) in self.tbs_to_user.iter().enumerate() {
            line(w, &format!("tbs_to_user[{k}]"), 1, h.len(), h.iter().copied())?;
        }
        line(
            w,
            "tbs_to_uav",
            self.tbs_to_uav.nrows(),
            self.tbs_to_uav.ncols(),
            row_major(&self.tbs_to_uav).into_iter(),
        )?;
        for (k, h) in self.uav_to_user.iter().enumerate() {
            line(w, &format!("uav_to_user[{k}]"), h.len(), 1, h.iter().copied())?;
        }
        for (l, h) in self.sat_to_user.iter().enumerate() {
            line(w, &format!("sat_to_user[{l}]"), 1, h.len(), h.iter().copied())?;
        }
        line(
            w,
            "sat_to_hap",
            self.sat_to_hap.nrows(),
            self.sat_to_hap.ncols(),
            row_major(&self.sat_to_hap).into_iter(),
        )?;
        for (l, h) in self.hap_to_user.iter().enumerate() {
            line(w, &format!("hap_to_user[{l}]"), h.len(), 1, h.iter().copied())?;
        }
        for (k, h) in self.sat_to_tbs_user.iter().enumerate() {
            line(w, &format!("sat_to_tbs_user[{k}]"), 1, h.len(), h.iter().copied())?;
        }
        for (k, h) in self.hap_to_tbs_user.iter().enumerate() {
            line(w, &format!("hap_to_tbs_user[{k}]"), h.len(), 1, h.iter().copied())?;
        }
        for (l, h) in self.tbs_to_sat_user.iter().enumerate() {
            line(w, &format!("tbs_to_sat_user[{l}]"), 1, h.len(), h.iter().copied())?;
        }
        for (l, h) in self.uav_to_sat_user.iter().enumerate() {
            line(w, &format!("uav_to_sat_user[{l}]"), h.len(), 1, h.iter().copied())?;
        }
        Ok(())
    }
}

/// Effective channels after RIS composition; all rows, `h.dot(&w)` is the
/// scalar channel-precoder product.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    /// TBS-user k effective channel (direct + UAV cascade), length M_b.
    pub tbs_user: Vec<CVec>,
    /// SAT-user l effective channel (direct + HAP cascade), length M_s.
    pub sat_user: Vec<CVec>,
    /// Cross-tier SAT -> TBS-user k (direct + HAP cascade), length M_s.
    pub sat_to_tbs_user: Vec<CVec>,
    /// Cross-tier TBS -> SAT-user l (direct + UAV cascade), length M_b.
    pub tbs_to_sat_user: Vec<CVec>,
}

/// Cascade-only effective row `(elem^H diag(v) H)`, length = columns of `H`.
pub fn cascade_row(elem: &CVec, panel: &CMat, phases: &CVec) -> CVec {
    let weights = CVec::from_iterator(
        elem.len(),
        elem.iter().zip(phases.iter()).map(|(&h, &v)| h.conj() * v),
    );
    panel.tr_mul(&weights)
}

fn check_unit_modulus(v: &CVec) -> Result<()> {
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if (m - 1.0).abs() > 1e-6 {
            return Err(SimError::InvalidPhases {
                index: i,
                modulus: m,
            });
        }
    }
    Ok(())
}

/// Composes the four effective-channel groups from a channel set and the two
/// RIS phase vectors.
///
/// `include_cascade = false` removes the RIS paths entirely (the no-RIS
/// system); `cross_tier = false` zeroes the cross-tier interference channels.
pub fn compose_effective_channels(
    cs: &ChannelSet,
    uav_phases: &CVec,
    hap_phases: &CVec,
    include_cascade: bool,
    cross_tier: bool,
) -> Result<EffectiveChannels> {
    if include_cascade {
        if uav_phases.len() != cs.tbs_to_uav.nrows() {
            return Err(SimError::DimensionMismatch(format!(
                "uav phase vector length {} vs panel rows {}",
                uav_phases.len(),
                cs.tbs_to_uav.nrows()
            )));
        }
        if hap_phases.len() != cs.sat_to_hap.nrows() {
            return Err(SimError::DimensionMismatch(format!(
                "hap phase vector length {} vs panel rows {}",
                hap_phases.len(),
                cs.sat_to_hap.nrows()
            )));
        }
        check_unit_modulus(uav_phases)?;
        check_unit_modulus(hap_phases)?;
    }

    let m_b = cs.tbs_to_uav.ncols();
    let m_s = cs.sat_to_hap.ncols();

    let combine = |direct: &CVec, elem: &CVec, panel: &CMat, phases: &CVec| -> CVec {
        if include_cascade {
            direct + cascade_row(elem, panel, phases)
        } else {
            direct.clone()
        }
    };

    let tbs_user = cs
        .tbs_to_user
        .iter()
        .zip(&cs.uav_to_user)
        .map(|(d, e)| combine(d, e, &cs.tbs_to_uav, uav_phases))
        .collect();
    let sat_user = cs
        .sat_to_user
        .iter()
        .zip(&cs.hap_to_user)
        .map(|(d, e)| combine(d, e, &cs.sat_to_hap, hap_phases))
        .collect();
    let sat_to_tbs_user = if cross_tier {
        cs.sat_to_tbs_user
            .iter()
            .zip(&cs.hap_to_tbs_user)
            .map(|(d, e)| combine(d, e, &cs.sat_to_hap, hap_phases))
            .collect()
    } else {
        vec![CVec::zeros(m_s); cs.sat_to_tbs_user.len()]
    };
    let tbs_to_sat_user = if cross_tier {
        cs.tbs_to_sat_user
            .iter()
            .zip(&cs.uav_to_sat_user)
            .map(|(d, e)| combine(d, e, &cs.tbs_to_uav, uav_phases))
            .collect()
    } else {
        vec![CVec::zeros(m_b); cs.tbs_to_sat_user.len()]
    };

    Ok(EffectiveChannels {
        tbs_user,
        sat_user,
        sat_to_tbs_user,
        tbs_to_sat_user,
    })
}
