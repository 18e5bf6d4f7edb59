//! SINRs, achievable rates, the frame-average sum-rate, and the weighted-MSE
//! quantities shared by the precoder and RIS subsolvers.
//!
//! Rates are in bits/s/Hz (log base 2). The internal weighted-MSE objective
//! uses natural logarithms of the weights; the rate identity
//! `-log2(e*) = log2(1 + SINR)` holds per user at the optimal auxiliaries.

use num_complex::Complex64;

use crate::channel::{CVec, EffectiveChannels};

/// Transmit precoders for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    /// One vector of length M_b per TBS user.
    pub tbs: Vec<CVec>,
    /// One vector of length M_s per SAT user.
    pub sat: Vec<CVec>,
}

impl PrecoderSet {
    pub fn zeros(k: usize, l: usize, m_b: usize, m_s: usize) -> Self {
        Self {
            tbs: vec![CVec::zeros(m_b); k],
            sat: vec![CVec::zeros(m_s); l],
        }
    }

    pub fn tbs_power(&self) -> f64 {
        self.tbs.iter().map(|w| w.norm_squared()).sum()
    }

    pub fn sat_power(&self) -> f64 {
        self.sat.iter().map(|w| w.norm_squared()).sum()
    }
}

/// Per-user SINRs of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSet {
    pub tbs: Vec<f64>,
    pub sat: Vec<f64>,
}

/// Equalizers and MSE weights for every user of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Auxiliaries {
    pub eq_tbs: Vec<Complex64>,
    pub eq_sat: Vec<Complex64>,
    pub weight_tbs: Vec<f64>,
    pub weight_sat: Vec<f64>,
}

/// Interference-plus-noise totals and per-user MSEs for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct MseReport {
    /// T_k: total received power at TBS user k (desired + interference +
    /// noise).
    pub total_tbs: Vec<f64>,
    pub total_sat: Vec<f64>,
    pub mse_tbs: Vec<f64>,
    pub mse_sat: Vec<f64>,
    /// Sum over users of `w * e - ln(w)`.
    pub objective: f64,
}

/// Per-user rates of every slot plus the frame average.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// `[slot][user]` rates, bits/s/Hz.
    pub tbs_rates: Vec<Vec<f64>>,
    pub sat_rates: Vec<Vec<f64>>,
    /// Per-slot sums over all users.
    pub slot_sums: Vec<f64>,
    /// Frame average of the slot sums.
    pub average: f64,
    /// Frame average restricted to each tier.
    pub average_tbs: f64,
    pub average_sat: f64,
}

impl RateReport {
    /// CSV rows `trial,slot,user_id,tier,rate` (header not included).
    pub fn write_csv_rows<W: std::io::Write>(
        &self,
        trial: usize,
        w: &mut W,
    ) -> std::io::Result<()> {
        for (n, rates) in self.tbs_rates.iter().enumerate() {
            for (k, r) in rates.iter().enumerate() {
                writeln!(w, "{trial},{n},{k},tbs,{:.16e}", r)?;
            }
        }
        for (n, rates) in self.sat_rates.iter().enumerate() {
            for (l, r) in rates.iter().enumerate() {
                writeln!(w, "{trial},{n},{l},sat,{:.16e}", r)?;
            }
        }
        Ok(())
    }
}

fn sq(z: Complex64) -> f64 {
    z.norm_sqr()
}

/// Total received power at each user: own-tier streams, cross-tier streams,
/// plus noise. The desired stream is included.
pub fn received_totals(
    eff: &EffectiveChannels,
    p: &PrecoderSet,
    noise_tbs: f64,
    noise_sat: f64,
) -> (Vec<f64>, Vec<f64>) {
    let t_tbs: Vec<f64> = eff
        .tbs_user
        .iter()
        .zip(&eff.sat_to_tbs_user)
        .map(|(h, g)| {
            let own: f64 = p.tbs.iter().map(|w| sq(h.dot(w))).sum();
            let cross: f64 = p.sat.iter().map(|w| sq(g.dot(w))).sum();
            own + cross + noise_tbs
        })
        .collect();
    let t_sat: Vec<f64> = eff
        .sat_user
        .iter()
        .zip(&eff.tbs_to_sat_user)
        .map(|(h, g)| {
            let own: f64 = p.sat.iter().map(|w| sq(h.dot(w))).sum();
            let cross: f64 = p.tbs.iter().map(|w| sq(g.dot(w))).sum();
            own + cross + noise_sat
        })
        .collect();
    (t_tbs, t_sat)
}

/// Instantaneous SINR of every user.
pub fn compute_sinrs(
    eff: &EffectiveChannels,
    p: &PrecoderSet,
    noise_tbs: f64,
    noise_sat: f64,
) -> SinrSet {
    let (t_tbs, t_sat) = received_totals(eff, p, noise_tbs, noise_sat);
    let tbs = eff
        .tbs_user
        .iter()
        .zip(&p.tbs)
        .zip(&t_tbs)
        .map(|((h, w), t)| {
            let desired = sq(h.dot(w));
            desired / (t - desired)
        })
        .collect();
    let sat = eff
        .sat_user
        .iter()
        .zip(&p.sat)
        .zip(&t_sat)
        .map(|((h, w), t)| {
            let desired = sq(h.dot(w));
            desired / (t - desired)
        })
        .collect();
    SinrSet { tbs, sat }
}

/// Rates and the frame average over a sequence of per-slot SINRs.
pub fn average_sum_rate(per_slot: &[SinrSet]) -> RateReport {
    assert!(!per_slot.is_empty(), "need at least one slot");
    let rate = |s: f64| (1.0 + s).log2();
    let tbs_rates: Vec<Vec<f64>> = per_slot
        .iter()
        .map(|s| s.tbs.iter().map(|&x| rate(x)).collect())
        .collect();
    let sat_rates: Vec<Vec<f64>> = per_slot
        .iter()
        .map(|s| s.sat.iter().map(|&x| rate(x)).collect())
        .collect();
    let slot_sums: Vec<f64> = tbs_rates
        .iter()
        .zip(&sat_rates)
        .map(|(a, b)| a.iter().sum::<f64>() + b.iter().sum::<f64>())
        .collect();
    let n = per_slot.len() as f64;
    let average = slot_sums.iter().sum::<f64>() / n;
    let average_tbs = tbs_rates
        .iter()
        .map(|r| r.iter().sum::<f64>())
        .sum::<f64>()
        / n;
    let average_sat = sat_rates
        .iter()
        .map(|r| r.iter().sum::<f64>())
        .sum::<f64>()
        / n;
    RateReport {
        tbs_rates,
        sat_rates,
        slot_sums,
        average,
        average_tbs,
        average_sat,
    }
}

/// Weighted-MSE quantities at the given equalizers and weights:
/// `e = |u|^2 T - 2 Re{conj(u) h w} + 1` per user, and the objective
/// `sum(w e - ln w)`.
pub fn weighted_mse(
    eff: &EffectiveChannels,
    p: &PrecoderSet,
    aux: &Auxiliaries,
    noise_tbs: f64,
    noise_sat: f64,
) -> MseReport {
    let (total_tbs, total_sat) = received_totals(eff, p, noise_tbs, noise_sat);
    let mse = |u: Complex64, t: f64, hw: Complex64| -> f64 {
        u.norm_sqr() * t - 2.0 * (u.conj() * hw).re + 1.0
    };
    let mse_tbs: Vec<f64> = (0..eff.tbs_user.len())
        .map(|k| {
            let hw = eff.tbs_user[k].dot(&p.tbs[k]);
            mse(aux.eq_tbs[k], total_tbs[k], hw)
        })
        .collect();
    let mse_sat: Vec<f64> = (0..eff.sat_user.len())
        .map(|l| {
            let hw = eff.sat_user[l].dot(&p.sat[l]);
            mse(aux.eq_sat[l], total_sat[l], hw)
        })
        .collect();
    let objective = mse_tbs
        .iter()
        .zip(&aux.weight_tbs)
        .chain(mse_sat.iter().zip(&aux.weight_sat))
        .map(|(&e, &w)| w * e - w.ln())
        .sum();
    MseReport {
        total_tbs,
        total_sat,
        mse_tbs,
        mse_sat,
        objective,
    }
}
