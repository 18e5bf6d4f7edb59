//! Precoder optimization by alternating MMSE updates.
//!
//! For fixed RIS phases and platform positions, the per-slot sum-rate problem
//! is solved by cycling closed-form updates: MMSE equalizers, MSE-inverse
//! weights, then per-station precoders from regularized normal equations with
//! the regularizer found by bisection on the power constraint. The slot
//! sum-rate is non-decreasing across iterations.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::channel::{CMat, CVec, EffectiveChannels};
use crate::error::{Result, SimError};
use crate::metrics::{
    average_sum_rate, compute_sinrs, received_totals, Auxiliaries, PrecoderSet, SinrSet,
};

/// Which stations actively transmit. A disabled station keeps zero precoders
/// and contributes neither signal nor interference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TierMask {
    pub tbs: bool,
    pub sat: bool,
}

impl TierMask {
    pub fn both() -> Self {
        Self {
            tbs: true,
            sat: true,
        }
    }
}

/// Solver controls for one slot-level run.
#[derive(Debug, Clone, Copy)]
pub struct WmmseOptions {
    pub tbs_power: f64,
    pub sat_power: f64,
    pub noise_tbs: f64,
    pub noise_sat: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Include the cross-tier leakage terms in each station's normal matrix.
    pub coordinated: bool,
    pub mask: TierMask,
}

/// Converged precoders plus the auxiliaries refreshed at them.
#[derive(Debug, Clone)]
pub struct WmmseOutcome {
    pub precoders: PrecoderSet,
    pub aux: Auxiliaries,
    pub sum_rate: f64,
    pub iterations: usize,
    pub rate_history: Vec<f64>,
    pub lambda_tbs: f64,
    pub lambda_sat: f64,
}

/// Slot sum-rate at the given precoders.
pub fn slot_sum_rate(
    eff: &EffectiveChannels,
    p: &PrecoderSet,
    noise_tbs: f64,
    noise_sat: f64,
) -> f64 {
    let s = compute_sinrs(eff, p, noise_tbs, noise_sat);
    average_sum_rate(std::slice::from_ref(&SinrSet {
        tbs: s.tbs,
        sat: s.sat,
    }))
    .average
}

/// Optimal equalizers `u = h w / T` and weights `w = 1/e` at the current
/// precoders.
pub fn update_auxiliaries(
    eff: &EffectiveChannels,
    p: &PrecoderSet,
    noise_tbs: f64,
    noise_sat: f64,
) -> Result<Auxiliaries> {
    let (t_tbs, t_sat) = received_totals(eff, p, noise_tbs, noise_sat);
    let mut eq_tbs = Vec::with_capacity(t_tbs.len());
    let mut weight_tbs = Vec::with_capacity(t_tbs.len());
    for (k, &t) in t_tbs.iter().enumerate() {
        let hw = eff.tbs_user[k].dot(&p.tbs[k]);
        let u = hw / t;
        let e = 1.0 - hw.norm_sqr() / t;
        if !(e > 0.0) || !e.is_finite() {
            return Err(SimError::NumericalBreakdown(format!(
                "nonpositive mse {e} at tbs user {k}"
            )));
        }
        eq_tbs.push(u);
        weight_tbs.push(1.0 / e);
    }
    let mut eq_sat = Vec::with_capacity(t_sat.len());
    let mut weight_sat = Vec::with_capacity(t_sat.len());
    for (l, &t) in t_sat.iter().enumerate() {
        let hw = eff.sat_user[l].dot(&p.sat[l]);
        let u = hw / t;
        let e = 1.0 - hw.norm_sqr() / t;
        if !(e > 0.0) || !e.is_finite() {
            return Err(SimError::NumericalBreakdown(format!(
                "nonpositive mse {e} at sat user {l}"
            )));
        }
        eq_sat.push(u);
        weight_sat.push(1.0 / e);
    }
    Ok(Auxiliaries {
        eq_tbs,
        eq_sat,
        weight_tbs,
        weight_sat,
    })
}

/// Lagrange multiplier so that `sum_k ||(A + lambda I)^-1 b_k||^2` meets the
/// power budget: 0 when the unregularized solution is already within budget
/// (pseudo-inverse on a singular `A`), otherwise the unique root found by
/// bisection on the monotone power curve.
pub fn bisection_power(a: &CMat, b_set: &[CVec], budget: f64, tol: f64) -> Result<f64> {
    if !(budget > 0.0) {
        return Err(SimError::invalid("budget", "must be > 0"));
    }
    if b_set.iter().all(|b| b.iter().all(|z| z.norm_sqr() == 0.0)) {
        return Ok(0.0);
    }
    let eig = a.clone().symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().fold(0.0f64, |m, &e| m.max(e));
    let cutoff = 1e-12 * max_eig.max(1e-300);
    // Transformed right-hand sides in the eigenbasis.
    let b_t: Vec<DVector<Complex64>> = b_set.iter().map(|b| eig.eigenvectors.ad_mul(b)).collect();
    let power_at = |lambda: f64| -> f64 {
        b_t.iter()
            .map(|bt| {
                bt.iter()
                    .zip(eig.eigenvalues.iter())
                    .map(|(c, &e)| {
                        let e = e.max(0.0);
                        if lambda == 0.0 && e <= cutoff {
                            // pseudo-inverse: drop the (near-)null space
                            0.0
                        } else {
                            c.norm_sqr() / ((e + lambda) * (e + lambda))
                        }
                    })
                    .sum::<f64>()
            })
            .sum()
    };

    if power_at(0.0) <= budget {
        return Ok(0.0);
    }
    let mut hi = 1.0f64;
    while power_at(hi) > budget {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(SimError::NumericalBreakdown(
                "bisection bracket diverged".into(),
            ));
        }
    }
    let mut lo = 0.0f64;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..64 {
        mid = 0.5 * (lo + hi);
        let pw = power_at(mid);
        if ((pw - budget) / budget).abs() <= tol {
            return Ok(mid);
        }
        if pw > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Hermitian solve of `(A + lambda I) x = b` with a small diagonal jitter
/// fallback when the factorization fails.
fn regularized_solve(a: &CMat, lambda: f64, b: &CVec) -> Result<CVec> {
    let n = a.nrows();
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] += Complex64::new(lambda, 0.0);
    }
    let scale = (0..n).map(|i| shifted[(i, i)].re.abs()).fold(1.0, f64::max);
    let mut jitter = 0.0;
    for _ in 0..8 {
        let mut m = shifted.clone();
        if jitter > 0.0 {
            for i in 0..n {
                m[(i, i)] += Complex64::new(jitter, 0.0);
            }
        }
        if let Some(chol) = m.cholesky() {
            return Ok(chol.solve(b));
        }
        jitter = if jitter == 0.0 {
            1e-12 * scale
        } else {
            jitter * 10.0
        };
    }
    Err(SimError::NumericalBreakdown(
        "hermitian factorization failed after jitter escalation".into(),
    ))
}

/// Weighted normal matrix and right-hand sides for one station.
///
/// `own` are the served users' effective rows, `leak` the cross-tier rows the
/// station interferes on (included when `coordinated`).
fn station_normal_equations(
    own: &[CVec],
    own_eq: &[Complex64],
    own_w: &[f64],
    leak: &[CVec],
    leak_eq: &[Complex64],
    leak_w: &[f64],
    coordinated: bool,
    dim: usize,
) -> (CMat, Vec<CVec>) {
    let mut a = CMat::zeros(dim, dim);
    // a += c * h^H h, with h stored as the row's entries.
    let mut accumulate = |h: &CVec, c: f64| {
        for m in 0..dim {
            let hm = h[m].conj();
            for n in 0..dim {
                a[(m, n)] += Complex64::new(c, 0.0) * hm * h[n];
            }
        }
    };
    for ((h, &u), &w) in own.iter().zip(own_eq).zip(own_w) {
        accumulate(h, w * u.norm_sqr());
    }
    if coordinated {
        for ((g, &u), &w) in leak.iter().zip(leak_eq).zip(leak_w) {
            accumulate(g, w * u.norm_sqr());
        }
    }
    let rhs: Vec<CVec> = own
        .iter()
        .zip(own_eq)
        .zip(own_w)
        .map(|((h, &u), &w)| h.map(|z| z.conj() * u * w))
        .collect();
    (a, rhs)
}

/// Closed-form precoder update for both stations at fixed auxiliaries.
/// Returns the precoders and the two multipliers.
pub fn solve_precoders(
    eff: &EffectiveChannels,
    aux: &Auxiliaries,
    opts: &WmmseOptions,
) -> Result<(PrecoderSet, f64, f64)> {
    let k = eff.tbs_user.len();
    let l = eff.sat_user.len();
    let m_b = eff
        .tbs_user
        .first()
        .map(|h| h.len())
        .or_else(|| eff.tbs_to_sat_user.first().map(|h| h.len()))
        .unwrap_or(0);
    let m_s = eff
        .sat_user
        .first()
        .map(|h| h.len())
        .or_else(|| eff.sat_to_tbs_user.first().map(|h| h.len()))
        .unwrap_or(0);

    let mut out = PrecoderSet::zeros(k, l, m_b, m_s);
    let mut lambda_tbs = 0.0;
    let mut lambda_sat = 0.0;

    if opts.mask.tbs && k > 0 {
        let (a, rhs) = station_normal_equations(
            &eff.tbs_user,
            &aux.eq_tbs,
            &aux.weight_tbs,
            &eff.tbs_to_sat_user,
            &aux.eq_sat,
            &aux.weight_sat,
            opts.coordinated,
            m_b,
        );
        lambda_tbs = bisection_power(&a, &rhs, opts.tbs_power, 1e-12)?;
        for (wk, b) in out.tbs.iter_mut().zip(&rhs) {
            *wk = regularized_solve(&a, lambda_tbs, b)?;
        }
    }
    if opts.mask.sat && l > 0 {
        let (a, rhs) = station_normal_equations(
            &eff.sat_user,
            &aux.eq_sat,
            &aux.weight_sat,
            &eff.sat_to_tbs_user,
            &aux.eq_tbs,
            &aux.weight_tbs,
            opts.coordinated,
            m_s,
        );
        lambda_sat = bisection_power(&a, &rhs, opts.sat_power, 1e-12)?;
        for (wl, b) in out.sat.iter_mut().zip(&rhs) {
            *wl = regularized_solve(&a, lambda_sat, b)?;
        }
    }
    for w in out.tbs.iter().chain(out.sat.iter()) {
        if !w.iter().all(|z| z.is_finite()) {
            return Err(SimError::NumericalBreakdown(
                "non-finite precoder entries".into(),
            ));
        }
    }
    Ok((out, lambda_tbs, lambda_sat))
}

/// Matched-filter warm start toward the direct links, scaled to the full
/// budget of each enabled station.
pub fn matched_filter_init(
    direct_tbs: &[CVec],
    direct_sat: &[CVec],
    opts: &WmmseOptions,
) -> PrecoderSet {
    let k = direct_tbs.len();
    let l = direct_sat.len();
    let scale_fill = |rows: &[CVec], budget: f64, enabled: bool| -> Vec<CVec> {
        if rows.is_empty() {
            return vec![];
        }
        let per = budget / rows.len() as f64;
        rows.iter()
            .map(|h| {
                let n = h.norm();
                if !enabled || n == 0.0 {
                    CVec::zeros(h.len())
                } else {
                    h.map(|z| z.conj() * (per.sqrt() / n))
                }
            })
            .collect()
    };
    PrecoderSet {
        tbs: scale_fill(direct_tbs, opts.tbs_power, opts.mask.tbs && k > 0),
        sat: scale_fill(direct_sat, opts.sat_power, opts.mask.sat && l > 0),
    }
}

/// Alternating optimization from `initial` until the slot sum-rate gain
/// drops below `opts.tol` or the iteration cap is reached. The returned
/// auxiliaries are refreshed at the final precoders.
pub fn wmmse_optimize(
    eff: &EffectiveChannels,
    initial: PrecoderSet,
    opts: &WmmseOptions,
) -> Result<WmmseOutcome> {
    let mut p = initial;
    let mut rate = slot_sum_rate(eff, &p, opts.noise_tbs, opts.noise_sat);
    let mut history = vec![rate];
    let mut lambda_tbs = 0.0;
    let mut lambda_sat = 0.0;
    let mut iterations = 0;
    for _ in 0..opts.max_iters {
        let aux = update_auxiliaries(eff, &p, opts.noise_tbs, opts.noise_sat)?;
        let (p_new, lb, ls) = solve_precoders(eff, &aux, opts)?;
        p = p_new;
        lambda_tbs = lb;
        lambda_sat = ls;
        let new_rate = slot_sum_rate(eff, &p, opts.noise_tbs, opts.noise_sat);
        iterations += 1;
        history.push(new_rate);
        let gain = (new_rate - rate).abs();
        rate = new_rate;
        if gain <= opts.tol {
            break;
        }
    }
    let aux = update_auxiliaries(eff, &p, opts.noise_tbs, opts.noise_sat)?;
    Ok(WmmseOutcome {
        precoders: p,
        aux,
        sum_rate: rate,
        iterations,
        rate_history: history,
        lambda_tbs,
        lambda_sat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn cplx(rng: &mut ChaCha12Rng) -> Complex64 {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn rvec(rng: &mut ChaCha12Rng, n: usize) -> CVec {
        DVector::from_fn(n, |_, _| cplx(rng))
    }

    fn opts(p_b: f64, p_s: f64, noise: f64) -> WmmseOptions {
        WmmseOptions {
            tbs_power: p_b,
            sat_power: p_s,
            noise_tbs: noise,
            noise_sat: noise,
            tol: 1e-6,
            max_iters: 200,
            coordinated: true,
            mask: TierMask::both(),
        }
    }

    fn single_user_eff(h: CVec) -> EffectiveChannels {
        EffectiveChannels {
            tbs_user: vec![h],
            sat_user: vec![],
            sat_to_tbs_user: vec![CVec::zeros(1)],
            tbs_to_sat_user: vec![],
        }
    }

    #[test]
    fn auxiliaries_at_zero_precoders() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let eff = single_user_eff(rvec(&mut rng, 4));
        let p = PrecoderSet::zeros(1, 0, 4, 1);
        let aux = update_auxiliaries(&eff, &p, 0.1, 0.1).unwrap();
        assert_eq!(aux.eq_tbs[0], Complex64::new(0.0, 0.0));
        assert!((aux.weight_tbs[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_equalizer_is_mmse() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let h = rvec(&mut rng, 3);
        let w = rvec(&mut rng, 3);
        let noise = 0.37;
        let eff = single_user_eff(h.clone());
        let p = PrecoderSet {
            tbs: vec![w.clone()],
            sat: vec![],
        };
        let aux = update_auxiliaries(&eff, &p, noise, noise).unwrap();
        let hw = h.dot(&w);
        let expect = hw / (hw.norm_sqr() + noise);
        assert!((aux.eq_tbs[0] - expect).norm() < 1e-14);
    }

    #[test]
    fn equalizer_channel_product_is_scale_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let h = rvec(&mut rng, 3);
        let w = rvec(&mut rng, 3);
        let noise = 0.0; // pure scaling check needs the noise to scale too
        let eff1 = single_user_eff(h.clone());
        let c = Complex64::new(1.7, -0.4);
        let eff2 = single_user_eff(h.map(|z| z * c));
        let p = PrecoderSet {
            tbs: vec![w.clone()],
            sat: vec![],
        };
        // With noise included the product |u h w| stays bounded by 1 and
        // increases toward 1 as the channel strengthens; at zero noise the
        // invariance |u h w| = 1 is exact.
        let _ = noise;
        let a1 = update_auxiliaries(&eff1, &p, 1e-9, 1e-9).unwrap();
        let a2 = update_auxiliaries(&eff2, &p, 1e-9 * c.norm_sqr(), 1e-9 * c.norm_sqr()).unwrap();
        let p1 = (a1.eq_tbs[0].conj() * eff1.tbs_user[0].dot(&p.tbs[0])).norm();
        let p2 = (a2.eq_tbs[0].conj() * eff2.tbs_user[0].dot(&p.tbs[0])).norm();
        assert!((p1 - p2).abs() < 1e-9, "{p1} vs {p2}");
    }

    #[test]
    fn bisection_identity_matrix_closed_form() {
        // power(l) = 4/(1+l)^2 = 1  =>  l = 1.
        let a = CMat::identity(2, 2);
        let b = vec![DVector::from_vec(vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])];
        let l = bisection_power(&a, &b, 1.0, 1e-10).unwrap();
        assert!((l - 1.0).abs() < 1e-8, "lambda {l}");
    }

    #[test]
    fn bisection_zero_rhs() {
        let a = CMat::identity(3, 3);
        let b = vec![CVec::zeros(3)];
        assert_eq!(bisection_power(&a, &b, 2.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn bisection_meets_budget_on_random_instances() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for trial in 0..30 {
            let n = 4;
            let g = CMat::from_fn(n, n, |_, _| cplx(&mut rng));
            let a = &g * g.adjoint(); // PSD
            let b: Vec<CVec> = (0..3).map(|_| rvec(&mut rng, n)).collect();
            let budget = rng.gen_range(0.1..5.0);
            let l = bisection_power(&a, &b, budget, 1e-10).unwrap();
            if l > 0.0 {
                // independent power evaluation through direct solves
                let mut shifted = a.clone();
                for i in 0..n {
                    shifted[(i, i)] += Complex64::new(l, 0.0);
                }
                let chol = shifted.cholesky().unwrap();
                let power: f64 = b.iter().map(|bb| chol.solve(bb).norm_squared()).sum();
                assert!(
                    ((power - budget) / budget).abs() < 1e-8,
                    "trial {trial}: power {power} vs {budget}"
                );
            }
        }
    }

    #[test]
    fn precoder_solve_residual() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let (k, l, mb, ms) = (3, 2, 5, 4);
        let eff = EffectiveChannels {
            tbs_user: (0..k).map(|_| rvec(&mut rng, mb)).collect(),
            sat_user: (0..l).map(|_| rvec(&mut rng, ms)).collect(),
            sat_to_tbs_user: (0..k).map(|_| rvec(&mut rng, ms)).collect(),
            tbs_to_sat_user: (0..l).map(|_| rvec(&mut rng, mb)).collect(),
        };
        let p0 = PrecoderSet {
            tbs: (0..k).map(|_| rvec(&mut rng, mb)).collect(),
            sat: (0..l).map(|_| rvec(&mut rng, ms)).collect(),
        };
        let o = opts(2.0, 3.0, 0.1);
        let aux = update_auxiliaries(&eff, &p0, 0.1, 0.1).unwrap();
        let (p, lb, _ls) = solve_precoders(&eff, &aux, &o).unwrap();

        // Rebuild the TBS normal equations independently and check residuals.
        let mut a = CMat::zeros(mb, mb);
        for (h, (&u, &w)) in eff
            .tbs_user
            .iter()
            .zip(aux.eq_tbs.iter().zip(&aux.weight_tbs))
        {
            let hc = h.map(|z| z.conj());
            a += hc.clone() * h.transpose() * Complex64::new(w * u.norm_sqr(), 0.0);
        }
        for (g, (&u, &w)) in eff
            .tbs_to_sat_user
            .iter()
            .zip(aux.eq_sat.iter().zip(&aux.weight_sat))
        {
            let gc = g.map(|z| z.conj());
            a += gc.clone() * g.transpose() * Complex64::new(w * u.norm_sqr(), 0.0);
        }
        for i in 0..mb {
            a[(i, i)] += Complex64::new(lb, 0.0);
        }
        for kk in 0..k {
            let b = eff.tbs_user[kk].map(|z| z.conj() * aux.eq_tbs[kk] * aux.weight_tbs[kk]);
            let r = (&a * &p.tbs[kk]) - b;
            assert!(r.norm() < 1e-9, "residual {}", r.norm());
        }
    }

    #[test]
    fn cross_terms_decouple_when_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let (k, l, mb, ms) = (2, 2, 4, 3);
        let eff = EffectiveChannels {
            tbs_user: (0..k).map(|_| rvec(&mut rng, mb)).collect(),
            sat_user: (0..l).map(|_| rvec(&mut rng, ms)).collect(),
            sat_to_tbs_user: vec![CVec::zeros(ms); k],
            tbs_to_sat_user: vec![CVec::zeros(mb); l],
        };
        let o = opts(2.0, 3.0, 0.05);
        let p0 = matched_filter_init(&eff.tbs_user, &eff.sat_user, &o);
        let aux = update_auxiliaries(&eff, &p0, o.noise_tbs, o.noise_sat).unwrap();
        let coordinated = solve_precoders(&eff, &aux, &o).unwrap();
        let mut o2 = o;
        o2.coordinated = false;
        let uncoordinated = solve_precoders(&eff, &aux, &o2).unwrap();
        for (a, b) in coordinated.0.tbs.iter().zip(&uncoordinated.0.tbs) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_user_converges_to_full_power_mrt() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let h = rvec(&mut rng, 6);
        let eff = single_user_eff(h.clone());
        let o = opts(2.5, 1.0, 1e-3);
        let p0 = matched_filter_init(&eff.tbs_user, &[], &o);
        let out = wmmse_optimize(&eff, p0, &o).unwrap();
        let w = &out.precoders.tbs[0];
        // Full power.
        assert!((w.norm_squared() - 2.5).abs() / 2.5 < 1e-6);
        // Parallel to conj(h) (stored-row convention for h^H).
        let hc = h.map(|z| z.conj());
        let cosine = w.dotc(&hc).norm() / (w.norm() * hc.norm());
        assert!(1.0 - cosine < 1e-6, "cosine {cosine}");
    }

    #[test]
    fn warm_started_fixed_point_stays_put() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let h = rvec(&mut rng, 4);
        let eff = single_user_eff(h);
        let o = opts(1.0, 1.0, 1e-4);
        let first = wmmse_optimize(
            &eff,
            matched_filter_init(&eff.tbs_user, &[], &o),
            &o,
        )
        .unwrap();
        let again = wmmse_optimize(&eff, first.precoders.clone(), &o).unwrap();
        assert!(again.iterations <= 2);
        let delta = (&again.precoders.tbs[0] - &first.precoders.tbs[0]).norm();
        assert!(delta < 1e-6, "moved {delta}");
    }

    #[test]
    fn orthogonal_channels_decouple_rates() {
        // Two users on orthogonal channels: converged per-user rates match
        // the single-user solutions with half the power each... they get the
        // full-power split that WMMSE chooses; compare against independent
        // single-user runs with the same per-user power.
        let g1 = 1.3;
        let g2 = 0.8;
        let eff = EffectiveChannels {
            tbs_user: vec![
                DVector::from_vec(vec![Complex64::new(g1, 0.0), Complex64::new(0.0, 0.0)]),
                DVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(g2, 0.0)]),
            ],
            sat_user: vec![],
            sat_to_tbs_user: vec![CVec::zeros(1), CVec::zeros(1)],
            tbs_to_sat_user: vec![],
        };
        let o = opts(2.0, 1.0, 0.01);
        let out = wmmse_optimize(
            &eff,
            matched_filter_init(&eff.tbs_user, &[], &o),
            &o,
        )
        .unwrap();
        // Orthogonality: converged precoders are near-orthogonal.
        let w1 = &out.precoders.tbs[0];
        let w2 = &out.precoders.tbs[1];
        let overlap = w1.dotc(w2).norm() / (w1.norm() * w2.norm());
        assert!(overlap < 1e-6, "overlap {overlap}");
        // Rates match the waterfilling split evaluated directly.
        let p1 = w1.norm_squared();
        let p2 = w2.norm_squared();
        let s = compute_sinrs(&eff, &out.precoders, o.noise_tbs, o.noise_sat);
        assert!((s.tbs[0] - g1 * g1 * p1 / 0.01).abs() / s.tbs[0] < 0.01);
        assert!((s.tbs[1] - g2 * g2 * p2 / 0.01).abs() / s.tbs[1] < 0.01);
    }

    #[test]
    fn sum_rate_is_monotone_and_power_feasible() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for _ in 0..10 {
            let (k, l, mb, ms) = (3, 2, 4, 4);
            let eff = EffectiveChannels {
                tbs_user: (0..k).map(|_| rvec(&mut rng, mb)).collect(),
                sat_user: (0..l).map(|_| rvec(&mut rng, ms)).collect(),
                sat_to_tbs_user: (0..k).map(|_| rvec(&mut rng, ms).map(|z| z * 0.1)).collect(),
                tbs_to_sat_user: (0..l).map(|_| rvec(&mut rng, mb).map(|z| z * 0.1)).collect(),
            };
            let o = opts(2.0, 1.5, 0.05);
            let out = wmmse_optimize(
                &eff,
                matched_filter_init(&eff.tbs_user, &eff.sat_user, &o),
                &o,
            )
            .unwrap();
            for w in out.rate_history.windows(2) {
                assert!(w[1] >= w[0] - 1e-9, "rate dropped: {} -> {}", w[0], w[1]);
            }
            assert!(out.precoders.tbs_power() <= 2.0 * (1.0 + 1e-8));
            assert!(out.precoders.sat_power() <= 1.5 * (1.0 + 1e-8));
            if out.lambda_tbs > 0.0 {
                assert!((out.precoders.tbs_power() - 2.0).abs() / 2.0 < 1e-6);
            }
            if out.lambda_sat > 0.0 {
                assert!((out.precoders.sat_power() - 1.5).abs() / 1.5 < 1e-6);
            }
            // Rate-MSE identity at the refreshed auxiliaries.
            let sum_log_w: f64 = out
                .aux
                .weight_tbs
                .iter()
                .chain(&out.aux.weight_sat)
                .map(|w| w.log2())
                .sum();
            assert!(
                (sum_log_w - out.sum_rate).abs() < 1e-8,
                "{sum_log_w} vs {}",
                out.sum_rate
            );
        }
    }

    #[test]
    fn stationarity_at_convergence() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let (k, l, mb, ms) = (2, 2, 4, 4);
        let eff = EffectiveChannels {
            tbs_user: (0..k).map(|_| rvec(&mut rng, mb)).collect(),
            sat_user: (0..l).map(|_| rvec(&mut rng, ms)).collect(),
            sat_to_tbs_user: (0..k).map(|_| rvec(&mut rng, ms).map(|z| z * 0.05)).collect(),
            tbs_to_sat_user: (0..l).map(|_| rvec(&mut rng, mb).map(|z| z * 0.05)).collect(),
        };
        let mut o = opts(1.0, 1.0, 0.02);
        o.tol = 1e-9;
        o.max_iters = 2000;
        let out = wmmse_optimize(
            &eff,
            matched_filter_init(&eff.tbs_user, &eff.sat_user, &o),
            &o,
        )
        .unwrap();
        let aux = update_auxiliaries(&eff, &out.precoders, o.noise_tbs, o.noise_sat).unwrap();
        let (p2, _, _) = solve_precoders(&eff, &aux, &o).unwrap();
        for (a, b) in out.precoders.tbs.iter().zip(&p2.tbs) {
            assert!((a - b).norm() < 10.0 * 1e-9 * a.norm().max(1.0) + 1e-6);
        }
    }

    #[test]
    fn disabled_tier_keeps_zero_precoders() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let eff = EffectiveChannels {
            tbs_user: vec![rvec(&mut rng, 3)],
            sat_user: vec![rvec(&mut rng, 3)],
            sat_to_tbs_user: vec![rvec(&mut rng, 3)],
            tbs_to_sat_user: vec![rvec(&mut rng, 3)],
        };
        let mut o = opts(1.0, 1.0, 0.1);
        o.mask = TierMask {
            tbs: true,
            sat: false,
        };
        let out = wmmse_optimize(
            &eff,
            matched_filter_init(&eff.tbs_user, &eff.sat_user, &o),
            &o,
        )
        .unwrap();
        assert!(out.precoders.sat[0].iter().all(|z| z.norm() == 0.0));
        assert!(out.precoders.tbs_power() > 0.0);
    }
}
