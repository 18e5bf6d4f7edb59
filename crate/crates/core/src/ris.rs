//! RIS phase-shift optimization on the unit-modulus manifold.
//!
//! For fixed precoders and auxiliaries, each panel's phase subproblem is an
//! unconstrained quadratic `f(v) = v^H Q v - 2 Re{q^H v}` restricted to
//! `|v_i| = 1`: the total weighted MSE equals `f(v) + const`, where `Q`
//! collects the served tier's cascade outer products plus the cross-tier
//! leakage terms, and the linear part carries the desired-signal alignment
//! minus the leakage alignment. The solver is a conjugate-gradient descent in
//! the tangent space of the circle manifold with elementwise-normalization
//! retraction, vector transport by projection, a clamped Polak-Ribiere
//! coefficient, and Armijo backtracking.

use num_complex::Complex64;

use crate::channel::{cascade_row, CMat, CVec, ChannelSet};
use crate::error::{Result, SimError};
use crate::metrics::{Auxiliaries, PrecoderSet};

/// Armijo sufficient-decrease constant.
const ARMIJO_C: f64 = 1e-4;
/// Armijo contraction factor.
const ARMIJO_CONTRACTION: f64 = 0.5;
/// Maximum backtracking halvings per iteration.
const ARMIJO_MAX_BACKTRACKS: usize = 30;

/// Which panel a quadratic form belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisTier {
    Uav,
    Hap,
}

/// Hermitian-PSD quadratic `v^H Q v - 2 Re{q^H v}` plus the constant that
/// completes it to the total weighted MSE (kept for oracle checks).
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub q_mat: CMat,
    pub q_vec: CVec,
    pub constant: f64,
}

impl QuadraticForm {
    pub fn dim(&self) -> usize {
        self.q_vec.len()
    }

    /// Objective value at `v` (without the constant).
    pub fn eval(&self, v: &CVec) -> f64 {
        let qv = &self.q_mat * v;
        v.dotc(&qv).re - 2.0 * self.q_vec.dotc(v).re
    }

    /// Euclidean gradient `2 Q v - 2 q`.
    pub fn euclidean_gradient(&self, v: &CVec) -> CVec {
        let mut g = &self.q_mat * v;
        g -= &self.q_vec;
        g * Complex64::new(2.0, 0.0)
    }
}

/// Unit-modulus phase vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    v: CVec,
}

impl PhaseVector {
    /// Wraps a vector after checking every entry is unit-modulus (1e-9).
    pub fn new(v: CVec) -> Result<Self> {
        for (i, z) in v.iter().enumerate() {
            let m = z.norm();
            if (m - 1.0).abs() > 1e-9 {
                return Err(SimError::InvalidPhases {
                    index: i,
                    modulus: m,
                });
            }
        }
        Ok(Self { v })
    }

    pub fn all_ones(n: usize) -> Self {
        Self {
            v: CVec::from_element(n, Complex64::new(1.0, 0.0)),
        }
    }

    pub fn from_angles(angles: &[f64]) -> Self {
        Self {
            v: CVec::from_iterator(
                angles.len(),
                angles.iter().map(|&t| Complex64::from_polar(1.0, t)),
            ),
        }
    }

    pub fn as_vec(&self) -> &CVec {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Worst deviation of any entry from unit modulus.
    pub fn modulus_error(&self) -> f64 {
        self.v
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Projection of `x` onto the tangent space at `v`:
/// `x - Re{x o conj(v)} o v`.
fn project_tangent(x: &CVec, v: &CVec) -> CVec {
    CVec::from_iterator(
        x.len(),
        x.iter()
            .zip(v.iter())
            .map(|(&xi, &vi)| xi - vi * (xi * vi.conj()).re),
    )
}

/// Riemannian gradient at `v`: the tangent projection of the Euclidean one.
pub fn riemannian_gradient(qf: &QuadraticForm, v: &PhaseVector) -> CVec {
    let eg = qf.euclidean_gradient(&v.v);
    project_tangent(&eg, &v.v)
}

/// Moves along `direction` with `step`, renormalizes each entry back onto the
/// circle, and transports `prev_direction` to the new point.
pub fn retract_and_transport(
    v: &PhaseVector,
    step: f64,
    direction: &CVec,
    prev_direction: &CVec,
) -> Result<(PhaseVector, CVec)> {
    let mut new_v = CVec::zeros(v.len());
    for i in 0..v.len() {
        let moved = v.v[i] + direction[i] * step;
        let m = moved.norm();
        if m == 0.0 {
            return Err(SimError::RetractionSingularity(i));
        }
        new_v[i] = moved / m;
    }
    let transported = project_tangent(prev_direction, &new_v);
    Ok((PhaseVector { v: new_v }, transported))
}

/// Solver trace for one run.
#[derive(Debug, Clone)]
pub struct RcgReport {
    pub iterations: usize,
    pub objective_history: Vec<f64>,
    pub final_gradient_norm: f64,
    pub converged: bool,
}

/// Minimizes the quadratic on the circle manifold starting from `v0`.
///
/// Stops when the Riemannian gradient norm drops below `tol` or after
/// `max_iters` iterations; the objective never increases.
pub fn rcg_minimize(
    qf: &QuadraticForm,
    v0: &PhaseVector,
    tol: f64,
    max_iters: usize,
) -> Result<(PhaseVector, RcgReport)> {
    if qf.q_mat.nrows() != v0.len() || qf.q_vec.len() != v0.len() {
        return Err(SimError::DimensionMismatch(format!(
            "quadratic dim {} vs phase vector {}",
            qf.q_vec.len(),
            v0.len()
        )));
    }
    let mut v = v0.clone();
    let mut f = qf.eval(&v.v);
    let mut grad = riemannian_gradient(qf, &v);
    let mut grad_sq = grad.dotc(&grad).re;
    let mut dir: CVec = -grad.clone();
    let mut history = vec![f];
    let mut iterations = 0;
    let mut converged = grad_sq.sqrt() <= tol;

    while !converged && iterations < max_iters {
        let mut slope = grad.dotc(&dir).re;
        if slope >= 0.0 {
            // Not a descent direction; restart with steepest descent.
            dir = -grad.clone();
            slope = -grad_sq;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..ARMIJO_MAX_BACKTRACKS {
            match retract_and_transport(&v, step, &dir, &dir) {
                Ok((cand, transported_dir)) => {
                    let f_cand = qf.eval(cand.as_vec());
                    if f_cand <= f + ARMIJO_C * step * slope {
                        accepted = Some((cand, transported_dir, f_cand));
                        break;
                    }
                }
                Err(SimError::RetractionSingularity(_)) => {}
                Err(e) => return Err(e),
            }
            step *= ARMIJO_CONTRACTION;
        }
        let Some((v_new, transported_dir, f_new)) = accepted else {
            break; // no decrease possible at this scale
        };
        let grad_new = riemannian_gradient(qf, &v_new);
        let grad_new_sq = grad_new.dotc(&grad_new).re;
        // Polak-Ribiere with the transported previous gradient, clamped at
        // zero (restart to steepest descent when negative).
        let transported_grad = project_tangent(&grad, v_new.as_vec());
        let beta = if grad_sq > 0.0 {
            ((grad_new_sq - grad_new.dotc(&transported_grad).re) / grad_sq).max(0.0)
        } else {
            0.0
        };
        dir = transported_dir * Complex64::new(beta, 0.0) - &grad_new;
        v = v_new;
        f = f_new;
        grad = grad_new;
        grad_sq = grad_new_sq;
        history.push(f);
        iterations += 1;
        converged = grad_sq.sqrt() <= tol;
    }

    Ok((
        v,
        RcgReport {
            iterations,
            objective_history: history,
            final_gradient_norm: grad_sq.sqrt(),
            converged,
        },
    ))
}

/// Everything the quadratic assembly needs besides the channels.
#[derive(Debug, Clone, Copy)]
pub struct AssemblyContext<'a> {
    pub aux: &'a Auxiliaries,
    /// Frozen phases of the other panel (enter the constant terms).
    pub frozen_uav: &'a CVec,
    pub frozen_hap: &'a CVec,
    pub noise_tbs: f64,
    pub noise_sat: f64,
    pub cross_tier: bool,
}

/// Builds the per-tier quadratic so that `f(v) + constant` equals the total
/// weighted MSE with the other panel frozen.
pub fn assemble_quadratic(
    tier: RisTier,
    cs: &ChannelSet,
    p: &PrecoderSet,
    ctx: &AssemblyContext,
) -> Result<QuadraticForm> {
    let inputs = match tier {
        RisTier::Uav => TierInputs {
            dim: cs.tbs_to_uav.nrows(),
            served_elems: &cs.uav_to_user,
            served_direct: &cs.tbs_to_user,
            streams: &p.tbs,
            served_eq: &ctx.aux.eq_tbs,
            served_weight: &ctx.aux.weight_tbs,
            panel: &cs.tbs_to_uav,
            leak_elems: &cs.uav_to_sat_user,
            leak_direct: &cs.tbs_to_sat_user,
            leak_eq: &ctx.aux.eq_sat,
            leak_weight: &ctx.aux.weight_sat,
            leak_own_rows: frozen_rows(
                &cs.sat_to_user,
                &cs.hap_to_user,
                &cs.sat_to_hap,
                ctx.frozen_hap,
            ),
            leak_own_streams: &p.sat,
            served_cross_rows: frozen_cross(
                &cs.sat_to_tbs_user,
                &cs.hap_to_tbs_user,
                &cs.sat_to_hap,
                ctx.frozen_hap,
                ctx.cross_tier,
            ),
            served_noise: ctx.noise_tbs,
            leak_noise: ctx.noise_sat,
        },
        RisTier::Hap => TierInputs {
            dim: cs.sat_to_hap.nrows(),
            served_elems: &cs.hap_to_user,
            served_direct: &cs.sat_to_user,
            streams: &p.sat,
            served_eq: &ctx.aux.eq_sat,
            served_weight: &ctx.aux.weight_sat,
            panel: &cs.sat_to_hap,
            leak_elems: &cs.hap_to_tbs_user,
            leak_direct: &cs.sat_to_tbs_user,
            leak_eq: &ctx.aux.eq_tbs,
            leak_weight: &ctx.aux.weight_tbs,
            leak_own_rows: frozen_rows(
                &cs.tbs_to_user,
                &cs.uav_to_user,
                &cs.tbs_to_uav,
                ctx.frozen_uav,
            ),
            leak_own_streams: &p.tbs,
            served_cross_rows: frozen_cross(
                &cs.tbs_to_sat_user,
                &cs.uav_to_sat_user,
                &cs.tbs_to_uav,
                ctx.frozen_uav,
                ctx.cross_tier,
            ),
            served_noise: ctx.noise_sat,
            leak_noise: ctx.noise_tbs,
        },
    };
    assemble_tier(inputs, ctx.cross_tier)
}

/// Effective rows of a frozen tier (direct + cascade at frozen phases).
fn frozen_rows(direct: &[CVec], elems: &[CVec], panel: &CMat, phases: &CVec) -> Vec<CVec> {
    direct
        .iter()
        .zip(elems)
        .map(|(d, e)| d + cascade_row(e, panel, phases))
        .collect()
}

fn frozen_cross(
    direct: &[CVec],
    elems: &[CVec],
    panel: &CMat,
    phases: &CVec,
    cross_tier: bool,
) -> Vec<CVec> {
    if cross_tier {
        frozen_rows(direct, elems, panel, phases)
    } else {
        direct.iter().map(|d| CVec::zeros(d.len())).collect()
    }
}

/// Inputs of one tier's assembly. "Served" quantities belong to the panel's
/// own station; "leak" quantities describe the other tier's users receiving
/// this station's streams through the panel.
struct TierInputs<'a> {
    dim: usize,
    served_elems: &'a [CVec],
    served_direct: &'a [CVec],
    streams: &'a [CVec],
    served_eq: &'a [Complex64],
    served_weight: &'a [f64],
    panel: &'a CMat,
    leak_elems: &'a [CVec],
    leak_direct: &'a [CVec],
    leak_eq: &'a [Complex64],
    leak_weight: &'a [f64],
    /// Frozen own-tier effective rows of the leakage users.
    leak_own_rows: Vec<CVec>,
    leak_own_streams: &'a [CVec],
    /// Frozen cross-tier interference rows at the served users.
    served_cross_rows: Vec<CVec>,
    served_noise: f64,
    leak_noise: f64,
}

fn assemble_tier(t: TierInputs, cross_tier: bool) -> Result<QuadraticForm> {
    if t.served_elems.len() != t.served_direct.len()
        || t.served_elems.len() != t.served_eq.len()
        || t.served_elems.len() != t.streams.len()
    {
        return Err(SimError::DimensionMismatch(
            "served-tier channel/aux lengths differ".into(),
        ));
    }
    let dim = t.dim;
    let mut q_mat = CMat::zeros(dim, dim);
    let mut q_vec = CVec::zeros(dim);
    let mut constant = 0.0;

    // Panel responses of each stream, shared across users.
    let panel_streams: Vec<CVec> = t.streams.iter().map(|w| t.panel * w).collect();

    let add_outer = |q_mat: &mut CMat, b: &CVec, c: f64| {
        for m in 0..dim {
            let bm = b[m] * c;
            for n in 0..dim {
                q_mat[(m, n)] += bm * b[n].conj();
            }
        }
    };

    // Served users: their MSE depends on v through every own-tier stream.
    for (k, elem) in t.served_elems.iter().enumerate() {
        let u = t.served_eq[k];
        let w = t.served_weight[k];
        let wu2 = w * u.norm_sqr();
        let mut const_k = 0.0;
        for (i, ps) in panel_streams.iter().enumerate() {
            // cascade_i(v) = b^H v with b = elem o conj(panel w_i).
            let b = CVec::from_iterator(
                dim,
                elem.iter().zip(ps.iter()).map(|(&e, &x)| e * x.conj()),
            );
            let c = t.served_direct[k].dot(&t.streams[i]);
            add_outer(&mut q_mat, &b, wu2);
            let coeff = if i == k {
                u * w - Complex64::new(wu2, 0.0) * c
            } else {
                -Complex64::new(wu2, 0.0) * c
            };
            for m in 0..dim {
                q_vec[m] += coeff * b[m];
            }
            const_k += wu2 * c.norm_sqr();
            if i == k {
                const_k += w * (1.0 - 2.0 * (u.conj() * c).re);
            }
        }
        // Frozen cross-tier interference plus noise.
        let mut x_k = t.served_noise;
        if cross_tier {
            for ws in t.leak_own_streams {
                x_k += t.served_cross_rows[k].dot(ws).norm_sqr();
            }
        }
        const_k += wu2 * x_k;
        constant += const_k;
    }

    // Leakage users: only their interference term depends on v; their own
    // frozen MSE pieces land in the constant so that f + constant remains
    // the total weighted MSE.
    for (l, elem) in t.leak_elems.iter().enumerate() {
        let u = t.leak_eq[l];
        let w = t.leak_weight[l];
        let wu2 = w * u.norm_sqr();
        let mut const_l = 0.0;
        if cross_tier {
            for (i, ps) in panel_streams.iter().enumerate() {
                let b = CVec::from_iterator(
                    dim,
                    elem.iter().zip(ps.iter()).map(|(&e, &x)| e * x.conj()),
                );
                let c = t.leak_direct[l].dot(&t.streams[i]);
                add_outer(&mut q_mat, &b, wu2);
                for m in 0..dim {
                    q_vec[m] -= Complex64::new(wu2, 0.0) * c * b[m];
                }
                const_l += wu2 * c.norm_sqr();
            }
        }
        let mut own = t.leak_noise;
        for (j, ws) in t.leak_own_streams.iter().enumerate() {
            let hw = t.leak_own_rows[l].dot(ws);
            own += hw.norm_sqr();
            if j == l {
                const_l += w * (1.0 - 2.0 * (u.conj() * hw).re);
            }
        }
        const_l += wu2 * own;
        constant += const_l;
    }

    Ok(QuadraticForm {
        q_mat,
        q_vec,
        constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::compose_effective_channels;
    use crate::metrics::weighted_mse;
    use crate::scenario::Position3D;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    fn cplx(rng: &mut ChaCha12Rng) -> Complex64 {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn rvec(rng: &mut ChaCha12Rng, n: usize) -> CVec {
        CVec::from_fn(n, |_, _| cplx(rng))
    }

    fn unit(rng: &mut ChaCha12Rng, n: usize) -> PhaseVector {
        PhaseVector::from_angles(
            &(0..n)
                .map(|_| rng.gen_range(0.0..2.0 * PI))
                .collect::<Vec<_>>(),
        )
    }

    /// Small dense channel set for algebra tests; positions are irrelevant.
    fn toy_channels(rng: &mut ChaCha12Rng, k: usize, l: usize) -> (ChannelSet, PrecoderSet) {
        let (mb, ms, nu, nh) = (3, 3, 4, 5);
        let cs = ChannelSet {
            tbs_to_user: (0..k).map(|_| rvec(rng, mb)).collect(),
            tbs_to_uav: CMat::from_fn(nu, mb, |_, _| cplx(rng)),
            uav_to_user: (0..k).map(|_| rvec(rng, nu)).collect(),
            sat_to_user: (0..l).map(|_| rvec(rng, ms)).collect(),
            sat_to_hap: CMat::from_fn(nh, ms, |_, _| cplx(rng)),
            hap_to_user: (0..l).map(|_| rvec(rng, nh)).collect(),
            sat_to_tbs_user: (0..k).map(|_| rvec(rng, ms)).collect(),
            hap_to_tbs_user: (0..k).map(|_| rvec(rng, nh)).collect(),
            tbs_to_sat_user: (0..l).map(|_| rvec(rng, mb)).collect(),
            uav_to_sat_user: (0..l).map(|_| rvec(rng, nu)).collect(),
            rain_tbs_user: vec![1.0; k],
            rain_sat_user: vec![1.0; l],
            uav_pos: Position3D::new(0.0, 0.0, 100.0),
            hap_pos: Position3D::new(0.0, 0.0, 20_000.0),
        };
        let p = PrecoderSet {
            tbs: (0..k).map(|_| rvec(rng, mb)).collect(),
            sat: (0..l).map(|_| rvec(rng, ms)).collect(),
        };
        (cs, p)
    }

    fn random_aux(rng: &mut ChaCha12Rng, k: usize, l: usize) -> Auxiliaries {
        Auxiliaries {
            eq_tbs: (0..k).map(|_| cplx(rng)).collect(),
            eq_sat: (0..l).map(|_| cplx(rng)).collect(),
            weight_tbs: (0..k).map(|_| rng.gen_range(0.5..3.0)).collect(),
            weight_sat: (0..l).map(|_| rng.gen_range(0.5..3.0)).collect(),
        }
    }

    /// Total weighted MSE (sum of w*e) at the given phase vectors.
    fn total_weighted_mse(
        cs: &ChannelSet,
        p: &PrecoderSet,
        aux: &Auxiliaries,
        vu: &CVec,
        vh: &CVec,
        cross: bool,
    ) -> f64 {
        let eff = compose_effective_channels(cs, vu, vh, true, cross).unwrap();
        let m = weighted_mse(&eff, p, aux, 0.05, 0.07);
        m.mse_tbs
            .iter()
            .zip(&aux.weight_tbs)
            .chain(m.mse_sat.iter().zip(&aux.weight_sat))
            .map(|(&e, &w)| w * e)
            .sum()
    }

    #[test]
    fn zero_precoders_give_zero_quadratic() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let (cs, _) = toy_channels(&mut rng, 2, 2);
        let p = PrecoderSet::zeros(2, 2, 3, 3);
        let aux = random_aux(&mut rng, 2, 2);
        let vu = CVec::from_element(4, Complex64::new(1.0, 0.0));
        let vh = CVec::from_element(5, Complex64::new(1.0, 0.0));
        let ctx = AssemblyContext {
            aux: &aux,
            frozen_uav: &vu,
            frozen_hap: &vh,
            noise_tbs: 0.05,
            noise_sat: 0.07,
            cross_tier: true,
        };
        let qf = assemble_quadratic(RisTier::Uav, &cs, &p, &ctx).unwrap();
        assert!(qf.q_mat.iter().all(|z| z.norm() == 0.0));
        assert!(qf.q_vec.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn quadratic_matches_weighted_mse_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for trial in 0..20 {
            let (k, l) = (2, 2);
            let (cs, p) = toy_channels(&mut rng, k, l);
            let aux = random_aux(&mut rng, k, l);
            let vu0 = unit(&mut rng, 4);
            let vh0 = unit(&mut rng, 5);
            for (tier, dim) in [(RisTier::Uav, 4usize), (RisTier::Hap, 5usize)] {
                let ctx = AssemblyContext {
                    aux: &aux,
                    frozen_uav: vu0.as_vec(),
                    frozen_hap: vh0.as_vec(),
                    noise_tbs: 0.05,
                    noise_sat: 0.07,
                    cross_tier: true,
                };
                let qf = assemble_quadratic(tier, &cs, &p, &ctx).unwrap();
                for _ in 0..5 {
                    let v = unit(&mut rng, dim);
                    let (vu, vh) = match tier {
                        RisTier::Uav => (v.as_vec().clone(), vh0.as_vec().clone()),
                        RisTier::Hap => (vu0.as_vec().clone(), v.as_vec().clone()),
                    };
                    let mse = total_weighted_mse(&cs, &p, &aux, &vu, &vh, true);
                    let f = qf.eval(v.as_vec()) + qf.constant;
                    assert!(
                        (f - mse).abs() <= 1e-8 * mse.abs().max(1.0),
                        "trial {trial}: f+c = {f} vs mse {mse}"
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_matches_mse_without_cross_tier() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let (cs, p) = toy_channels(&mut rng, 2, 2);
        let aux = random_aux(&mut rng, 2, 2);
        let vu0 = unit(&mut rng, 4);
        let vh0 = unit(&mut rng, 5);
        let ctx = AssemblyContext {
            aux: &aux,
            frozen_uav: vu0.as_vec(),
            frozen_hap: vh0.as_vec(),
            noise_tbs: 0.05,
            noise_sat: 0.07,
            cross_tier: false,
        };
        let qf = assemble_quadratic(RisTier::Uav, &cs, &p, &ctx).unwrap();
        let v = unit(&mut rng, 4);
        let mse = total_weighted_mse(&cs, &p, &aux, v.as_vec(), vh0.as_vec(), false);
        let f = qf.eval(v.as_vec()) + qf.constant;
        assert!((f - mse).abs() <= 1e-8 * mse.abs().max(1.0), "{f} vs {mse}");
    }

    #[test]
    fn quadratic_kernel_is_psd() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..10 {
            let (cs, p) = toy_channels(&mut rng, 2, 2);
            let aux = random_aux(&mut rng, 2, 2);
            let vu = unit(&mut rng, 4);
            let vh = unit(&mut rng, 5);
            let ctx = AssemblyContext {
                aux: &aux,
                frozen_uav: vu.as_vec(),
                frozen_hap: vh.as_vec(),
                noise_tbs: 0.05,
                noise_sat: 0.07,
                cross_tier: true,
            };
            for tier in [RisTier::Uav, RisTier::Hap] {
                let qf = assemble_quadratic(tier, &cs, &p, &ctx).unwrap();
                let asym = (&qf.q_mat - qf.q_mat.adjoint()).norm();
                assert!(asym < 1e-10, "asym {asym}");
                let eigs = qf.q_mat.clone().symmetric_eigen().eigenvalues;
                let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(min >= -1e-9, "min eig {min}");
            }
        }
    }

    #[test]
    fn gradient_vanishes_at_manifold_minimizer() {
        // Q = I with unit-modulus q: the unconstrained minimizer v = q lies
        // on the manifold, so the Riemannian gradient is zero there.
        let n = 6;
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let q_vec = unit(&mut rng, n).as_vec().clone();
        let qf = QuadraticForm {
            q_mat: CMat::identity(n, n),
            q_vec: q_vec.clone(),
            constant: 0.0,
        };
        let v = PhaseVector::new(q_vec).unwrap();
        let g = riemannian_gradient(&qf, &v);
        assert!(g.norm() < 1e-12);
    }

    #[test]
    fn gradient_is_tangent() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 5;
            let g = CMat::from_fn(n, n, |_, _| cplx(&mut rng));
            let qf = QuadraticForm {
                q_mat: &g * g.adjoint(),
                q_vec: rvec(&mut rng, n),
                constant: 0.0,
            };
            let v = unit(&mut rng, n);
            let grad = riemannian_gradient(&qf, &v);
            for (gi, vi) in grad.iter().zip(v.as_vec().iter()) {
                assert!((gi * vi.conj()).re.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        for _ in 0..10 {
            let n = 5;
            let g = CMat::from_fn(n, n, |_, _| cplx(&mut rng));
            let qf = QuadraticForm {
                q_mat: &g * g.adjoint(),
                q_vec: rvec(&mut rng, n),
                constant: 0.0,
            };
            let v = unit(&mut rng, n);
            let grad = riemannian_gradient(&qf, &v);
            let norm_sq = grad.dotc(&grad).re;
            if norm_sq < 1e-6 {
                continue;
            }
            let eps = 1e-6;
            let (ve, _) = retract_and_transport(&v, eps, &grad, &grad).unwrap();
            let fd = (qf.eval(ve.as_vec()) - qf.eval(v.as_vec())) / eps;
            assert!(
                (fd - norm_sq).abs() / norm_sq < 1e-4,
                "fd {fd} vs {norm_sq}"
            );
        }
    }

    #[test]
    fn retraction_properties() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 6;
        let v = unit(&mut rng, n);
        let d = rvec(&mut rng, n);
        let tangent = project_tangent(&d, v.as_vec());

        let (v0, _) = retract_and_transport(&v, 0.0, &tangent, &tangent).unwrap();
        assert_eq!(v0.as_vec(), v.as_vec());

        let (vn, t) = retract_and_transport(&v, 0.7, &tangent, &tangent).unwrap();
        assert!(vn.modulus_error() < 1e-12);
        for (ti, vi) in t.iter().zip(vn.as_vec().iter()) {
            assert!((ti * vi.conj()).re.abs() < 1e-12);
        }
    }

    #[test]
    fn rcg_reaches_separable_optimum() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for _ in 0..10 {
            let n = 8;
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
            let q_vec = rvec(&mut rng, n);
            let qf = QuadraticForm {
                q_mat: CMat::from_fn(n, n, |i, j| {
                    if i == j {
                        Complex64::new(diag[i], 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }),
                q_vec: q_vec.clone(),
                constant: 0.0,
            };
            // Diagonal Q is constant on the manifold; the optimum aligns each
            // entry with q: f* = sum(diag) - 2 sum |q_i|.
            let f_star: f64 =
                diag.iter().sum::<f64>() - 2.0 * q_vec.iter().map(|z| z.norm()).sum::<f64>();
            let v0 = unit(&mut rng, n);
            let (v, report) = rcg_minimize(&qf, &v0, 1e-9, 500).unwrap();
            let f = qf.eval(v.as_vec());
            assert!(
                (f - f_star).abs() < 1e-6,
                "f {f} vs {f_star} after {} iters",
                report.iterations
            );
        }
    }

    #[test]
    fn rcg_beats_two_element_grid() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..5 {
            let g = CMat::from_fn(2, 2, |_, _| cplx(&mut rng));
            let qf = QuadraticForm {
                q_mat: &g * g.adjoint(),
                q_vec: rvec(&mut rng, 2),
                constant: 0.0,
            };
            let mut grid_best = f64::INFINITY;
            for a in 0..360 {
                for b in 0..360 {
                    let v = PhaseVector::from_angles(&[
                        (a as f64).to_radians(),
                        (b as f64).to_radians(),
                    ]);
                    grid_best = grid_best.min(qf.eval(v.as_vec()));
                }
            }
            let (v, _) = rcg_minimize(&qf, &PhaseVector::all_ones(2), 1e-10, 1000).unwrap();
            let f = qf.eval(v.as_vec());
            assert!(f <= grid_best + 1e-3, "rcg {f} vs grid {grid_best}");
        }
    }

    #[test]
    fn rcg_fixed_point_at_optimum() {
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let n = 6;
        let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let q_vec = rvec(&mut rng, n);
        let qf = QuadraticForm {
            q_mat: CMat::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(diag[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
            q_vec: q_vec.clone(),
            constant: 0.0,
        };
        let v_star = PhaseVector::new(CVec::from_iterator(
            n,
            q_vec.iter().map(|z| z / z.norm()),
        ))
        .unwrap();
        let (v, report) = rcg_minimize(&qf, &v_star, 1e-8, 100).unwrap();
        assert!(report.iterations <= 1);
        assert!((v.as_vec() - v_star.as_vec()).norm() < 1e-8);
    }

    #[test]
    fn rcg_monotone_and_on_manifold() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = 7;
            let g = CMat::from_fn(n, n, |_, _| cplx(&mut rng));
            let qf = QuadraticForm {
                q_mat: &g * g.adjoint(),
                q_vec: rvec(&mut rng, n),
                constant: 0.0,
            };
            let (v, report) = rcg_minimize(&qf, &unit(&mut rng, n), 1e-8, 300).unwrap();
            assert!(v.modulus_error() <= 1e-10);
            for w in report.objective_history.windows(2) {
                assert!(w[1] <= w[0] + 1e-10);
            }
        }
    }

    #[test]
    fn objective_is_not_phase_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let n = 4;
        let g = CMat::from_fn(n, n, |_, _| cplx(&mut rng));
        let qf = QuadraticForm {
            q_mat: &g * g.adjoint(),
            q_vec: rvec(&mut rng, n),
            constant: 0.0,
        };
        let v = unit(&mut rng, n);
        let f0 = qf.eval(v.as_vec());
        let mut max_dev: f64 = 0.0;
        for theta in [0.5, 1.0, 2.0] {
            let rot = Complex64::from_polar(1.0, theta);
            let vr = v.as_vec().map(|z| z * rot);
            max_dev = max_dev.max((qf.eval(&vr) - f0).abs());
        }
        assert!(max_dev > 1e-9, "quadratic unexpectedly phase invariant");
    }
}
