//! Sandwich harnesses: run a construction, check it, and report the bounds
//! it is supposed to sit between.

use serde::{Deserialize, Serialize};

pub use crate::measures::snap;

use super::{
    dilution_superchannel, distillation_superchannel, seppsc_certify, SeppscCertificate, Verdict,
};
use crate::channel::{random_separable_channel, swap_choi, BipartiteChannel};
use crate::error::{Error, Result};
use crate::linalg::{eigh, spectral_map};
use crate::measures::{
    diamond_distance, eh_maximize, smoothed_log_robustness, BoundKind, MeasureReport, RobustnessKind, SolverSettings,
    Structure, Value,
};

/// Largest Choi dimension for which the harnesses solve diamond-norm SDPs.
const DIAMOND_SDP_MAX_DIM: usize = 81;

/// `2^floor(f/2)`: the swap size distilled when `floor(E_H) = f`.
pub fn parity_k(f: u32) -> usize {
    1usize << (f / 2)
}

/// Output of [`cost_bound_harness`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostBounds {
    pub epsilon: f64,
    /// `LR_s^eps(N)`.
    pub lower: f64,
    /// `log K^2` of the construction.
    pub realized: f64,
    /// `LR_s^eps(N) + 2`.
    pub upper: f64,
    /// Standard robustness of the smoothed channel.
    pub robustness: f64,
    pub k: usize,
    /// Largest entry of `Theta[F^K] - N^eps`.
    pub simulation_residual: f64,
    /// `(1/2)||N^eps - N||_diamond`, when small enough to compute.
    pub target_distance: Option<f64>,
    /// Largest `tr(J^{F^K} J^E)` over the sampled separable probes.
    pub max_free_overlap: f64,
    pub certificate: SeppscCertificate,
    pub within_bounds: bool,
    pub reports: Vec<MeasureReport>,
}

/// Dilute `F^K` into the `eps`-smoothed channel with the standard
/// robustness decomposition, and check the construction on `probes`
/// random separable inputs.
pub fn cost_bound_harness(
    n: &BipartiteChannel,
    eps: f64,
    probes: usize,
    seed: u64,
    settings: &SolverSettings,
) -> Result<CostBounds> {
    let sm = smoothed_log_robustness(n, eps, RobustnessKind::Standard, Structure::Auto, settings)?;
    let r = sm.robustness.max(0.0);
    let k = (snap((1.0 + r).sqrt()).ceil() as usize).max(1);
    let target = sm.target.clone();
    let mix = sm.mix.clone().unwrap_or_else(|| target.clone());
    let theta = dilution_superchannel(&target, &mix, r, k)?;

    let out = theta.apply(&swap_choi(k))?;
    let simulation_residual = (out.choi() - target.choi()).iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut reports = vec![sm.report.clone()];
    let target_distance = if n.choi().nrows() <= DIAMOND_SDP_MAX_DIM && eps > 0.0 {
        let rep = diamond_distance(&target, n, settings)?;
        let v = rep.value.as_f64();
        reports.push(rep);
        Some(v)
    } else if eps == 0.0 {
        Some(0.0)
    } else {
        None
    };

    let mut max_free_overlap: f64 = 0.0;
    for i in 0..probes {
        let e = random_separable_channel(theta.slot_dims(), seed.wrapping_add(i as u64), 1 + i % 3)?;
        let p = theta.hit_probability(&e)?.unwrap_or(0.0);
        max_free_overlap = max_free_overlap.max(p);
    }
    let certificate = seppsc_certify(&theta, probes.max(1), 0.0, seed, settings)?;

    let lower = sm.value;
    let realized = 2.0 * (k as f64).log2();
    let upper = lower + 2.0;
    reports.push(MeasureReport {
        name: "dilution_cost".into(),
        value: Value::Finite(realized),
        bound_kind: BoundKind::UpperBoundViaSampling,
        epsilon: Some(eps),
        residuals: sm.report.residuals,
    });
    Ok(CostBounds {
        epsilon: eps,
        lower,
        realized,
        upper,
        robustness: r,
        k,
        simulation_residual,
        target_distance,
        max_free_overlap,
        within_bounds: realized >= lower - 1e-5 && realized <= upper + 1e-5,
        certificate,
        reports,
    })
}

/// Output of [`distill_bound_harness`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistillBounds {
    pub epsilon: f64,
    /// `E_H^eps(N)`.
    pub eh: f64,
    /// `E_H^{2 eps}(N)`, the upper bound.
    pub eh_double: f64,
    /// `floor(E_H^eps)` after snapping.
    pub floor: u32,
    pub k: usize,
    /// `log K^2`.
    pub realized: f64,
    /// `floor(E_H^eps)` when even, `E_H^eps - 1` when odd.
    pub lower: f64,
    /// `floor(E_H^eps) - 1` when odd; what the parity rule guarantees.
    pub lower_guaranteed: f64,
    /// `tr(q* (N (x) id)(psi*))`.
    pub hit_probability: f64,
    /// `(1/2)||Theta[N] - F^K||_diamond`.
    pub diamond_error: f64,
    /// Whether `diamond_error` came from the SDP or from the identity
    /// `(1/2)||Theta[N] - F^K||_diamond = 1 - hit_probability`.
    pub diamond_error_from_sdp: bool,
    /// Largest free acceptance `max_{M PPT} tr(q* (M (x) id)(psi*))`.
    pub free_acceptance: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub error_within_eps: bool,
    pub reports: Vec<MeasureReport>,
}

/// Distill `F^K` from `n` with the optimal test of `E_H^eps`, `K` from the
/// parity rule.
pub fn distill_bound_harness(
    n: &BipartiteChannel,
    eps: f64,
    restarts: usize,
    seed: u64,
    settings: &SolverSettings,
) -> Result<DistillBounds> {
    let at = eh_maximize(n, eps, restarts, seed, settings)?;
    let eh = at
        .value
        .finite()
        .ok_or_else(|| Error::Invalid("E_H^eps is infinite; no finite swap size to distill".into()))?;
    let double = if 2.0 * eps < 1.0 {
        eh_maximize(n, 2.0 * eps, restarts, seed, settings)?
    } else {
        return Err(Error::Invalid(format!("2 eps = {} must stay below 1", 2.0 * eps)));
    };
    let eh_double = double.value.as_f64();

    let floor = snap(eh).floor().max(0.0) as u32;
    let k = parity_k(floor);
    // Solver effects can leave [0, I] by roundoff.
    let (vals, vecs) = eigh(&at.effect);
    let effect = spectral_map(&vals, &vecs, |x| x.clamp(0.0, 1.0));
    let theta = distillation_superchannel(&at.psi, &effect, k, n.dims())?;
    let out = theta.apply(n)?;
    let hit_probability = theta.hit_probability(n)?.unwrap_or(1.0);
    let f = swap_choi(k);

    let mut reports = vec![at.report.clone(), double.report.clone()];
    let (diamond_error, from_sdp) = if k == 1 {
        (0.0, false)
    } else if f.choi().nrows() <= DIAMOND_SDP_MAX_DIM {
        let rep = diamond_distance(&out, &f, settings)?;
        let v = rep.value.as_f64();
        reports.push(rep);
        (v, true)
    } else {
        (1.0 - hit_probability.clamp(0.0, 1.0), false)
    };

    let realized = 2.0 * (k as f64).log2();
    let (lower, lower_guaranteed) =
        if floor % 2 == 0 { (floor as f64, floor as f64) } else { (eh - 1.0, floor as f64 - 1.0) };
    reports.push(MeasureReport {
        name: "distillation_yield".into(),
        value: Value::Finite(realized),
        bound_kind: BoundKind::Heuristic,
        epsilon: Some(eps),
        residuals: at.report.residuals,
    });
    Ok(DistillBounds {
        epsilon: eps,
        eh,
        eh_double,
        floor,
        k,
        realized,
        lower,
        lower_guaranteed,
        hit_probability,
        diamond_error,
        diamond_error_from_sdp: from_sdp,
        free_acceptance: at.free_acceptance,
        lower_holds: realized >= lower - 1e-5,
        upper_holds: realized <= eh_double + 1e-5,
        error_within_eps: diamond_error <= eps + 1e-6,
        reports,
    })
}

impl CostBounds {
    pub fn passed(&self) -> bool {
        self.within_bounds && self.simulation_residual <= 1e-7 && self.certificate.verdict == Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{identity_channel, swap_channel};

    #[test]
    fn parity_rule() {
        assert_eq!([0, 1, 2, 3, 4, 5].map(parity_k), [1, 1, 2, 2, 4, 4]);
    }

    #[test]
    fn swap_cost_sandwich() {
        let s = SolverSettings::default();
        let b = cost_bound_harness(&swap_channel(2).unwrap(), 0.0, 3, 1, &s).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-6 && b.k == 2 && (b.upper - 4.0).abs() < 1e-6);
        assert!(b.simulation_residual <= 1e-9);
        assert!(b.max_free_overlap <= 0.25 + 1e-9);
        assert_eq!(b.certificate.verdict, Verdict::Pass);
    }

    #[test]
    fn free_channel_cost_and_yield_vanish() {
        let s = SolverSettings::default();
        let id = identity_channel(2, 1).unwrap();
        let b = cost_bound_harness(&id, 0.0, 2, 1, &s).unwrap();
        assert_eq!(b.k, 1);
        assert!(b.lower.abs() < 1e-6 && b.realized == 0.0);
        let d = distill_bound_harness(&id, 0.0, 0, 1, &s).unwrap();
        assert_eq!(d.k, 1);
        assert!(d.eh.abs() < 1e-6);
    }

    #[test]
    fn swap_distills_itself() {
        let s = SolverSettings::default();
        let d = distill_bound_harness(&swap_channel(2).unwrap(), 0.0, 0, 1, &s).unwrap();
        assert!((d.eh - 2.0).abs() < 1e-6);
        assert_eq!(d.k, 2);
        assert!(d.diamond_error <= 1e-6);
        assert!(d.lower_holds && d.upper_holds);
    }
}
