//! Dilution, distillation and catalytic dilution superchannels.

use serde::{Deserialize, Serialize};

use super::{Superchannel, Test};
use crate::channel::{swap_choi, BipartiteChannel};
use crate::error::{Error, Result};
use crate::linalg::{c, identity, DensityOperator};
use crate::measures::{
    catalytic_smoothed_log_robustness, robustness_with, smoothed_log_robustness, BoundKind, MeasureReport,
    RobustnessKind, SolverSettings, Structure, Value,
};

/// Premise tolerance on the PPT test of the dilution decomposition.
const PREMISE_TOL: f64 = 1e-7;

/// Channel with Choi matrix `(I - J^{F^K})/(K^4 - 1)`: the isotropic
/// Choi state with no weight on `J^{F^K}`, hence separable. For `k = 1`
/// the trivial channel.
pub fn garbage_channel(k: usize) -> Result<BipartiteChannel> {
    if k == 0 {
        return Err(Error::Dimension("k must be positive".into()));
    }
    let f = swap_choi(k);
    if k == 1 {
        return Ok(f);
    }
    let n = k.pow(4);
    let choi = (identity(n) - f.choi()) * c(1.0 / (n as f64 - 1.0), 0.0);
    Ok(BipartiteChannel::new(choi, [k; 4])?.with_certified_separable(true))
}

fn ceil_snapped(x: f64) -> usize {
    super::snap(x).ceil().max(1.0) as usize
}

/// Superchannel that turns `F^k` into `target`:
///
/// ```text
/// Theta[E] = tr(J^{F^k} J^E) target + tr((I - J^{F^k}) J^E) mix.
/// ```
///
/// Requires `(target + r mix)/(1 + r)` and `mix` to be PPT and
/// `k >= ceil(sqrt(1 + r))`, so that every PPT input is sent to a PPT
/// channel.
pub fn dilution_superchannel(target: &BipartiteChannel, mix: &BipartiteChannel, r: f64, k: usize) -> Result<Superchannel> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Invalid(format!("robustness {r} must be finite and non-negative")));
    }
    let need = ceil_snapped((1.0 + r).sqrt());
    if k < need {
        return Err(Error::Invalid(format!("k = {k} is below ceil(sqrt(1 + r)) = {need}")));
    }
    if r > 0.0 {
        let free = mix.mix(target, r / (1.0 + r))?;
        let flag = free.is_ppt();
        if flag.min_eigenvalue < -PREMISE_TOL {
            return Err(Error::Invalid(format!(
                "(target + r mix)/(1 + r) is not PPT (min eigenvalue {:.3e})",
                flag.min_eigenvalue
            )));
        }
        let flag = mix.is_ppt();
        if flag.min_eigenvalue < -PREMISE_TOL {
            return Err(Error::Invalid(format!("mixing channel is not PPT (min eigenvalue {:.3e})", flag.min_eigenvalue)));
        }
    }
    let effect = swap_choi(k).choi().clone();
    Superchannel::measure_and_prepare(Test::Choi { effect }, target.clone(), mix.clone(), [k; 4])
}

/// Superchannel that turns a channel `N` with
/// `tr(q (N (x) id)(psi)) >= 1 - eps` into a channel `eps`-close to `F^k`:
///
/// ```text
/// Theta[E] = tr(q (E (x) id)(psi)) F^k + tr((I - q) (E (x) id)(psi)) G^k
/// ```
///
/// with `G^k` the [`garbage_channel`].
pub fn distillation_superchannel(
    psi_star: &DensityOperator,
    q_star: &crate::linalg::ComplexMatrix,
    k: usize,
    slot_dims: [usize; 4],
) -> Result<Superchannel> {
    let hit = swap_choi(k);
    let miss = if k == 1 { hit.clone() } else { garbage_channel(k)? };
    let test = Test::Probe { psi: psi_star.clone(), effect: q_star.clone() };
    Superchannel::measure_and_prepare(test, hit, miss, slot_dims)
}

/// The two sides of the catalytic cost bound for a catalyst of size `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalysisBounds {
    /// `LR^eps(N (x) F^L)`.
    pub lr_eps: f64,
    /// `LR^{eps'}(N (x) F^L)`.
    pub lr_eps_prime: f64,
    /// `LR^eps(N (x) F^L) - log L^2 - log(1 + delta)`.
    pub lower: f64,
    /// `LR^{eps'}(N (x) F^L) - log L^2 - log(1 - 2 eps') + 2`.
    pub upper: f64,
}

/// Output of [`catalytic_dilution`].
#[derive(Debug, Clone)]
pub struct Catalysis {
    pub superchannel: Superchannel,
    /// The simulated channel `N^eps`.
    pub target: BipartiteChannel,
    /// The miss channel `R`.
    pub miss: BipartiteChannel,
    pub k: usize,
    pub l: usize,
    pub delta: f64,
    pub epsilon: f64,
    /// `eps^2 / (2 |A0|^2 |B0|^2)`.
    pub epsilon_prime: f64,
    /// `1 + R(N^eps (x) F^L)`.
    pub r: f64,
    /// `log K^2`.
    pub realized: f64,
    pub bounds: CatalysisBounds,
    /// Generalized robustness of the miss channel.
    pub miss_robustness: f64,
    /// Largest entry of `Theta[F^K (x) F^L] - N^eps (x) F^L`.
    pub simulation_residual: f64,
    pub report: MeasureReport,
}

/// Catalytic dilution of `n` with catalyst `F^l` under `delta`-SEPPSC:
///
/// ```text
/// Theta[E] = tr(J^{F^K (x) F^L} J^E) N^eps (x) F^L + tr((I - J^{F^K (x) F^L}) J^E) R
/// ```
///
/// where `N^eps` minimizes `R(N^eps (x) F^L)` over the `eps` diamond ball,
/// `N^eps (x) F^L + (r - 1) R = r S` with `S` PPT, and
/// `K = ceil(sqrt(r)/L)`. Requires `l^2 >= 1 + 1/delta`.
pub fn catalytic_dilution(
    n: &BipartiteChannel,
    l: usize,
    delta: f64,
    eps: f64,
    settings: &SolverSettings,
) -> Result<Catalysis> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Invalid(format!("delta must be positive, got {delta}")));
    }
    if ((l * l) as f64) < 1.0 + 1.0 / delta - 1e-12 {
        return Err(Error::Invalid(format!("catalyst size {l} violates l^2 >= 1 + 1/delta for delta = {delta}")));
    }
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::Invalid(format!("eps = {eps} outside [0, 1/2)")));
    }
    let dims = n.dims();
    let eps_prime = eps * eps / (2.0 * ((dims[0] * dims[1]).pow(2)) as f64);

    let (sm, target) = catalytic_smoothed_log_robustness(n, l, eps, settings)?;
    let r = 1.0 + sm.robustness;
    let hit = sm.target.clone();
    let raw_miss = sm
        .mix
        .clone()
        .ok_or_else(|| Error::Solver("catalytic decomposition returned no mixing channel".into()))?;
    let miss = super::twirl_catalyst(&raw_miss, l)?;
    let k = ceil_snapped(r.sqrt() / l as f64);

    let slot = swap_choi(k).tensor(&swap_choi(l));
    let effect = slot.choi().clone();
    let theta = Superchannel::measure_and_prepare(Test::Choi { effect }, hit.clone(), miss.clone(), slot.dims())?;
    let out = theta.apply(&slot)?;
    let simulation_residual = (out.choi() - hit.choi()).iter().map(|z| z.norm()).fold(0.0, f64::max);

    let full = n.tensor(&swap_choi(l));
    let tw = Structure::Twirled { l };
    let lr_eps = smoothed_log_robustness(&full, eps, RobustnessKind::Generalized, tw, settings)?.value;
    let lr_eps_prime = if eps_prime == eps {
        lr_eps
    } else {
        smoothed_log_robustness(&full, eps_prime, RobustnessKind::Generalized, tw, settings)?.value
    };
    let log_l2 = 2.0 * (l as f64).log2();
    let bounds = CatalysisBounds {
        lr_eps,
        lr_eps_prime,
        lower: lr_eps - log_l2 - (1.0 + delta).log2(),
        upper: lr_eps_prime - log_l2 - (1.0 - 2.0 * eps_prime).log2() + 2.0,
    };
    let miss_rob = robustness_with(&miss, RobustnessKind::Generalized, tw, settings)?;
    let realized = 2.0 * (k as f64).log2();
    let report = MeasureReport {
        name: "catalytic_cost".into(),
        value: Value::Finite(realized),
        bound_kind: BoundKind::UpperBoundViaSampling,
        epsilon: Some(eps),
        residuals: sm.report.residuals.worst(&miss_rob.report.residuals),
    };
    Ok(Catalysis {
        superchannel: theta,
        target,
        miss,
        k,
        l,
        delta,
        epsilon: eps,
        epsilon_prime: eps_prime,
        r,
        realized,
        bounds,
        miss_robustness: miss_rob.value,
        simulation_residual,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{random_separable_channel, swap_channel};
    use crate::measures::standard_robustness;

    #[test]
    fn garbage_channel_is_ppt() {
        for k in 2..=3 {
            let g = garbage_channel(k).unwrap();
            assert!(g.is_ppt().min_eigenvalue >= -1e-9);
        }
    }

    #[test]
    fn dilution_of_swap_reproduces_it() {
        let f = swap_channel(2).unwrap();
        let rs = standard_robustness(&f, &SolverSettings::default()).unwrap();
        let theta = dilution_superchannel(&f, rs.mix.as_ref().unwrap(), rs.value, 2).unwrap();
        let out = theta.apply(&f).unwrap();
        assert!((out.choi() - f.choi()).iter().all(|z| z.norm() <= 1e-9));
        assert!(dilution_superchannel(&f, rs.mix.as_ref().unwrap(), rs.value, 1).is_err());
        let sep = random_separable_channel([2, 2, 2, 2], 3, 2).unwrap();
        let p = theta.hit_probability(&sep).unwrap().unwrap();
        assert!(p <= 0.25 + 1e-9);
    }

    #[test]
    fn distillation_with_zero_effect_outputs_garbage() {
        let psi = crate::channel::choi_input_state([2, 1, 2, 1]);
        let q = crate::linalg::zeros(4, 4);
        let theta = distillation_superchannel(&psi, &q, 2, [2, 1, 2, 1]).unwrap();
        let e = crate::channel::random_channel([2, 1, 2, 1], 1).unwrap();
        let out = theta.apply(&e).unwrap();
        assert!((out.choi() - garbage_channel(2).unwrap().choi()).norm() < 1e-12);
    }
}
