//! Sampled certification of separability preservation, and the samplers
//! used by the monotonicity checks.

use serde::{Deserialize, Serialize};

use super::{random_local, Superchannel, Test};
use crate::channel::{random_separable_channel, swap_choi, BipartiteChannel, ChannelJson};
use crate::error::{Error, Result};
use crate::measures::{generalized_robustness, SolverSettings};
use crate::rng;

/// Slack on `max_output_robustness <= delta_claim`.
pub const CERTIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of [`seppsc_certify`]. A pass is a necessary condition only: it
/// covers the sampled separable inputs, not the whole separable set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeppscCertificate {
    pub samples: usize,
    /// Largest generalized robustness (against PPT channels) among outputs.
    pub max_output_robustness: f64,
    pub delta_claim: f64,
    pub verdict: Verdict,
    /// The sampled separable input attaining the maximum.
    pub worst_witness: ChannelJson,
    pub scope: String,
}

/// Apply `theta` to `samples` random separable channels and compare the
/// largest output robustness with `delta`.
pub fn seppsc_certify(
    theta: &Superchannel,
    samples: usize,
    delta: f64,
    seed: u64,
    settings: &SolverSettings,
) -> Result<SeppscCertificate> {
    if samples == 0 {
        return Err(Error::Invalid("need at least one sample".into()));
    }
    let mut worst: Option<(f64, BipartiteChannel)> = None;
    for i in 0..samples {
        let probe = random_separable_channel(theta.slot_dims(), seed.wrapping_add(i as u64), 1 + i % 3)?;
        let out = theta.apply(&probe)?;
        let r = generalized_robustness(&out, settings)?.value;
        if worst.as_ref().is_none_or(|(w, _)| r > *w) {
            worst = Some((r, probe));
        }
    }
    let (max, witness) = worst.expect("at least one sample");
    Ok(SeppscCertificate {
        samples,
        max_output_robustness: max,
        delta_claim: delta,
        verdict: if max <= delta + CERTIFY_TOL { Verdict::Pass } else { Verdict::Fail },
        worst_witness: ChannelJson::from(&witness),
        scope: "sampled separable inputs; necessary condition only".into(),
    })
}

/// Random superchannel with local pre/post processing: party `A` applies
/// `A0' -> A0 E_A` and `A1 E_A -> A1'`, party `B` likewise with memory `E_B`.
/// It maps PPT channels to PPT channels and separable ones to separable ones.
pub fn random_local_superchannel(
    slot_dims: [usize; 4],
    out_dims: [usize; 4],
    memory: [usize; 2],
    seed: u64,
) -> Result<Superchannel> {
    if memory.contains(&0) {
        return Err(Error::Dimension("memory dimensions must be positive".into()));
    }
    let mut g = rng::seeded(seed);
    let [ea, eb] = memory;
    let pre_a = random_local(out_dims[0], slot_dims[0] * ea, &mut g);
    let pre_b = random_local(out_dims[1], slot_dims[1] * eb, &mut g);
    let post_a = random_local(slot_dims[2] * ea, out_dims[2], &mut g);
    let post_b = random_local(slot_dims[3] * eb, out_dims[3], &mut g);
    // Outputs (A0, E_A, B0, E_B) -> (A0, B0, E_A, E_B).
    let pre = pre_a.tensor(&pre_b).permute(
        &[out_dims[0], out_dims[1]],
        &[0, 1],
        &[slot_dims[0], ea, slot_dims[1], eb],
        &[0, 2, 1, 3],
    )?;
    // Inputs (A1, B1, E_A, E_B) are read as (A1, E_A, B1, E_B).
    let post = post_a.tensor(&post_b).permute(
        &[slot_dims[2], ea, slot_dims[3], eb],
        &[0, 2, 1, 3],
        &[out_dims[2], out_dims[3]],
        &[0, 1],
    )?;
    Superchannel::pre_post(pre, post, ea * eb, slot_dims, out_dims)
}

/// A `delta`-SEPPSC on `k x k` swap-sized channels together with its `delta`.
#[derive(Debug, Clone)]
pub struct IsotropicSeppsc {
    pub superchannel: Superchannel,
    /// Largest weight on `J^{F^k}` among outputs for PPT inputs.
    pub max_weight: f64,
    /// Generalized robustness of the output at `max_weight`.
    pub delta: f64,
}

/// `Theta[E] = p F^k + (1 - p) (w F^k + (1 - w) G^k)` with `p = tr(J^{F^k} J^E)`.
///
/// PPT inputs have `p <= 1/k^2`, so every output is the isotropic Choi
/// channel with weight at most `1/k^2 + (1 - 1/k^2) w`; robustness is
/// convex and vanishes at `1/k^2`, hence `delta` is its value at that
/// largest weight.
pub fn isotropic_seppsc(k: usize, w: f64, settings: &SolverSettings) -> Result<IsotropicSeppsc> {
    if k < 2 || !(0.0..=1.0).contains(&w) {
        return Err(Error::Invalid(format!("need k >= 2 and w in [0, 1], got k = {k}, w = {w}")));
    }
    let f = swap_choi(k);
    let g = super::garbage_channel(k)?;
    let miss = f.mix(&g, w)?;
    let theta = Superchannel::measure_and_prepare(Test::Choi { effect: f.choi().clone() }, f.clone(), miss, [k; 4])?;
    let kk = (k * k) as f64;
    let max_weight = 1.0 / kk + (1.0 - 1.0 / kk) * w;
    let delta = generalized_robustness(&f.mix(&g, max_weight)?, settings)?.value;
    Ok(IsotropicSeppsc { superchannel: theta, max_weight, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::swap_channel;
    use crate::superchannel::constant_superchannel;

    #[test]
    fn unconditional_swap_fails_at_zero_and_passes_above_three() {
        let s = SolverSettings::default();
        let theta = constant_superchannel(&swap_channel(2).unwrap(), [2, 1, 2, 1]).unwrap();
        let c0 = seppsc_certify(&theta, 3, 0.0, 1, &s).unwrap();
        assert_eq!(c0.verdict, Verdict::Fail);
        assert!((c0.max_output_robustness - 3.0).abs() < 1e-5);
        let c1 = seppsc_certify(&theta, 3, 3.1, 1, &s).unwrap();
        assert_eq!(c1.verdict, Verdict::Pass);
    }

    #[test]
    fn local_superchannels_keep_ppt_channels_ppt() {
        let theta = random_local_superchannel([2, 2, 2, 2], [2, 1, 1, 2], [2, 1], 4).unwrap();
        let sep = random_separable_channel([2, 2, 2, 2], 1, 2).unwrap();
        let out = theta.apply(&sep).unwrap();
        assert_eq!(out.dims(), [2, 1, 1, 2]);
        assert!(out.is_ppt().ppt);
    }
}
