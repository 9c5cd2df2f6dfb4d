//! Randomized monotonicity and growth suites.

use serde::{Deserialize, Serialize};

use super::{isotropic_seppsc, random_local_superchannel};
use crate::channel::{random_channel, random_input_state};
use crate::error::{Error, Result};
use crate::measures::{
    eh_fixed_input, robustness_with, smoothed_log_robustness, RobustnessKind, SolverSettings, Structure,
};

/// Tolerance for "does not increase".
pub const MONOTONE_TOL: f64 = 1e-5;

/// Options for [`monotonicity_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityConfig {
    pub channels: usize,
    pub superchannels: usize,
    pub slot_dims: [usize; 4],
    /// Smoothing for the hypothesis-testing check.
    pub eh_eps: f64,
    pub seed: u64,
}

impl Default for MonotonicityConfig {
    fn default() -> Self {
        MonotonicityConfig { channels: 10, superchannels: 20, slot_dims: [2, 2, 2, 2], eh_eps: 0.0, seed: 0 }
    }
}

/// Largest increase seen for one measure, with the number of violations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub checks: usize,
    pub violations: usize,
    /// `max (after - before)`; negative when every check decreased.
    pub worst_increase: f64,
}

impl Tally {
    fn record(&mut self, before: f64, after: f64) {
        let inc = after - before;
        if self.checks == 0 || inc > self.worst_increase {
            self.worst_increase = inc;
        }
        self.checks += 1;
        if inc > MONOTONE_TOL {
            self.violations += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicitySummary {
    pub config: MonotonicityConfig,
    pub standard_robustness: Tally,
    pub generalized_robustness: Tally,
    /// `E_H(Theta[N]; psi)` against `E_H(N; (pre (x) id)(psi))`.
    pub hypothesis_testing: Tally,
}

impl MonotonicitySummary {
    pub fn violations(&self) -> usize {
        self.standard_robustness.violations + self.generalized_robustness.violations + self.hypothesis_testing.violations
    }
}

/// Output dims and memory for the `j`-th sampled superchannel.
fn shape(j: usize, slot: [usize; 4]) -> ([usize; 4], [usize; 2]) {
    let out = match j % 3 {
        0 => slot,
        1 => [slot[0], 1, slot[2], slot[3]],
        _ => [slot[0], slot[1], slot[2], 1],
    };
    let memory = match j % 4 {
        0 => [1, 1],
        1 => [2, 1],
        2 => [1, 2],
        _ => [2, 2],
    };
    (out, memory)
}

/// Apply random local pre/post superchannels to random channels and check
/// that both robustness measures and the fixed-input hypothesis-testing
/// quantity do not increase.
pub fn monotonicity_suite(config: MonotonicityConfig, settings: &SolverSettings) -> Result<MonotonicitySummary> {
    let full = Structure::Full;
    let mut summary = MonotonicitySummary {
        config,
        standard_robustness: Tally::default(),
        generalized_robustness: Tally::default(),
        hypothesis_testing: Tally::default(),
    };
    for i in 0..config.channels {
        let seed = config.seed.wrapping_add(1000 * i as u64);
        let n = random_channel(config.slot_dims, seed)?;
        let rs = robustness_with(&n, RobustnessKind::Standard, full, settings)?.value;
        let rg = robustness_with(&n, RobustnessKind::Generalized, full, settings)?.value;
        for j in 0..config.superchannels {
            let s = seed.wrapping_add(j as u64 + 1);
            let (out, memory) = shape(i + j, config.slot_dims);
            let theta = random_local_superchannel(config.slot_dims, out, memory, s)?;
            let m = theta.apply(&n)?;
            let after_s = robustness_with(&m, RobustnessKind::Standard, full, settings)?.value;
            let after_g = robustness_with(&m, RobustnessKind::Generalized, full, settings)?.value;
            summary.standard_robustness.record(rs, after_s);
            summary.generalized_robustness.record(rg, after_g);

            let psi = random_input_state(out, out[0] * out[1], s);
            let tilde = theta
                .preprocess_probe(&psi)?
                .ok_or_else(|| Error::Invalid("local superchannels are pre/post".into()))?;
            let before = eh_fixed_input(&n, &tilde, config.eh_eps, settings)?.value.as_f64();
            let after = eh_fixed_input(&m, &psi, config.eh_eps, settings)?.value.as_f64();
            summary.hypothesis_testing.record(before, after);
        }
    }
    Ok(summary)
}

/// Options for [`growth_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub k: usize,
    /// Weight of `F^k` in the miss channel of the isotropic superchannel.
    pub w: f64,
    pub channels: usize,
    pub eps: f64,
    pub seed: u64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig { k: 2, w: 0.3, channels: 10, eps: 0.05, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    pub config: GrowthConfig,
    pub delta: f64,
    /// `LR(Theta[N]) - LR(N) - log2(1 + delta)`.
    pub plain: Tally,
    /// The same with `eps`-smoothing on both sides.
    pub smoothed: Tally,
}

impl GrowthSummary {
    pub fn violations(&self) -> usize {
        self.plain.violations + self.smoothed.violations
    }
}

/// Check `LR(Theta[N]) <= LR(N) + log2(1 + delta)`, unsmoothed and smoothed,
/// for the `delta`-SEPPSC of [`isotropic_seppsc`] on random channels.
pub fn growth_suite(config: GrowthConfig, settings: &SolverSettings) -> Result<GrowthSummary> {
    let iso = isotropic_seppsc(config.k, config.w, settings)?;
    let allowance = (1.0 + iso.delta).log2();
    let mut summary = GrowthSummary { config, delta: iso.delta, plain: Tally::default(), smoothed: Tally::default() };
    let g = RobustnessKind::Generalized;
    for i in 0..config.channels {
        let n = random_channel([config.k; 4], config.seed.wrapping_add(i as u64))?;
        let m = iso.superchannel.apply(&n)?;
        let before = smoothed_log_robustness(&n, 0.0, g, Structure::Auto, settings)?.value;
        let after = smoothed_log_robustness(&m, 0.0, g, Structure::Auto, settings)?.value;
        summary.plain.record(before + allowance, after);
        if config.eps > 0.0 {
            let before = smoothed_log_robustness(&n, config.eps, g, Structure::Auto, settings)?.value;
            let after = smoothed_log_robustness(&m, config.eps, g, Structure::Auto, settings)?.value;
            summary.smoothed.record(before + allowance, after);
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_run_clean() {
        let s = SolverSettings::default();
        let cfg = MonotonicityConfig { channels: 1, superchannels: 4, ..Default::default() };
        let m = monotonicity_suite(cfg, &s).unwrap();
        assert_eq!(m.hypothesis_testing.checks, 4);
        assert_eq!(m.violations(), 0, "{m:?}");
        let g = growth_suite(GrowthConfig { channels: 2, ..Default::default() }, &s).unwrap();
        assert!(g.delta > 0.0);
        assert_eq!(g.violations(), 0, "{g:?}");
    }
}
