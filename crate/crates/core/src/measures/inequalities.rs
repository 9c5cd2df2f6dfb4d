//! Checks of the norm and fidelity relations between channel distances.
//!
//! Each check uses the certified bracket from [`diamond_bounds`], so a
//! reported violation is a genuine one and not a solver artifact.

use serde::{Deserialize, Serialize};

use super::diamond::{choi_trace_distance, diamond_bounds, DiamondBounds};
use super::SolverSettings;
use crate::channel::{random_channel, random_input_state, BipartiteChannel};
use crate::linalg::DensityOperator;
use crate::error::Result;

/// `(1/d) ||N - M||_diamond <= ||J_N - J_M||_1 <= ||N - M||_diamond` with `d = |A0||B0|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub diamond: DiamondBounds,
    pub choi_distance: f64,
    /// `||.||_diamond - ||J||_1`, evaluated at the diamond upper bound.
    pub upper_slack: f64,
    /// `||J||_1 - ||.||_diamond / d`, evaluated at the diamond lower bound.
    pub lower_slack: f64,
}

impl SandwichCheck {
    pub fn worst_slack(&self) -> f64 {
        self.upper_slack.min(self.lower_slack)
    }
}

pub fn choi_sandwich_check(n: &BipartiteChannel, m: &BipartiteChannel, settings: &SolverSettings) -> Result<SandwichCheck> {
    let (diamond, _) = diamond_bounds(n, m, settings)?;
    let choi = choi_trace_distance(n, m)?;
    let d = n.d_in() as f64;
    Ok(SandwichCheck {
        diamond,
        choi_distance: choi,
        upper_slack: 2.0 * diamond.upper - choi,
        lower_slack: choi - 2.0 * diamond.lower / d,
    })
}

/// Fidelity transfer in both directions:
///
/// * (a) with `eps = (1/2)||N - M||_diamond`, every input gives output
///   fidelity at least `(1 - eps)^2`;
/// * (b) with Choi fidelity `1 - eps`, `(1/2)||N - M||_diamond <= |A0||B0| sqrt(eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferCheck {
    pub diamond: DiamondBounds,
    pub choi_fidelity: f64,
    pub min_sampled_fidelity: f64,
    /// `min F - (1 - eps)^2` over sampled inputs.
    pub output_slack: f64,
    /// `|A0||B0| sqrt(1 - F_Choi) - (1/2)||.||_diamond`.
    pub choi_slack: f64,
}

impl TransferCheck {
    pub fn worst_slack(&self) -> f64 {
        self.output_slack.min(self.choi_slack)
    }
}

pub fn fidelity_diamond_transfer_check(
    n: &BipartiteChannel,
    m: &BipartiteChannel,
    samples: usize,
    seed: u64,
    settings: &SolverSettings,
) -> Result<TransferCheck> {
    let (diamond, _) = diamond_bounds(n, m, settings)?;
    let dims = n.dims();
    let mut min_f: f64 = 1.0;
    for k in 0..samples {
        let psi = random_input_state(dims, n.d_in(), seed.wrapping_add(k as u64));
        let f = n.apply(&psi)?.fidelity(&m.apply(&psi)?)?;
        min_f = min_f.min(f);
    }
    let choi_fidelity = crate::linalg::fidelity(n.choi(), m.choi())?;
    let eps = diamond.upper.min(1.0);
    Ok(TransferCheck {
        diamond,
        choi_fidelity,
        min_sampled_fidelity: min_f,
        output_slack: min_f - (1.0 - eps).powi(2),
        choi_slack: n.d_in() as f64 * (1.0 - choi_fidelity).max(0.0).sqrt() - diamond.lower,
    })
}

/// Fuchs-van de Graaf on states: `1 - sqrt(F) <= T <= sqrt(1 - F)`.
pub fn fuchs_van_de_graaf_slack(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let f = rho.fidelity(sigma)?;
    let t = rho.trace_distance(sigma);
    Ok((t - (1.0 - f.sqrt())).min((1.0 - f).max(0.0).sqrt() - t))
}

/// Tolerance for the inequality suite.
pub const INEQUALITY_TOL: f64 = 1e-8;

/// Worst slacks and violation count over [`inequality_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalitySummary {
    pub pairs: usize,
    pub violations: usize,
    pub worst_state_slack: f64,
    pub worst_sandwich_slack: f64,
    pub worst_transfer_slack: f64,
}

/// Run the state, sandwich and transfer checks on `pairs` random pairs.
/// Even pairs are independent; odd pairs are a channel and a small
/// perturbation of it, where the bounds are closer to tight.
pub fn inequality_suite(pairs: usize, seed: u64, settings: &SolverSettings) -> Result<InequalitySummary> {
    const SHAPES: [[usize; 4]; 3] = [[2, 1, 2, 1], [1, 2, 2, 1], [2, 2, 2, 2]];
    let mut out = InequalitySummary {
        pairs,
        violations: 0,
        worst_state_slack: f64::INFINITY,
        worst_sandwich_slack: f64::INFINITY,
        worst_transfer_slack: f64::INFINITY,
    };
    for i in 0..pairs {
        let s = seed.wrapping_add(1000 * i as u64);
        let dims = SHAPES[i % SHAPES.len()];
        let n = random_channel(dims, s)?;
        let m = if i % 2 == 0 {
            random_channel(dims, s + 1)?
        } else {
            n.mix(&random_channel(dims, s + 1)?, 0.97)?
        };
        let rho = random_input_state(dims, n.d_in(), s + 2);
        let state = fuchs_van_de_graaf_slack(&n.apply(&rho)?, &m.apply(&rho)?)?;
        let sandwich = choi_sandwich_check(&n, &m, settings)?.worst_slack();
        let transfer = fidelity_diamond_transfer_check(&n, &m, 3, s + 3, settings)?.worst_slack();
        out.worst_state_slack = out.worst_state_slack.min(state);
        out.worst_sandwich_slack = out.worst_sandwich_slack.min(sandwich);
        out.worst_transfer_slack = out.worst_transfer_slack.min(transfer);
        out.violations += [state, sandwich, transfer].iter().filter(|&&x| x < -INEQUALITY_TOL).count();
    }
    Ok(out)
}
