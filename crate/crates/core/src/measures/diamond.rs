//! Diamond distance and max-divergence between channels.
//!
//! The diamond distance uses the Watrous program
//!
//! ```text
//! (1/2)||N - M||_diamond = max <d (J_N - J_M), W>  s.t.  0 <= W <= rho (x) I, rho a state
//! ```
//!
//! on normalized Choi matrices `J`. Both a feasible input state and a dual
//! certificate are extracted from the solution, so every result comes with
//! rigorous lower and upper bounds.

use serde::{Deserialize, Serialize};

use super::lmi::{hermitian_basis, tp_family_basis, Lmi};
use super::robustness::accept;
use super::{BoundKind, MeasureReport, ResidualSummary, SolverSettings, Value};
use crate::channel::BipartiteChannel;
use crate::error::{Error, Result};
use crate::linalg::{
    self, c, eigh, eigenvalues, hermitian_part, identity, kron, partial_trace, psd_clamp, psd_sqrt, spectral_map,
    trace_norm, zeros, ComplexMatrix,
};

/// Certified bracket on `(1/2)||N - M||_diamond`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondBounds {
    /// Achieved by an explicit input state.
    pub lower: f64,
    /// Value of a feasible point of the dual program.
    pub upper: f64,
    /// Solver value, clamped into `[lower, upper]`.
    pub value: f64,
}

fn check_dims(n: &BipartiteChannel, m: &BipartiteChannel) -> Result<()> {
    if n.dims() != m.dims() {
        return Err(Error::Dimension(format!("channel dims differ: {:?} vs {:?}", n.dims(), m.dims())));
    }
    Ok(())
}

/// `||J_N - J_M||_1` for normalized Choi matrices.
pub fn choi_trace_distance(n: &BipartiteChannel, m: &BipartiteChannel) -> Result<f64> {
    check_dims(n, m)?;
    Ok(trace_norm(&(n.choi() - m.choi())))
}

/// `(1/2)||(sqrt(rho) (x) I) d (J_N - J_M) (sqrt(rho) (x) I)||_1`, the output
/// distance on a purification of `rho^T`.
fn distance_on_input(n: &BipartiteChannel, m: &BipartiteChannel, rho: &ComplexMatrix) -> Result<f64> {
    let d = n.d_in();
    let rho = rho / rho.trace();
    let root = kron(&psd_sqrt(&rho), &identity(n.d_out()));
    let delta = (n.choi() - m.choi()) * c(d as f64, 0.0);
    Ok(0.5 * trace_norm(&hermitian_part(&(&root * delta * &root))))
}

/// Bracket `(1/2)||N - M||_diamond` by solving the Watrous program.
pub fn diamond_bounds(n: &BipartiteChannel, m: &BipartiteChannel, settings: &SolverSettings) -> Result<(DiamondBounds, ResidualSummary)> {
    check_dims(n, m)?;
    let (din, dout) = (n.d_in(), n.d_out());
    let dim = din * dout;
    let delta = hermitian_part(&((n.choi() - m.choi()) * c(din as f64, 0.0)));
    if delta.iter().all(|z| z.norm() <= 1e-15) {
        let zero = DiamondBounds { lower: 0.0, upper: 0.0, value: 0.0 };
        return Ok((zero, ResidualSummary::closed_form()));
    }
    let real = linalg::is_real(&delta);

    let mut lmi = Lmi::new();
    let w = lmi.variable(&zeros(dim, dim), &hermitian_basis(dim, real));
    let rho_basis: Vec<_> = tp_family_basis(1, 1, din, real, true).into_iter().map(|mut b| b.remove(0).1).collect();
    let rho = lmi.variable(&(identity(din) * c(1.0 / din as f64, 0.0)), &rho_basis);
    lmi.add_psd("W", w.clone());
    lmi.add_psd("rho I - W", rho.kron_identity(dout).plus(&w, -1.0));
    let (lin, cst) = w.inner_with(&delta);
    lmi.add_cost(&lin, cst, -1.0);
    let sol = lmi.solve(settings)?;
    let summary = accept(&sol, settings, "diamond distance")?;
    let value = -sol.value;

    // Lower bound from the optimal input state.
    let rho_opt = psd_clamp(&hermitian_part(&rho.eval(&sol.y)));
    let rho_opt = if rho_opt.trace().re > 1e-12 { rho_opt } else { identity(din) };
    let lower = distance_on_input(n, m, &rho_opt)?;

    // Upper bound from the multiplier of `rho I - W`: any Z >= 0 with
    // Z >= delta certifies (1/2)||.|| <= lambda_max(tr_out Z).
    let z = psd_clamp(&hermitian_part(&sol.multipliers[1]));
    let gap = eigenvalues(&(&z - &delta))[0];
    let z = if gap < 0.0 { z + identity(dim) * c(-gap, 0.0) } else { z };
    let marg = partial_trace(&z, &[din, dout], &[0])?;
    let upper = linalg::max_eigenvalue(&hermitian_part(&marg)).max(lower);

    let bounds = DiamondBounds { lower, upper, value: value.clamp(lower, upper) };
    Ok((bounds, summary))
}

/// `(1/2)||N - M||_diamond`, in `[0, 1]`.
pub fn diamond_distance(n: &BipartiteChannel, m: &BipartiteChannel, settings: &SolverSettings) -> Result<MeasureReport> {
    let (b, residuals) = diamond_bounds(n, m, settings)?;
    Ok(MeasureReport {
        name: "diamond_distance".into(),
        value: Value::Finite(b.value),
        bound_kind: BoundKind::Exact,
        epsilon: None,
        residuals,
    })
}

/// `D_max(N || M) = log2 min { lambda : lambda J_M >= J_N }`, infinite when the
/// support of `J_N` is not contained in that of `J_M`.
pub fn dmax(n: &BipartiteChannel, m: &BipartiteChannel) -> Result<Value> {
    check_dims(n, m)?;
    let (vals, vecs) = eigh(m.choi());
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = 1e-12 * top.max(1e-300);
    let kernel = spectral_map(&vals, &vecs, |l| if l > cutoff { 0.0 } else { 1.0 });
    let leak = (&kernel * n.choi() * &kernel).trace().re;
    if leak > 1e-10 {
        return Ok(Value::Infinite);
    }
    let inv_root = spectral_map(&vals, &vecs, |l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 });
    let ratio = hermitian_part(&(&inv_root * n.choi() * &inv_root));
    let lambda = linalg::max_eigenvalue(&ratio).max(1.0);
    Ok(Value::Finite(lambda.log2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{depolarizing_channel, identity_channel, random_channel, swap_channel};

    fn flip() -> BipartiteChannel {
        let mut x = zeros(2, 2);
        x[(0, 1)] = c(1.0, 0.0);
        x[(1, 0)] = c(1.0, 0.0);
        BipartiteChannel::from_unitary(&kron(&x, &identity(2)), [2, 2, 2, 2]).unwrap()
    }

    #[test]
    fn distinguishable_unitaries_are_at_distance_one() {
        let s = SolverSettings::default();
        let id = identity_channel(2, 2).unwrap();
        let (b, _) = diamond_bounds(&id, &flip(), &s).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-6 && (b.upper - 1.0).abs() < 1e-6, "{b:?}");
        assert_eq!(diamond_distance(&id, &id, &s).unwrap().value, Value::Finite(0.0));
    }

    #[test]
    fn bounds_bracket_and_dominate_choi_distance() {
        let s = SolverSettings::default();
        let a = random_channel([2, 1, 2, 1], 1).unwrap();
        let b = random_channel([2, 1, 2, 1], 2).unwrap();
        let (d, _) = diamond_bounds(&a, &b, &s).unwrap();
        assert!(d.lower <= d.upper && d.upper - d.lower < 1e-6, "{d:?}");
        assert!(choi_trace_distance(&a, &b).unwrap() <= 2.0 * d.upper + 1e-9);
    }

    #[test]
    fn dmax_of_swap_against_full_depolarizing() {
        let f = swap_channel(2).unwrap();
        let dep = depolarizing_channel(2, 2, 1.0).unwrap();
        assert!((dmax(&f, &dep).unwrap().as_f64() - 4.0).abs() < 1e-10);
        assert!(dmax(&f, &f).unwrap().as_f64().abs() < 1e-9);
        assert_eq!(dmax(&dep, &f).unwrap(), Value::Infinite);
    }
}
